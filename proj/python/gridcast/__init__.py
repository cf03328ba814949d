"""Hourly electricity-demand forecasting: data prep, baselines, LSTM, metrics."""

from ._core import (
    ArimaModel,
    LstmConfig,
    NumericalError,
    acf,
    fit_ar,
    fit_arima,
    fit_arma,
    fit_scaler,
    generate_synthetic,
    mae,
    make_windows,
    mape,
    param_count,
    pacf,
    pearson,
    predict_lstm,
    rolling_forecast,
    run_cli,
    train_lstm,
)

__all__ = [
    "ArimaModel",
    "LstmConfig",
    "NumericalError",
    "acf",
    "fit_ar",
    "fit_arima",
    "fit_arma",
    "fit_scaler",
    "generate_synthetic",
    "mae",
    "make_windows",
    "mape",
    "param_count",
    "pacf",
    "pearson",
    "predict_lstm",
    "rolling_forecast",
    "run_cli",
    "train_lstm",
]
