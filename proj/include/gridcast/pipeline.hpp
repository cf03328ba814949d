#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gridcast/baselines.hpp"
#include "gridcast/data.hpp"
#include "gridcast/lstm.hpp"
#include "gridcast/metrics.hpp"

namespace gridcast::pipeline {

/// Scaled views of one chronological split. The scaler is fit on the
/// training portion only.
struct PreparedData {
	data::LoadSeries train;
	data::LoadSeries test;
	data::ScalerParams scaler;
	std::vector<double> scaled_train;
	std::vector<double> scaled_test;
	data::WindowedDataset train_windows;
	data::WindowedDataset test_windows; // targets are the test points; inputs may reach into train
};

PreparedData prepare(const data::LoadSeries &series, std::size_t lookback, double split_ratio);

struct ModelOrders {
	int ar = 25;
	std::size_t ma_window = 24;
	baselines::ArimaOrder arma{2, 0, 2};
	baselines::ArimaOrder arima{2, 1, 2};
};

// Called with each fitted model, e.g. to save it next to the report.
using ModelSink = std::function<void(const std::string &name, const baselines::ArimaModel &model)>;

// Forecasters work in MWh. Baselines are fit on the scaled training series
// when the forecaster runs, so a failed fit becomes an error row.
metrics::Forecaster make_ar_forecaster(const PreparedData &prep, int p, EvalMode mode, ModelSink sink = {});
metrics::Forecaster make_arima_forecaster(const std::string &name, const PreparedData &prep,
                                          baselines::ArimaOrder order, EvalMode mode, ModelSink sink = {});
metrics::Forecaster make_moving_average_forecaster(std::size_t window, EvalMode mode);
metrics::Forecaster make_persistence_forecaster(EvalMode mode);
metrics::Forecaster make_lstm_forecaster(const lstm::LstmParams &params, const lstm::LstmConfig &config,
                                         const data::ScalerParams &scaler, EvalMode mode);

} // namespace gridcast::pipeline
