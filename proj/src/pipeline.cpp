#include <stdexcept>
#include <string>

#include "gridcast/pipeline.hpp"

namespace gridcast::pipeline {

PreparedData prepare(const data::LoadSeries &series, std::size_t lookback, double split_ratio) {
	PreparedData prep;
	std::tie(prep.train, prep.test) = data::train_test_split(series, split_ratio);
	if (prep.train.size() <= lookback) {
		throw std::invalid_argument("prepare: training split of " + std::to_string(prep.train.size()) +
		                            " points is too short for lookback " + std::to_string(lookback));
	}
	prep.scaler = data::fit_scaler(prep.train.values);
	prep.scaled_train = data::scale(prep.train.values, prep.scaler);
	prep.scaled_test = data::scale(prep.test.values, prep.scaler);
	prep.train_windows = data::make_windows(prep.scaled_train, lookback);

	std::vector<double> bridge(prep.scaled_train.end() - static_cast<std::ptrdiff_t>(lookback), prep.scaled_train.end());
	bridge.insert(bridge.end(), prep.scaled_test.begin(), prep.scaled_test.end());
	prep.test_windows = data::make_windows(bridge, lookback);
	return prep;
}

namespace {

metrics::Forecaster arima_like(std::string name, const PreparedData &prep, baselines::ArimaOrder order, EvalMode mode,
                               ModelSink sink) {
	auto fit = [train = prep.scaled_train, order]() {
		return baselines::fit_arima(train, order.p, order.d, order.q);
	};
	return {name, [name, fit, scaler = prep.scaler, mode, sink = std::move(sink)](std::span<const double> warmup,
	                                                                              std::span<const double> test) {
		        const auto model = fit();
		        if (sink) {
			        sink(name, model);
		        }
		        const auto scaled_warmup = data::scale(warmup, scaler);
		        const auto scaled_test = data::scale(test, scaler);
		        const auto series = baselines::rolling_forecast(model, scaled_test, scaled_warmup, mode);
		        return data::inverse_scale(series.predicted, scaler);
	        }};
}

} // namespace

metrics::Forecaster make_ar_forecaster(const PreparedData &prep, int p, EvalMode mode, ModelSink sink) {
	return arima_like("ar", prep, {p, 0, 0}, mode, std::move(sink));
}

metrics::Forecaster make_arima_forecaster(const std::string &name, const PreparedData &prep,
                                          baselines::ArimaOrder order, EvalMode mode, ModelSink sink) {
	return arima_like(name, prep, order, mode, std::move(sink));
}

metrics::Forecaster make_moving_average_forecaster(std::size_t window, EvalMode mode) {
	return {"ma", [window, mode](std::span<const double> warmup, std::span<const double> test) {
		        return baselines::rolling_moving_average(window, test, warmup, mode).predicted;
	        }};
}

metrics::Forecaster make_persistence_forecaster(EvalMode mode) {
	return {"persistence", [mode](std::span<const double> warmup, std::span<const double> test) {
		        return baselines::rolling_moving_average(1, test, warmup, mode).predicted;
	        }};
}

metrics::Forecaster make_lstm_forecaster(const lstm::LstmParams &params, const lstm::LstmConfig &config,
                                         const data::ScalerParams &scaler, EvalMode mode) {
	return {"lstm", [params, config, scaler, mode](std::span<const double> warmup, std::span<const double> test) {
		        std::vector<double> history = data::scale(warmup, scaler);
		        const auto scaled_test = data::scale(test, scaler);
		        history.insert(history.end(), scaled_test.begin(), scaled_test.end());
		        return lstm::predict_series(params, history, test.size(), config, scaler, mode);
	        }};
}

} // namespace gridcast::pipeline
