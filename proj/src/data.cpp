#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gridcast/data.hpp"
#include "gridcast/error.hpp"
#include "gridcast/forecast.hpp"

namespace gridcast {

EvalMode parse_eval_mode(std::string_view text) {
	if (text == "rolling") {
		return EvalMode::Rolling;
	}
	if (text == "static") {
		return EvalMode::Static;
	}
	throw std::invalid_argument("unknown evaluation mode '" + std::string(text) + "' (expected rolling|static)");
}

std::string_view to_string(EvalMode mode) {
	return mode == EvalMode::Rolling ? "rolling" : "static";
}

} // namespace gridcast

namespace gridcast::data {

bool TimeSeriesTable::has_column(std::string_view name) const {
	return std::find(names.begin(), names.end(), name) != names.end();
}

const OptionalColumn &TimeSeriesTable::column(std::string_view name) const {
	auto it = std::find(names.begin(), names.end(), name);
	if (it == names.end()) {
		throw std::invalid_argument("no column '" + std::string(name) + "'");
	}
	return columns[static_cast<std::size_t>(it - names.begin())];
}

SummaryStats summarize(std::span<const std::optional<double>> column) {
	if (column.empty()) {
		throw std::invalid_argument("summarize: empty column");
	}
	SummaryStats s;
	double sum = 0.0;
	s.min = std::numeric_limits<double>::infinity();
	s.max = -std::numeric_limits<double>::infinity();
	for (const auto &v : column) {
		if (!v) {
			++s.missing_count;
			continue;
		}
		++s.valid_count;
		sum += *v;
		s.min = std::min(s.min, *v);
		s.max = std::max(s.max, *v);
	}
	if (s.valid_count == 0) {
		throw std::invalid_argument("summarize: every value is missing");
	}
	s.mean = sum / static_cast<double>(s.valid_count);
	// Rounding can push the mean of a near-constant column past its extremes.
	s.mean = std::clamp(s.mean, s.min, s.max);
	if (s.valid_count > 1) {
		double ss = 0.0;
		for (const auto &v : column) {
			if (v) {
				ss += (*v - s.mean) * (*v - s.mean);
			}
		}
		s.std_dev = std::sqrt(ss / static_cast<double>(s.valid_count - 1));
	}
	return s;
}

nlohmann::json to_json(const SummaryStats &stats) {
	return {{"valid", stats.valid_count}, {"missing", stats.missing_count}, {"mean", stats.mean},
	        {"std", stats.std_dev},       {"min", stats.min},               {"max", stats.max}};
}

LoadSeries drop_missing(const TimeSeriesTable &table, std::string_view column) {
	const auto &values = table.column(column);
	LoadSeries out;
	for (std::size_t i = 0; i < values.size(); ++i) {
		if (values[i]) {
			out.timestamps.push_back(table.timestamps[i]);
			out.values.push_back(*values[i]);
		}
	}
	if (out.size() < 2) {
		throw std::invalid_argument("drop_missing: column '" + std::string(column) + "' has fewer than 2 values");
	}
	return out;
}

ScalerParams fit_scaler(std::span<const double> train_values) {
	if (train_values.size() < 2) {
		throw std::invalid_argument("fit_scaler: need at least 2 values");
	}
	const auto [lo, hi] = std::minmax_element(train_values.begin(), train_values.end());
	if (!(*hi > *lo)) {
		throw NumericalError("fit_scaler: constant input (min == max == " + std::to_string(*lo) + ")");
	}
	return {*lo, *hi};
}

double scale(double value, const ScalerParams &params) {
	return (value - params.min) / (params.max - params.min);
}

double inverse_scale(double scaled, const ScalerParams &params) {
	return scaled * (params.max - params.min) + params.min;
}

std::vector<double> scale(std::span<const double> values, const ScalerParams &params) {
	if (!(params.max > params.min)) {
		throw std::invalid_argument("scale: scaler max must exceed min");
	}
	std::vector<double> out(values.size());
	std::transform(values.begin(), values.end(), out.begin(), [&](double v) { return scale(v, params); });
	return out;
}

std::vector<double> inverse_scale(std::span<const double> scaled, const ScalerParams &params) {
	std::vector<double> out(scaled.size());
	std::transform(scaled.begin(), scaled.end(), out.begin(), [&](double v) { return inverse_scale(v, params); });
	return out;
}

std::pair<LoadSeries, LoadSeries> train_test_split(const LoadSeries &series, double ratio) {
	if (!(ratio > 0.0 && ratio < 1.0)) {
		throw std::invalid_argument("train_test_split: ratio must lie in (0, 1)");
	}
	const auto n = series.size();
	const auto cut = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
	if (cut == 0 || cut == n) {
		throw std::invalid_argument("train_test_split: ratio " + std::to_string(ratio) + " leaves an empty side for " +
		                            std::to_string(n) + " points");
	}
	const auto cut_it = static_cast<std::ptrdiff_t>(cut);
	LoadSeries train{{series.timestamps.begin(), series.timestamps.begin() + cut_it},
	                 {series.values.begin(), series.values.begin() + cut_it}};
	LoadSeries test{{series.timestamps.begin() + cut_it, series.timestamps.end()},
	                {series.values.begin() + cut_it, series.values.end()}};
	return {std::move(train), std::move(test)};
}

WindowedDataset make_windows(std::span<const double> values, std::size_t lookback) {
	if (lookback == 0) {
		throw std::invalid_argument("make_windows: lookback must be >= 1");
	}
	if (values.size() <= lookback) {
		throw std::invalid_argument("make_windows: series of length " + std::to_string(values.size()) +
		                            " is too short for lookback " + std::to_string(lookback));
	}
	WindowedDataset out;
	out.lookback = lookback;
	const std::size_t n = values.size() - lookback;
	out.inputs.reserve(n * lookback);
	out.targets.reserve(n);
	for (std::size_t i = 0; i < n; ++i) {
		out.inputs.insert(out.inputs.end(), values.begin() + static_cast<std::ptrdiff_t>(i),
		                  values.begin() + static_cast<std::ptrdiff_t>(i + lookback));
		out.targets.push_back(values[i + lookback]);
	}
	return out;
}

} // namespace gridcast::data
