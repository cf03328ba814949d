#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "gridcast/metrics.hpp"

namespace gridcast::metrics {

namespace {

void check_inputs(std::span<const double> actual, std::span<const double> predicted, const char *what) {
	if (actual.empty()) {
		throw std::invalid_argument(std::string(what) + ": empty input");
	}
	if (actual.size() != predicted.size()) {
		throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(actual.size()) +
		                            " actual vs " + std::to_string(predicted.size()) + " predicted)");
	}
	for (std::size_t i = 0; i < actual.size(); ++i) {
		if (!std::isfinite(actual[i]) || !std::isfinite(predicted[i])) {
			throw std::invalid_argument(std::string(what) + ": non-finite value at index " + std::to_string(i));
		}
	}
}

std::string format_double(double v) {
	char buf[32];
	auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
	return std::string(buf, ptr);
}

} // namespace

double mae(std::span<const double> actual, std::span<const double> predicted) {
	check_inputs(actual, predicted, "mae");
	double sum = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		sum += std::abs(actual[i] - predicted[i]);
	}
	return sum / static_cast<double>(actual.size());
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
	check_inputs(actual, predicted, "mape");
	double sum = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		if (actual[i] == 0.0) {
			throw std::invalid_argument("mape: actual value is zero at index " + std::to_string(i));
		}
		sum += std::abs((actual[i] - predicted[i]) / actual[i]);
	}
	return 100.0 * sum / static_cast<double>(actual.size());
}

const ReportRow *ComparisonReport::find(std::string_view model) const {
	auto it = std::find_if(rows.begin(), rows.end(), [&](const ReportRow &r) { return r.model == model; });
	return it == rows.end() ? nullptr : &*it;
}

ComparisonReport compare(const std::vector<Forecaster> &models, std::span<const data::TimePoint> test_timestamps,
                         std::span<const double> test_actual, std::span<const double> warmup) {
	if (test_timestamps.size() != test_actual.size()) {
		throw std::invalid_argument("compare: " + std::to_string(test_timestamps.size()) + " timestamps for " +
		                            std::to_string(test_actual.size()) + " test values");
	}
	ComparisonReport report;
	report.timestamps.assign(test_timestamps.begin(), test_timestamps.end());
	report.actual.assign(test_actual.begin(), test_actual.end());

	for (const auto &model : models) {
		ReportRow row;
		row.model = model.name;
		try {
			auto predicted = model.predict(warmup, test_actual);
			if (predicted.size() != test_actual.size()) {
				throw std::runtime_error("produced " + std::to_string(predicted.size()) + " predictions for " +
				                         std::to_string(test_actual.size()) + " test points");
			}
			row.mae = mae(test_actual, predicted);
			row.mape = mape(test_actual, predicted);
			report.forecasts[model.name] = ForecastSeries{report.timestamps, std::move(predicted), report.actual};
		} catch (const std::exception &e) {
			row.mae = std::numeric_limits<double>::quiet_NaN();
			row.mape = std::numeric_limits<double>::quiet_NaN();
			row.error = e.what();
		}
		report.rows.push_back(std::move(row));
	}

	std::stable_sort(report.rows.begin(), report.rows.end(), [](const ReportRow &a, const ReportRow &b) {
		if (a.error.has_value() != b.error.has_value()) {
			return !a.error.has_value();
		}
		if (!a.error && a.mae != b.mae) {
			return a.mae < b.mae;
		}
		return a.model < b.model;
	});
	return report;
}

nlohmann::json to_json(const ComparisonReport &report) {
	auto rows = nlohmann::json::array();
	for (const auto &r : report.rows) {
		nlohmann::json row{{"model", r.model}};
		if (r.error) {
			row["mae"] = nullptr;
			row["mape"] = nullptr;
			row["error"] = *r.error;
		} else {
			row["mae"] = r.mae;
			row["mape"] = r.mape;
		}
		rows.push_back(std::move(row));
	}
	return {{"rows", rows}, {"metadata", report.metadata}, {"test_points", report.actual.size()}};
}

void write_metrics_csv(const ComparisonReport &report, std::ostream &out) {
	out << "model,mae,mape,error\n";
	for (const auto &r : report.rows) {
		out << data::quote_csv_field(r.model) << ',';
		if (r.error) {
			out << ",," << data::quote_csv_field(*r.error);
		} else {
			out << format_double(r.mae) << ',' << format_double(r.mape) << ',';
		}
		out << '\n';
	}
}

void write_predictions_csv(const ComparisonReport &report, std::ostream &out) {
	std::vector<const ForecastSeries *> columns;
	out << "timestamp,actual";
	for (const auto &r : report.rows) {
		auto it = report.forecasts.find(r.model);
		if (it != report.forecasts.end()) {
			out << ',' << data::quote_csv_field(r.model);
			columns.push_back(&it->second);
		}
	}
	out << '\n';
	for (std::size_t i = 0; i < report.actual.size(); ++i) {
		out << data::format_timestamp(report.timestamps[i]) << ',' << format_double(report.actual[i]);
		for (const auto *series : columns) {
			out << ',' << format_double(series->predicted[i]);
		}
		out << '\n';
	}
}

} // namespace gridcast::metrics
