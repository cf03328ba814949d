#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridcast/forecast.hpp"

namespace gridcast::metrics {

/// Mean absolute error, in the units of the inputs.
double mae(std::span<const double> actual, std::span<const double> predicted);

/// Mean absolute percentage error in percent. Any zero actual value is an
/// error naming its index.
double mape(std::span<const double> actual, std::span<const double> predicted);

/// A fitted model reduced to "given the warmup history and the test region,
/// return one prediction per test point" (MWh).
struct Forecaster {
	std::string name;
	std::function<std::vector<double>(std::span<const double> warmup, std::span<const double> test)> predict;
};

struct ReportRow {
	std::string model;
	double mae = 0.0;
	double mape = 0.0;
	std::optional<std::string> error; // set when the model failed; metrics are NaN
};

struct ComparisonReport {
	std::vector<ReportRow> rows; // by MAE ascending, ties by name, failures last
	std::map<std::string, ForecastSeries> forecasts;
	std::vector<data::TimePoint> timestamps;
	std::vector<double> actual;
	nlohmann::json metadata = nlohmann::json::object();

	const ReportRow *find(std::string_view model) const;
};

ComparisonReport compare(const std::vector<Forecaster> &models, std::span<const data::TimePoint> test_timestamps,
                         std::span<const double> test_actual, std::span<const double> warmup);

nlohmann::json to_json(const ComparisonReport &report);
void write_metrics_csv(const ComparisonReport &report, std::ostream &out);
void write_predictions_csv(const ComparisonReport &report, std::ostream &out);

} // namespace gridcast::metrics
