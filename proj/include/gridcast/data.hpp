#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace gridcast::data {

using TimePoint = std::chrono::sys_seconds;
using OptionalColumn = std::vector<std::optional<double>>;

/// Hourly table read from CSV. Timestamps are UTC and strictly increasing;
/// every column has one entry per timestamp.
struct TimeSeriesTable {
	std::vector<TimePoint> timestamps;
	std::vector<std::string> names;
	std::vector<OptionalColumn> columns;

	std::size_t rows() const { return timestamps.size(); }
	bool has_column(std::string_view name) const;
	const OptionalColumn &column(std::string_view name) const;
};

/// Gap-free load series in MWh.
struct LoadSeries {
	std::vector<TimePoint> timestamps;
	std::vector<double> values;

	std::size_t size() const { return values.size(); }
};

struct SummaryStats {
	std::size_t valid_count = 0;
	std::size_t missing_count = 0;
	double mean = 0.0;
	double std_dev = 0.0; // sample (n - 1) convention
	double min = 0.0;
	double max = 0.0;
};

struct ScalerParams {
	double min = 0.0;
	double max = 1.0;
};

/// Sliding-window supervised pairs. Row i of `inputs` holds the `lookback`
/// values immediately preceding `targets[i]`.
struct WindowedDataset {
	std::size_t lookback = 0;
	std::vector<double> inputs; // row-major, size() x lookback
	std::vector<double> targets;

	std::size_t size() const { return targets.size(); }
	std::span<const double> input(std::size_t i) const {
		return std::span<const double>(inputs).subspan(i * lookback, lookback);
	}
};

// Timestamps

/// Parses ISO-8601 style instants ("2015-01-01 00:00:00+01:00",
/// "2015-01-01T00:00:00Z", "2015-01-01 00:00", "2015-01-01") to UTC.
/// A missing offset is read as UTC.
TimePoint parse_timestamp(std::string_view text);
std::string format_timestamp(TimePoint t);

// CSV

/// RFC-4180 reader: comma separated, double-quote quoting with "" escapes,
/// quoted fields may span lines. CRLF and LF line endings are accepted.
std::vector<std::vector<std::string>> parse_csv(std::istream &in);
std::string quote_csv_field(std::string_view field);

/// Reads the timestamp column plus the requested columns. An empty request
/// selects every non-timestamp column. The timestamp column is the one named
/// time/timestamp/datetime/date (case-insensitive), else the first column.
TimeSeriesTable load_csv(const std::filesystem::path &path, std::span<const std::string> column_names = {});
void write_csv(const TimeSeriesTable &table, std::ostream &out);

// Exploration and preprocessing

SummaryStats summarize(std::span<const std::optional<double>> column);
nlohmann::json to_json(const SummaryStats &stats);

LoadSeries drop_missing(const TimeSeriesTable &table, std::string_view column);

ScalerParams fit_scaler(std::span<const double> train_values);
double scale(double value, const ScalerParams &params);
double inverse_scale(double scaled, const ScalerParams &params);
std::vector<double> scale(std::span<const double> values, const ScalerParams &params);
std::vector<double> inverse_scale(std::span<const double> scaled, const ScalerParams &params);

/// Chronological split: train gets the first floor(ratio * n) points.
std::pair<LoadSeries, LoadSeries> train_test_split(const LoadSeries &series, double ratio);

WindowedDataset make_windows(std::span<const double> values, std::size_t lookback);

} // namespace gridcast::data
