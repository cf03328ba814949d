#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gridcast/data.hpp"

namespace gridcast::correlation {

struct CorrelationRow {
	std::string feature;
	double coefficient = 0.0;
};

// A column that could not be correlated against the target.
struct SkippedFeature {
	std::string feature;
	std::string reason;
};

struct CorrelationTable {
	std::string target;
	std::vector<CorrelationRow> rows; // sorted by coefficient, descending
	std::vector<SkippedFeature> skipped;
};

struct CorrelogramPoint {
	std::size_t lag = 0;
	double value = 0.0;
};

double pearson(std::span<const double> x, std::span<const double> y);

/// Pairwise deletion: rows where either side is missing are dropped first.
double pearson(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y);

/// Correlates every other column against `target`. Columns that fail
/// (constant, too few complete pairs) are reported in `skipped`.
CorrelationTable correlation_table(const data::TimeSeriesTable &table, std::string_view target);

nlohmann::json to_json(const CorrelationTable &table);
void write_csv(const CorrelationTable &table, std::ostream &out);

/// Biased sample autocorrelation for lags 0..max_lag (full-sample
/// denominator), so the sequence is positive semi-definite.
std::vector<CorrelogramPoint> acf(std::span<const double> series, std::size_t max_lag);

/// Partial autocorrelation for lags 0..max_lag via the Durbin-Levinson
/// recursion on the biased ACF. Lag 0 is reported as 1.
std::vector<CorrelogramPoint> pacf(std::span<const double> series, std::size_t max_lag);

} // namespace gridcast::correlation
