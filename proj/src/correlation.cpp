#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gridcast/correlation.hpp"
#include "gridcast/error.hpp"

namespace gridcast::correlation {

namespace {

double pearson_complete(std::span<const double> x, std::span<const double> y) {
	const auto n = static_cast<double>(x.size());
	double mx = 0.0, my = 0.0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		mx += x[i];
		my += y[i];
	}
	mx /= n;
	my /= n;
	double sxy = 0.0, sxx = 0.0, syy = 0.0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		const double dx = x[i] - mx;
		const double dy = y[i] - my;
		sxy += dx * dy;
		sxx += dx * dx;
		syy += dy * dy;
	}
	if (!(sxx > 0.0) || !(syy > 0.0)) {
		throw NumericalError("pearson: zero variance");
	}
	return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

} // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
	if (x.size() != y.size()) {
		throw std::invalid_argument("pearson: length mismatch");
	}
	if (x.size() < 2) {
		throw std::invalid_argument("pearson: need at least 2 pairs");
	}
	return pearson_complete(x, y);
}

double pearson(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y) {
	if (x.size() != y.size()) {
		throw std::invalid_argument("pearson: length mismatch");
	}
	std::vector<double> cx, cy;
	cx.reserve(x.size());
	cy.reserve(y.size());
	for (std::size_t i = 0; i < x.size(); ++i) {
		if (x[i] && y[i]) {
			cx.push_back(*x[i]);
			cy.push_back(*y[i]);
		}
	}
	if (cx.size() < 2) {
		throw std::invalid_argument("pearson: fewer than 2 complete pairs");
	}
	return pearson_complete(cx, cy);
}

CorrelationTable correlation_table(const data::TimeSeriesTable &table, std::string_view target) {
	const auto &target_column = table.column(target);
	CorrelationTable out;
	out.target = std::string(target);
	for (std::size_t k = 0; k < table.names.size(); ++k) {
		if (table.names[k] == target) {
			continue;
		}
		try {
			out.rows.push_back({table.names[k], pearson(table.columns[k], target_column)});
		} catch (const std::exception &e) {
			out.skipped.push_back({table.names[k], e.what()});
		}
	}
	std::stable_sort(out.rows.begin(), out.rows.end(),
	                 [](const CorrelationRow &a, const CorrelationRow &b) { return a.coefficient > b.coefficient; });
	return out;
}

nlohmann::json to_json(const CorrelationTable &table) {
	auto rows = nlohmann::json::array();
	for (const auto &row : table.rows) {
		rows.push_back({{"feature", row.feature}, {"coefficient", row.coefficient}});
	}
	return rows;
}

void write_csv(const CorrelationTable &table, std::ostream &out) {
	out << "feature,coefficient\n";
	for (const auto &row : table.rows) {
		out << data::quote_csv_field(row.feature) << ',' << nlohmann::json(row.coefficient).dump() << '\n';
	}
}

std::vector<CorrelogramPoint> acf(std::span<const double> series, std::size_t max_lag) {
	const std::size_t n = series.size();
	if (max_lag >= n) {
		throw std::invalid_argument("acf: max_lag " + std::to_string(max_lag) + " must be below series length " +
		                            std::to_string(n));
	}
	double mean = 0.0;
	for (double v : series) {
		mean += v;
	}
	mean /= static_cast<double>(n);
	std::vector<double> dev(n);
	double c0 = 0.0;
	for (std::size_t t = 0; t < n; ++t) {
		dev[t] = series[t] - mean;
		c0 += dev[t] * dev[t];
	}
	if (!(c0 > 0.0)) {
		throw NumericalError("acf: constant series");
	}
	std::vector<CorrelogramPoint> out;
	out.reserve(max_lag + 1);
	out.push_back({0, 1.0});
	for (std::size_t k = 1; k <= max_lag; ++k) {
		double ck = 0.0;
		for (std::size_t t = 0; t + k < n; ++t) {
			ck += dev[t] * dev[t + k];
		}
		out.push_back({k, ck / c0});
	}
	return out;
}

std::vector<CorrelogramPoint> pacf(std::span<const double> series, std::size_t max_lag) {
	const auto rho = acf(series, max_lag);
	std::vector<CorrelogramPoint> out;
	out.reserve(max_lag + 1);
	out.push_back({0, 1.0});
	if (max_lag == 0) {
		return out;
	}

	// phi holds the AR(k-1) coefficients phi_{k-1,1..k-1}.
	std::vector<double> phi, next;
	double variance = 1.0; // prediction error variance relative to lag-0
	for (std::size_t k = 1; k <= max_lag; ++k) {
		double num = rho[k].value;
		for (std::size_t j = 1; j < k; ++j) {
			num -= phi[j - 1] * rho[k - j].value;
		}
		if (!(variance > 0.0)) {
			throw NumericalError("pacf: Durbin-Levinson breakdown at lag " + std::to_string(k));
		}
		const double reflection = num / variance;
		next.assign(k, 0.0);
		for (std::size_t j = 1; j < k; ++j) {
			next[j - 1] = phi[j - 1] - reflection * phi[k - j - 1];
		}
		next[k - 1] = reflection;
		phi.swap(next);
		variance *= 1.0 - reflection * reflection;
		out.push_back({k, reflection});
	}
	return out;
}

} // namespace gridcast::correlation
