#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gridcast/simplex.hpp"

namespace gridcast::optim {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

double safe_eval(const Objective &f, std::span<const double> x) {
	const double v = f(x);
	return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

bool within_tolerance(double best, double worst, double tol) {
	if (!std::isfinite(worst)) {
		return false;
	}
	return worst - best <= tol * std::max(std::abs(best), std::numeric_limits<double>::min());
}

} // namespace

SimplexResult minimize_simplex(const Objective &objective, std::span<const double> start,
                               const SimplexOptions &options) {
	const std::size_t n = start.size();
	if (n == 0) {
		throw std::invalid_argument("minimize_simplex: empty start point");
	}

	std::vector<std::vector<double>> vertex(n + 1, std::vector<double>(start.begin(), start.end()));
	std::vector<double> value(n + 1);

	auto build_around = [&](const std::vector<double> &base, double base_value) {
		vertex[0] = base;
		value[0] = base_value;
		for (std::size_t i = 0; i < n; ++i) {
			vertex[i + 1] = base;
			const double step = base[i] != 0.0 ? options.step_fraction * std::abs(base[i]) : options.zero_step;
			vertex[i + 1][i] += step;
			value[i + 1] = safe_eval(objective, vertex[i + 1]);
		}
	};

	build_around(vertex[0], safe_eval(objective, vertex[0]));

	SimplexResult result;
	std::vector<std::size_t> order(n + 1);
	std::vector<double> centroid(n), trial(n), second(n);
	bool restarted = false;
	double value_at_restart = std::numeric_limits<double>::infinity();

	auto sort_vertices = [&] {
		std::iota(order.begin(), order.end(), 0);
		std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
	};

	while (result.iterations < options.max_iterations) {
		sort_vertices();
		const std::size_t best = order.front();
		const std::size_t worst = order.back();
		const std::size_t next_worst = order[n - 1];

		if (within_tolerance(value[best], value[worst], options.relative_tolerance)) {
			// A collapsed simplex can sit off the minimum; confirm with one
			// fresh simplex before declaring convergence.
			if (restarted && within_tolerance(value[best], value_at_restart, options.relative_tolerance)) {
				result.converged = true;
				break;
			}
			restarted = true;
			value_at_restart = value[best];
			const auto base = vertex[best];
			build_around(base, value[best]);
			continue;
		}

		std::fill(centroid.begin(), centroid.end(), 0.0);
		for (std::size_t k = 0; k < n; ++k) {
			const auto &v = vertex[order[k]];
			for (std::size_t i = 0; i < n; ++i) {
				centroid[i] += v[i];
			}
		}
		for (auto &c : centroid) {
			c /= static_cast<double>(n);
		}

		auto point_along = [&](double coef, std::vector<double> &out) {
			for (std::size_t i = 0; i < n; ++i) {
				out[i] = centroid[i] + coef * (vertex[worst][i] - centroid[i]);
			}
			return safe_eval(objective, out);
		};

		const double reflected = point_along(-kReflect, trial);
		if (reflected < value[best]) {
			const double expanded = point_along(-kReflect * kExpand, second);
			if (expanded < reflected) {
				vertex[worst] = second;
				value[worst] = expanded;
			} else {
				vertex[worst] = trial;
				value[worst] = reflected;
			}
		} else if (reflected < value[next_worst]) {
			vertex[worst] = trial;
			value[worst] = reflected;
		} else {
			bool accepted = false;
			if (reflected < value[worst]) {
				const double outside = point_along(-kReflect * kContract, second);
				if (outside <= reflected) {
					vertex[worst] = second;
					value[worst] = outside;
					accepted = true;
				}
			} else {
				const double inside = point_along(kContract, second);
				if (inside < value[worst]) {
					vertex[worst] = second;
					value[worst] = inside;
					accepted = true;
				}
			}
			if (!accepted) {
				const auto anchor = vertex[best];
				for (std::size_t k = 0; k <= n; ++k) {
					if (k == best) {
						continue;
					}
					for (std::size_t i = 0; i < n; ++i) {
						vertex[k][i] = anchor[i] + kShrink * (vertex[k][i] - anchor[i]);
					}
					value[k] = safe_eval(objective, vertex[k]);
				}
			}
		}

		++result.iterations;
		result.best_trace.push_back(*std::min_element(value.begin(), value.end()));
	}

	sort_vertices();
	result.x = vertex[order.front()];
	result.value = value[order.front()];
	return result;
}

} // namespace gridcast::optim
