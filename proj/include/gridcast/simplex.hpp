#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gridcast::optim {

struct SimplexOptions {
	double relative_tolerance = 1e-8;
	std::size_t max_iterations = 500;
	// Initial edge length is step_fraction * |x_i|, or zero_step when x_i == 0.
	double step_fraction = 0.1;
	double zero_step = 0.025;
};

struct SimplexResult {
	std::vector<double> x;
	double value = 0.0;
	std::size_t iterations = 0;
	bool converged = false;
	std::vector<double> best_trace; // best vertex value after each iteration
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead minimization. Non-finite objective values are treated as +inf.
/// Terminates when (f_worst - f_best) <= tol * max(|f_best|, tiny) for a
/// freshly restarted simplex, or after max_iterations.
SimplexResult minimize_simplex(const Objective &objective, std::span<const double> start,
                               const SimplexOptions &options = {});

} // namespace gridcast::optim
