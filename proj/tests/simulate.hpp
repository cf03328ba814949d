#pragma once

// Test-only process simulators. Independent of the library's RNG and filters.

#include <cstdint>
#include <random>
#include <vector>

namespace gridcast::testing {

// x_t = c + sum phi_i x_{t-i} + sum theta_j e_{t-j} + e_t, after a burn-in.
inline std::vector<double> simulate_arma(const std::vector<double> &phi, const std::vector<double> &theta,
                                         std::size_t n, std::uint64_t seed, double sd = 1.0, double c = 0.0) {
	std::mt19937_64 gen(seed);
	std::normal_distribution<double> noise(0.0, sd);
	const std::size_t burn = 500;
	std::vector<double> x(n + burn, 0.0), e(n + burn, 0.0);
	for (std::size_t t = 0; t < n + burn; ++t) {
		e[t] = noise(gen);
		double v = c + e[t];
		for (std::size_t i = 0; i < phi.size(); ++i) {
			if (t > i) {
				v += phi[i] * x[t - i - 1];
			}
		}
		for (std::size_t j = 0; j < theta.size(); ++j) {
			if (t > j) {
				v += theta[j] * e[t - j - 1];
			}
		}
		x[t] = v;
	}
	return {x.begin() + static_cast<long>(burn), x.end()};
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
	return simulate_arma({}, {}, n, seed);
}

} // namespace gridcast::testing
