#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gridcast {

/// Seeded generator with platform-independent derived draws.
///
/// The standard distributions are implementation-defined, so every draw
/// used for initialization, shuffling and dropout goes through the raw
/// 64-bit engine output instead.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : engine_(seed) {}

	std::uint64_t next() { return engine_(); }

	// Uniform on [0, 1) with 53 random bits.
	double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

	// Uniform integer on [0, bound).
	std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

	// Standard normal via Box-Muller; caches the second variate.
	double normal() {
		if (has_spare_) {
			has_spare_ = false;
			return spare_;
		}
		double u1 = uniform();
		while (u1 <= 0.0) {
			u1 = uniform();
		}
		const double u2 = uniform();
		const double radius = std::sqrt(-2.0 * std::log(u1));
		const double angle = 2.0 * M_PI * u2;
		spare_ = radius * std::sin(angle);
		has_spare_ = true;
		return radius * std::cos(angle);
	}

private:
	std::mt19937_64 engine_;
	double spare_ = 0.0;
	bool has_spare_ = false;
};

} // namespace gridcast
