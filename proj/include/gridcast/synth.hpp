#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "gridcast/data.hpp"

namespace gridcast::synth {

/// Hourly load = base + amplitude * sin(2 pi (t + phase) / 24) + trend * t + u_t,
/// where u_t = ar_phi * u_{t-1} + noise_sd * N(0, 1).
/// A second column mimics a day-ahead forecast: the load plus independent
/// noise of `forecast_noise_sd`.
struct SynthConfig {
	std::size_t length = 5000;
	double base = 28000.0;
	double amplitude = 4500.0;
	double phase_hours = 0.0;
	double trend = 0.0; // MWh per hour
	double ar_phi = 0.8;
	double noise_sd = 600.0;
	double forecast_noise_sd = 300.0;
	std::size_t missing = 0; // actual-load cells blanked at random
	std::uint64_t seed = 7;
	std::string start = "2015-01-01T00:00:00Z";
};

SynthConfig synth_config_from_json(const nlohmann::json &j);

inline constexpr const char *kActualColumn = "total load actual";
inline constexpr const char *kForecastColumn = "total load forecast";

data::TimeSeriesTable generate(const SynthConfig &config);

} // namespace gridcast::synth
