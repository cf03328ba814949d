#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gridcast/rng.hpp"
#include "gridcast/synth.hpp"

namespace gridcast::synth {

SynthConfig synth_config_from_json(const nlohmann::json &j) {
	SynthConfig c;
	c.length = j.value("length", c.length);
	c.base = j.value("base", c.base);
	c.amplitude = j.value("amplitude", c.amplitude);
	c.phase_hours = j.value("phase_hours", c.phase_hours);
	c.trend = j.value("trend", c.trend);
	c.ar_phi = j.value("ar_phi", c.ar_phi);
	c.noise_sd = j.value("noise_sd", c.noise_sd);
	c.forecast_noise_sd = j.value("forecast_noise_sd", c.forecast_noise_sd);
	c.missing = j.value("missing", c.missing);
	c.seed = j.value("seed", c.seed);
	c.start = j.value("start", c.start);
	return c;
}

data::TimeSeriesTable generate(const SynthConfig &config) {
	if (config.length < 2) {
		throw std::invalid_argument("synth: length must be >= 2");
	}
	if (config.missing > config.length) {
		throw std::invalid_argument("synth: more missing cells than rows");
	}
	if (!(std::abs(config.ar_phi) < 1.0) || config.noise_sd < 0.0 || config.forecast_noise_sd < 0.0) {
		throw std::invalid_argument("synth: need |ar_phi| < 1 and non-negative noise");
	}
	const auto start = data::parse_timestamp(config.start);
	Rng rng(config.seed);

	data::TimeSeriesTable table;
	table.names = {kActualColumn, kForecastColumn};
	table.columns.assign(2, {});
	table.timestamps.reserve(config.length);

	// Start the noise from its stationary distribution.
	double u = config.noise_sd / std::sqrt(1.0 - config.ar_phi * config.ar_phi) * rng.normal();
	for (std::size_t t = 0; t < config.length; ++t) {
		if (t > 0) {
			u = config.ar_phi * u + config.noise_sd * rng.normal();
		}
		const double hour = static_cast<double>(t);
		const double load = config.base + config.amplitude * std::sin(2.0 * M_PI * (hour + config.phase_hours) / 24.0) +
		                    config.trend * hour + u;
		table.timestamps.push_back(start + std::chrono::hours(t));
		table.columns[0].push_back(load);
		table.columns[1].push_back(load + config.forecast_noise_sd * rng.normal());
	}

	std::vector<std::size_t> rows(config.length);
	std::iota(rows.begin(), rows.end(), 0);
	for (std::size_t k = 0; k < config.missing; ++k) {
		std::swap(rows[k], rows[k + rng.below(config.length - k)]);
		table.columns[0][rows[k]].reset();
	}
	return table;
}

} // namespace gridcast::synth
