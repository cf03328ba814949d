#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridcast/correlation.hpp"
#include "gridcast/lstm.hpp"
#include "gridcast/metrics.hpp"
#include "gridcast/pipeline.hpp"
#include "gridcast/synth.hpp"

namespace gridcast::cli {

inline const std::vector<std::string> kKnownModels = {"ar", "ma", "arma", "arima", "lstm", "persistence"};

struct RunConfig {
	std::filesystem::path data_path;
	bool synthetic_data = false; // "data": "synthetic" generates the series from `synth` in memory
	std::string target = "total load actual";
	std::vector<std::string> columns; // summarize/correlate selection; empty = all
	std::size_t lookback = 25;
	double split_ratio = 0.8;
	std::vector<std::string> models = {"ar", "ma", "arma", "arima", "lstm"};
	pipeline::ModelOrders orders;
	lstm::LstmConfig lstm;
	std::optional<std::filesystem::path> checkpoint; // reuse a trained LSTM in compare
	std::uint64_t seed = 42;
	EvalMode mode = EvalMode::Rolling;
	std::filesystem::path out_dir = "outputs";
	synth::SynthConfig synth;

	void validate() const;
};

/// Reads a JSON config. Relative paths are resolved against the config
/// file's directory. Unknown keys are rejected.
RunConfig load_config(const std::filesystem::path &path);
RunConfig config_from_json(const nlohmann::json &j, const std::filesystem::path &base_dir = {});
nlohmann::json to_json(const RunConfig &config);

// Each command writes its files under config.out_dir and logs progress to `log`.

nlohmann::json cmd_summarize(const RunConfig &config, std::ostream &log);
correlation::CorrelationTable cmd_correlate(const RunConfig &config, std::ostream &log);
lstm::TrainResult cmd_train(const RunConfig &config, std::ostream &log);
metrics::ComparisonReport cmd_compare(const RunConfig &config, std::ostream &log);
std::filesystem::path cmd_synth(const RunConfig &config, std::ostream &log);

/// Runs the command line; returns the process exit code
/// (0 success, 1 usage or I/O error, 2 numerical failure).
int run(int argc, char **argv, std::ostream &out, std::ostream &err);

} // namespace gridcast::cli
