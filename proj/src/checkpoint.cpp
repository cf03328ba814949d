#include <fstream>
#include <string>

#include "gridcast/error.hpp"
#include "gridcast/lstm.hpp"

namespace gridcast::lstm {

namespace {

nlohmann::json config_to_json(const LstmConfig &c) {
	return {{"hidden_size", c.hidden_size}, {"input_size", c.input_size}, {"seq_len", c.seq_len},
	        {"dropout_rate", c.dropout_rate}, {"epochs", c.epochs},         {"batch_size", c.batch_size},
	        {"learning_rate", c.learning_rate}, {"seed", c.seed}};
}

LstmConfig config_from_json(const nlohmann::json &j) {
	LstmConfig c;
	c.hidden_size = j.at("hidden_size").get<std::size_t>();
	c.input_size = j.at("input_size").get<std::size_t>();
	c.seq_len = j.at("seq_len").get<std::size_t>();
	c.dropout_rate = j.at("dropout_rate").get<double>();
	c.epochs = j.at("epochs").get<std::size_t>();
	c.batch_size = j.at("batch_size").get<std::size_t>();
	c.learning_rate = j.at("learning_rate").get<double>();
	c.seed = j.at("seed").get<std::uint64_t>();
	c.validate();
	return c;
}

template <typename Block>
std::vector<double> to_vector(const Block &block) {
	return std::vector<double>(block.data(), block.data() + block.size());
}

template <typename Block>
void fill(Block block, const nlohmann::json &values, const char *name) {
	const auto v = values.get<std::vector<double>>();
	if (static_cast<Eigen::Index>(v.size()) != block.size()) {
		throw IoError(std::string("checkpoint: '") + name + "' has " + std::to_string(v.size()) + " values, expected " +
		              std::to_string(block.size()));
	}
	std::copy(v.begin(), v.end(), block.data());
}

} // namespace

nlohmann::json to_json(const Checkpoint &checkpoint) {
	const auto &p = checkpoint.params;
	nlohmann::json j{{"schema_version", kCheckpointSchemaVersion},
	                 {"config", config_to_json(checkpoint.config)},
	                 {"params",
	                  {{"gate_order", {"i", "f", "g", "o"}},
	                   {"gate_weights", to_vector(p.gate_weights())},
	                   {"gate_biases", to_vector(p.gate_biases())},
	                   {"dense_weights", to_vector(p.dense_weights())},
	                   {"dense_bias", p.dense_bias()}}}};
	if (checkpoint.adam) {
		const auto &a = *checkpoint.adam;
		j["adam"] = {{"step", a.step}, {"beta1", a.beta1}, {"beta2", a.beta2},
		             {"epsilon", a.epsilon}, {"m", a.m}, {"v", a.v}};
	}
	if (checkpoint.scaler) {
		j["scaler"] = {{"min", checkpoint.scaler->min}, {"max", checkpoint.scaler->max}};
	}
	return j;
}

Checkpoint checkpoint_from_json(const nlohmann::json &j) {
	try {
		if (j.at("schema_version").get<int>() != kCheckpointSchemaVersion) {
			throw IoError("checkpoint: unsupported schema_version " + j.at("schema_version").dump());
		}
		Checkpoint cp;
		cp.config = config_from_json(j.at("config"));
		cp.params = LstmParams(cp.config.hidden_size, cp.config.input_size);
		const auto &p = j.at("params");
		fill(cp.params.gate_weights(), p.at("gate_weights"), "gate_weights");
		fill(cp.params.gate_biases(), p.at("gate_biases"), "gate_biases");
		fill(cp.params.dense_weights(), p.at("dense_weights"), "dense_weights");
		cp.params.dense_bias() = p.at("dense_bias").get<double>();

		if (j.contains("adam")) {
			const auto &a = j.at("adam");
			AdamState state;
			state.step = a.at("step").get<std::uint64_t>();
			state.beta1 = a.at("beta1").get<double>();
			state.beta2 = a.at("beta2").get<double>();
			state.epsilon = a.at("epsilon").get<double>();
			state.m = a.at("m").get<std::vector<double>>();
			state.v = a.at("v").get<std::vector<double>>();
			if (state.m.size() != cp.params.size() || state.v.size() != cp.params.size()) {
				throw IoError("checkpoint: adam state size does not match the parameters");
			}
			cp.adam = std::move(state);
		}
		if (j.contains("scaler")) {
			cp.scaler = data::ScalerParams{j.at("scaler").at("min").get<double>(), j.at("scaler").at("max").get<double>()};
		}
		return cp;
	} catch (const nlohmann::json::exception &e) {
		throw IoError(std::string("checkpoint: ") + e.what());
	} catch (const std::invalid_argument &e) {
		throw IoError(std::string("checkpoint: ") + e.what());
	}
}

void save_checkpoint(const Checkpoint &checkpoint, const std::filesystem::path &path) {
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		throw IoError("cannot write '" + path.string() + "'");
	}
	out << to_json(checkpoint).dump(1) << '\n';
	if (!out) {
		throw IoError("failed writing '" + path.string() + "'");
	}
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw IoError("cannot open checkpoint '" + path.string() + "'");
	}
	nlohmann::json j;
	try {
		in >> j;
	} catch (const nlohmann::json::exception &e) {
		throw IoError("checkpoint '" + path.string() + "' is not valid JSON: " + e.what());
	}
	return checkpoint_from_json(j);
}

} // namespace gridcast::lstm
