#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "gridcast/cli.hpp"
#include "gridcast/error.hpp"

namespace gridcast::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kCorrelogramLags = 48;

const std::set<std::string> kConfigKeys = {"data",  "target", "columns", "lookback", "split_ratio", "models",
                                           "orders", "lstm",   "checkpoint", "seed", "mode",        "out",
                                           "synth"};

fs::path resolve(const fs::path &p, const fs::path &base) {
	return p.is_relative() && !base.empty() ? base / p : p;
}

baselines::ArimaOrder order_from_json(const nlohmann::json &j) {
	return {j.value("p", 0), j.value("d", 0), j.value("q", 0)};
}

nlohmann::json order_to_json(const baselines::ArimaOrder &o) {
	return {{"p", o.p}, {"d", o.d}, {"q", o.q}};
}

nlohmann::json lstm_to_json(const lstm::LstmConfig &c) {
	return {{"hidden_size", c.hidden_size}, {"input_size", c.input_size}, {"seq_len", c.seq_len},
	        {"dropout_rate", c.dropout_rate}, {"epochs", c.epochs},         {"batch_size", c.batch_size},
	        {"learning_rate", c.learning_rate}};
}

std::vector<std::string> split_list(const std::string &text) {
	std::vector<std::string> out;
	std::stringstream in(text);
	std::string item;
	while (std::getline(in, item, ',')) {
		if (!item.empty()) {
			out.push_back(item);
		}
	}
	return out;
}

void ensure_dir(const fs::path &dir) {
	std::error_code ec;
	fs::create_directories(dir, ec);
	if (ec) {
		throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
	}
}

std::ofstream open_output(const fs::path &path) {
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		throw IoError("cannot write '" + path.string() + "'");
	}
	return out;
}

void write_json(const nlohmann::json &j, const fs::path &path) {
	auto out = open_output(path);
	out << j.dump(2) << '\n';
}

data::TimeSeriesTable select_columns(data::TimeSeriesTable table, const std::vector<std::string> &names) {
	if (names.empty()) {
		return table;
	}
	data::TimeSeriesTable out;
	out.timestamps = std::move(table.timestamps);
	for (const auto &name : names) {
		if (!table.has_column(name)) {
			throw IoError("synthetic data has no column '" + name + "'");
		}
		out.names.push_back(name);
		out.columns.push_back(table.column(name));
	}
	return out;
}

data::TimeSeriesTable load_table(const RunConfig &config, const std::vector<std::string> &columns) {
	if (config.synthetic_data) {
		return select_columns(synth::generate(config.synth), columns);
	}
	if (config.data_path.empty()) {
		throw IoError("no data path configured (set \"data\" in the config or pass --data)");
	}
	return data::load_csv(config.data_path, columns);
}

data::LoadSeries load_series(const RunConfig &config, std::ostream &log) {
	const auto table = load_table(config, {config.target});
	auto series = data::drop_missing(table, config.target);
	log << "loaded " << table.rows() << " rows of '" << config.target << "', " << table.rows() - series.size()
	    << " missing dropped\n";
	return series;
}

lstm::LstmConfig effective_lstm(const RunConfig &config) {
	auto c = config.lstm;
	c.seed = config.seed;
	return c;
}

void write_training_outputs(const RunConfig &config, const lstm::TrainResult &result, const data::ScalerParams &scaler) {
	auto log_out = open_output(config.out_dir / "training_log.csv");
	result.log.write_csv(log_out);
	lstm::save_checkpoint({effective_lstm(config), result.params, result.adam, scaler}, config.out_dir / "checkpoint.json");
}

lstm::TrainResult train_on(const RunConfig &config, const pipeline::PreparedData &prep, std::ostream &log) {
	const auto lc = effective_lstm(config);
	const auto counts = lstm::param_count(lc);
	log << "training lstm: " << counts.recurrent << " recurrent + " << counts.dense << " dense parameters, "
	    << prep.train_windows.size() << " windows, " << lc.epochs << " epochs\n";
	return lstm::train(prep.train_windows, prep.test_windows, lc, [&](std::size_t epoch, double tl, double vl) {
		log << "epoch " << epoch << "/" << lc.epochs << " train_loss " << tl << " val_loss " << vl << '\n';
	});
}

} // namespace

void RunConfig::validate() const {
	if (lookback < 1) {
		throw std::invalid_argument("config: lookback must be >= 1");
	}
	if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
		throw std::invalid_argument("config: split_ratio must lie in (0, 1)");
	}
	if (models.empty()) {
		throw std::invalid_argument("config: no models selected");
	}
	for (const auto &m : models) {
		if (std::find(kKnownModels.begin(), kKnownModels.end(), m) == kKnownModels.end()) {
			throw std::invalid_argument("config: unknown model '" + m + "'");
		}
	}
	lstm.validate();
	if (lstm.window_length() != lookback) {
		throw std::invalid_argument("config: lstm seq_len x input_size = " + std::to_string(lstm.window_length()) +
		                            " must equal lookback " + std::to_string(lookback));
	}
	if (orders.ar < 1 || orders.ma_window < 1) {
		throw std::invalid_argument("config: ar order and ma window must be >= 1");
	}
}

RunConfig config_from_json(const nlohmann::json &j, const fs::path &base_dir) {
	if (!j.is_object()) {
		throw std::invalid_argument("config: top level must be a JSON object");
	}
	for (const auto &[key, value] : j.items()) {
		if (!kConfigKeys.contains(key)) {
			throw std::invalid_argument("config: unknown key '" + key + "'");
		}
	}
	try {
		RunConfig c;
		if (j.contains("data")) {
			const auto data = j.at("data").get<std::string>();
			if (data == "synthetic") {
				c.synthetic_data = true;
			} else {
				c.data_path = resolve(data, base_dir);
			}
		}
		c.target = j.value("target", c.target);
		c.columns = j.value("columns", c.columns);
		c.lookback = j.value("lookback", c.lookback);
		c.split_ratio = j.value("split_ratio", c.split_ratio);
		c.models = j.value("models", c.models);
		if (j.contains("orders")) {
			const auto &o = j.at("orders");
			c.orders.ar = o.value("ar", c.orders.ar);
			c.orders.ma_window = o.value("ma_window", c.orders.ma_window);
			if (o.contains("arma")) {
				c.orders.arma = order_from_json(o.at("arma"));
				c.orders.arma.d = 0;
			}
			if (o.contains("arima")) {
				c.orders.arima = order_from_json(o.at("arima"));
			}
		}
		// The LSTM window follows the lookback unless set explicitly.
		c.lstm.input_size = c.lookback;
		if (j.contains("lstm")) {
			const auto &l = j.at("lstm");
			c.lstm.hidden_size = l.value("hidden_size", c.lstm.hidden_size);
			c.lstm.seq_len = l.value("seq_len", c.lstm.seq_len);
			c.lstm.input_size = l.value("input_size", c.lookback / std::max<std::size_t>(c.lstm.seq_len, 1));
			c.lstm.dropout_rate = l.value("dropout_rate", c.lstm.dropout_rate);
			c.lstm.epochs = l.value("epochs", c.lstm.epochs);
			c.lstm.batch_size = l.value("batch_size", c.lstm.batch_size);
			c.lstm.learning_rate = l.value("learning_rate", c.lstm.learning_rate);
		}
		if (j.contains("checkpoint")) {
			c.checkpoint = resolve(j.at("checkpoint").get<std::string>(), base_dir);
		}
		c.seed = j.value("seed", c.seed);
		if (j.contains("mode")) {
			c.mode = parse_eval_mode(j.at("mode").get<std::string>());
		}
		if (j.contains("out")) {
			c.out_dir = resolve(j.at("out").get<std::string>(), base_dir);
		}
		if (j.contains("synth")) {
			c.synth = synth::synth_config_from_json(j.at("synth"));
		}
		return c;
	} catch (const nlohmann::json::exception &e) {
		throw std::invalid_argument(std::string("config: ") + e.what());
	}
}

RunConfig load_config(const fs::path &path) {
	std::ifstream in(path);
	if (!in) {
		throw IoError("cannot open config '" + path.string() + "'");
	}
	nlohmann::json j;
	try {
		in >> j;
	} catch (const nlohmann::json::exception &e) {
		throw IoError("config '" + path.string() + "' is not valid JSON: " + e.what());
	}
	return config_from_json(j, path.parent_path());
}

nlohmann::json to_json(const RunConfig &c) {
	nlohmann::json j{{"data", c.synthetic_data ? std::string("synthetic") : c.data_path.string()},
	                 {"target", c.target},
	                 {"columns", c.columns},
	                 {"lookback", c.lookback},
	                 {"split_ratio", c.split_ratio},
	                 {"models", c.models},
	                 {"orders",
	                  {{"ar", c.orders.ar},
	                   {"ma_window", c.orders.ma_window},
	                   {"arma", order_to_json(c.orders.arma)},
	                   {"arima", order_to_json(c.orders.arima)}}},
	                 {"lstm", lstm_to_json(c.lstm)},
	                 {"seed", c.seed},
	                 {"mode", std::string(to_string(c.mode))},
	                 {"out", c.out_dir.string()}};
	if (c.checkpoint) {
		j["checkpoint"] = c.checkpoint->string();
	}
	if (c.synthetic_data) {
		const auto &s = c.synth;
		j["synth"] = {{"length", s.length},       {"base", s.base},           {"amplitude", s.amplitude},
		              {"phase_hours", s.phase_hours}, {"trend", s.trend},     {"ar_phi", s.ar_phi},
		              {"noise_sd", s.noise_sd},   {"forecast_noise_sd", s.forecast_noise_sd},
		              {"missing", s.missing},     {"seed", s.seed},           {"start", s.start}};
	}
	return j;
}

nlohmann::json cmd_summarize(const RunConfig &config, std::ostream &log) {
	const auto table = load_table(config, config.columns);
	nlohmann::json columns = nlohmann::json::array();
	for (std::size_t k = 0; k < table.names.size(); ++k) {
		nlohmann::json entry;
		try {
			entry = data::to_json(data::summarize(table.columns[k]));
		} catch (const std::invalid_argument &) {
			entry = {{"valid", 0}, {"missing", table.rows()}, {"mean", nullptr},
			         {"std", nullptr}, {"min", nullptr},        {"max", nullptr}};
			log << "warning: column '" << table.names[k] << "' has no values\n";
		}
		entry["column"] = table.names[k];
		columns.push_back(std::move(entry));
	}
	nlohmann::json summary{{"rows", table.rows()}, {"columns", columns}};
	ensure_dir(config.out_dir);
	write_json(summary, config.out_dir / "summary.json");
	log << "summarized " << table.names.size() << " columns over " << table.rows() << " rows\n";
	return summary;
}

correlation::CorrelationTable cmd_correlate(const RunConfig &config, std::ostream &log) {
	auto columns = config.columns;
	if (!columns.empty() && std::find(columns.begin(), columns.end(), config.target) == columns.end()) {
		columns.push_back(config.target);
	}
	const auto table = load_table(config, columns);
	auto result = correlation::correlation_table(table, config.target);
	if (result.rows.empty()) {
		log << "warning: no feature columns to correlate against '" << config.target << "'\n";
	}
	for (const auto &s : result.skipped) {
		log << "warning: skipped '" << s.feature << "': " << s.reason << '\n';
	}

	ensure_dir(config.out_dir);
	auto csv = open_output(config.out_dir / "correlations.csv");
	correlation::write_csv(result, csv);
	write_json(correlation::to_json(result), config.out_dir / "correlations.json");

	const auto series = data::drop_missing(table, config.target);
	const std::size_t lags = std::min(kCorrelogramLags, series.size() - 1);
	const auto a = correlation::acf(series.values, lags);
	const auto p = correlation::pacf(series.values, lags);
	auto gram = open_output(config.out_dir / "correlogram.csv");
	gram << "lag,acf,pacf\n" << std::setprecision(17);
	for (std::size_t k = 0; k <= lags; ++k) {
		gram << k << ',' << a[k].value << ',' << p[k].value << '\n';
	}
	log << "correlated " << result.rows.size() << " features against '" << config.target << "'\n";
	return result;
}

lstm::TrainResult cmd_train(const RunConfig &config, std::ostream &log) {
	config.validate();
	const auto series = load_series(config, log);
	const auto prep = pipeline::prepare(series, config.lookback, config.split_ratio);
	auto result = train_on(config, prep, log);
	ensure_dir(config.out_dir);
	write_training_outputs(config, result, prep.scaler);
	log << "final train_loss " << result.log.train_loss.back() << " val_loss " << result.log.validation_loss.back()
	    << '\n';
	return result;
}

metrics::ComparisonReport cmd_compare(const RunConfig &config, std::ostream &log) {
	config.validate();
	const auto series = load_series(config, log);
	const auto prep = pipeline::prepare(series, config.lookback, config.split_ratio);
	ensure_dir(config.out_dir);

	std::map<std::string, baselines::ArimaModel> fitted;
	auto sink = [&](const std::string &name, const baselines::ArimaModel &m) { fitted[name] = m; };

	std::vector<metrics::Forecaster> models;
	for (const auto &name : config.models) {
		if (name == "ar") {
			models.push_back(pipeline::make_ar_forecaster(prep, config.orders.ar, config.mode, sink));
		} else if (name == "ma") {
			models.push_back(pipeline::make_moving_average_forecaster(config.orders.ma_window, config.mode));
		} else if (name == "arma") {
			models.push_back(pipeline::make_arima_forecaster("arma", prep, config.orders.arma, config.mode, sink));
		} else if (name == "arima") {
			models.push_back(pipeline::make_arima_forecaster("arima", prep, config.orders.arima, config.mode, sink));
		} else if (name == "persistence") {
			models.push_back(pipeline::make_persistence_forecaster(config.mode));
		} else if (name == "lstm") {
			lstm::LstmParams params;
			lstm::LstmConfig lc = effective_lstm(config);
			data::ScalerParams scaler = prep.scaler;
			if (config.checkpoint) {
				const auto cp = lstm::load_checkpoint(*config.checkpoint);
				if (cp.config.window_length() != config.lookback) {
					throw std::invalid_argument("checkpoint window length " + std::to_string(cp.config.window_length()) +
					                            " does not match lookback " + std::to_string(config.lookback));
				}
				params = cp.params;
				lc = cp.config;
				scaler = cp.scaler.value_or(prep.scaler);
				log << "loaded lstm checkpoint '" << config.checkpoint->string() << "'\n";
			} else {
				const auto result = train_on(config, prep, log);
				write_training_outputs(config, result, prep.scaler);
				params = result.params;
			}
			models.push_back(pipeline::make_lstm_forecaster(params, lc, scaler, config.mode));
		}
	}

	log << "evaluating " << models.size() << " models on " << prep.test.size() << " test points ("
	    << to_string(config.mode) << ")\n";
	auto report = metrics::compare(models, prep.test.timestamps, prep.test.values, prep.train.values);
	report.metadata = {{"config", to_json(config)},
	                   {"train_points", prep.train.size()},
	                   {"test_points", prep.test.size()},
	                   {"scaler", {{"min", prep.scaler.min}, {"max", prep.scaler.max}}}};

	if (!fitted.empty()) {
		ensure_dir(config.out_dir / "models");
		for (const auto &[name, m] : fitted) {
			write_json(baselines::to_json(m), config.out_dir / "models" / (name + ".json"));
		}
	}
	auto metrics_out = open_output(config.out_dir / "metrics.csv");
	metrics::write_metrics_csv(report, metrics_out);
	auto predictions_out = open_output(config.out_dir / "predictions.csv");
	metrics::write_predictions_csv(report, predictions_out);
	write_json(metrics::to_json(report), config.out_dir / "report.json");

	for (const auto &row : report.rows) {
		if (row.error) {
			log << row.model << ": failed: " << *row.error << '\n';
		} else {
			log << row.model << ": mae " << row.mae << " mape " << row.mape << '\n';
		}
	}
	const bool any_ok = std::any_of(report.rows.begin(), report.rows.end(), [](const auto &r) { return !r.error; });
	if (!any_ok) {
		throw NumericalError("every model failed");
	}
	return report;
}

fs::path cmd_synth(const RunConfig &config, std::ostream &log) {
	const auto table = synth::generate(config.synth);
	ensure_dir(config.out_dir);
	const auto path = config.out_dir / "synthetic.csv";
	auto out = open_output(path);
	data::write_csv(table, out);
	log << "wrote " << table.rows() << " synthetic rows to '" << path.string() << "'\n";
	return path;
}

int run(int argc, char **argv, std::ostream &out, std::ostream &err) {
	CLI::App app{"Hourly electricity-demand forecasting"};
	app.require_subcommand(1);

	std::string config_path, data_path, models, mode, out_dir;
	std::optional<std::uint64_t> seed;
	std::optional<std::size_t> epochs;
	auto add_common = [&](CLI::App *sub) {
		sub->add_option("--config", config_path, "JSON run configuration");
		sub->add_option("--data", data_path, "input CSV (overrides the config)");
		sub->add_option("--seed", seed, "random seed");
		sub->add_option("--models", models, "comma-separated subset of ar,ma,arma,arima,lstm,persistence");
		sub->add_option("--mode", mode, "evaluation mode")->check(CLI::IsMember({"rolling", "static"}));
		sub->add_option("--out", out_dir, "output directory");
		sub->add_option("--epochs", epochs, "LSTM training epochs");
	};
	std::map<std::string, CLI::App *> subs;
	for (const auto &[name, help] : std::vector<std::pair<std::string, std::string>>{
	         {"summarize", "summary statistics per column"},
	         {"correlate", "Pearson correlation against the target, plus ACF/PACF"},
	         {"train", "train the LSTM and write a checkpoint"},
	         {"compare", "fit and evaluate the selected models"},
	         {"synth", "write a synthetic hourly load CSV"}}) {
		subs[name] = app.add_subcommand(name, help);
		add_common(subs[name]);
	}

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		const int code = app.exit(e, out, err);
		return code == 0 ? 0 : 1;
	}

	try {
		RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
		if (!data_path.empty()) {
			config.data_path = data_path;
			config.synthetic_data = false;
		}
		if (seed) {
			config.seed = *seed;
		}
		if (!models.empty()) {
			config.models = split_list(models);
		}
		if (!mode.empty()) {
			config.mode = parse_eval_mode(mode);
		}
		if (!out_dir.empty()) {
			config.out_dir = out_dir;
		}
		if (epochs) {
			config.lstm.epochs = *epochs;
		}
		config.validate();

		if (subs["summarize"]->parsed()) {
			out << cmd_summarize(config, err).dump(2) << '\n';
		} else if (subs["correlate"]->parsed()) {
			out << correlation::to_json(cmd_correlate(config, err)).dump(2) << '\n';
		} else if (subs["train"]->parsed()) {
			cmd_train(config, err);
			out << (config.out_dir / "checkpoint.json").string() << '\n';
		} else if (subs["compare"]->parsed()) {
			out << metrics::to_json(cmd_compare(config, err)).at("rows").dump(2) << '\n';
		} else if (subs["synth"]->parsed()) {
			out << cmd_synth(config, err).string() << '\n';
		}
		return 0;
	} catch (const NumericalError &e) {
		err << "error: " << e.what() << '\n';
		return 2;
	} catch (const std::exception &e) {
		err << "error: " << e.what() << '\n';
		return 1;
	}
}

} // namespace gridcast::cli
