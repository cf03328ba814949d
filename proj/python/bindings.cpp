#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gridcast/baselines.hpp"
#include "gridcast/cli.hpp"
#include "gridcast/correlation.hpp"
#include "gridcast/error.hpp"
#include "gridcast/forecast.hpp"
#include "gridcast/lstm.hpp"
#include "gridcast/metrics.hpp"
#include "gridcast/synth.hpp"

namespace py = pybind11;
using namespace gridcast;

namespace {

using Rows = std::vector<std::vector<double>>;

data::WindowedDataset to_dataset(const Rows &inputs, const std::vector<double> &targets) {
	if (inputs.size() != targets.size()) {
		throw std::invalid_argument("inputs and targets differ in length");
	}
	data::WindowedDataset ds;
	ds.lookback = inputs.empty() ? 0 : inputs.front().size();
	for (const auto &row : inputs) {
		if (row.size() != ds.lookback) {
			throw std::invalid_argument("every input window must have the same length");
		}
		ds.inputs.insert(ds.inputs.end(), row.begin(), row.end());
	}
	ds.targets = targets;
	return ds;
}

lstm::LstmParams to_params(const std::vector<double> &values, const lstm::LstmConfig &config) {
	lstm::LstmParams params(config.hidden_size, config.input_size);
	if (values.size() != params.size()) {
		throw std::invalid_argument("expected " + std::to_string(params.size()) + " parameter values, got " +
		                            std::to_string(values.size()));
	}
	std::copy(values.begin(), values.end(), params.values().begin());
	return params;
}

std::vector<double> values_of(const std::vector<correlation::CorrelogramPoint> &points) {
	std::vector<double> out;
	for (const auto &p : points) {
		out.push_back(p.value);
	}
	return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
	m.doc() = "Hourly electricity-demand forecasting core";

	py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
	py::register_exception_translator([](std::exception_ptr p) {
		try {
			if (p) {
				std::rethrow_exception(p);
			}
		} catch (const IoError &e) {
			PyErr_SetString(PyExc_OSError, e.what());
		}
	});

	py::class_<baselines::ArimaModel>(m, "ArimaModel")
	    .def_property_readonly("p", [](const baselines::ArimaModel &a) { return a.order.p; })
	    .def_property_readonly("d", [](const baselines::ArimaModel &a) { return a.order.d; })
	    .def_property_readonly("q", [](const baselines::ArimaModel &a) { return a.order.q; })
	    .def_readonly("phi", &baselines::ArimaModel::phi)
	    .def_readonly("theta", &baselines::ArimaModel::theta)
	    .def_readonly("intercept", &baselines::ArimaModel::intercept)
	    .def_readonly("sigma2", &baselines::ArimaModel::sigma2)
	    .def_readonly("stationary", &baselines::ArimaModel::stationary)
	    .def_readonly("converged", &baselines::ArimaModel::converged)
	    .def("forecast_one_step",
	         [](const baselines::ArimaModel &a, const std::vector<double> &history) {
		         return baselines::forecast_one_step(a, history);
	         })
	    .def("to_json", [](const baselines::ArimaModel &a) { return baselines::to_json(a).dump(); })
	    .def_static("from_json",
	                [](const std::string &text) { return baselines::model_from_json(nlohmann::json::parse(text)); })
	    .def("__repr__", [](const baselines::ArimaModel &a) {
		    std::ostringstream s;
		    s << "ArimaModel(p=" << a.order.p << ", d=" << a.order.d << ", q=" << a.order.q << ")";
		    return s.str();
	    });

	m.def("fit_ar", [](const std::vector<double> &x, int p) { return baselines::fit_ar(x, p); }, py::arg("series"),
	      py::arg("p"));
	m.def("fit_arma", [](const std::vector<double> &x, int p, int q) { return baselines::fit_arma(x, p, q); },
	      py::arg("series"), py::arg("p"), py::arg("q"));
	m.def("fit_arima",
	      [](const std::vector<double> &x, int p, int d, int q) { return baselines::fit_arima(x, p, d, q); },
	      py::arg("series"), py::arg("p"), py::arg("d"), py::arg("q"));
	m.def(
	    "rolling_forecast",
	    [](const baselines::ArimaModel &a, const std::vector<double> &test, const std::vector<double> &warmup,
	       const std::string &mode) { return baselines::rolling_forecast(a, test, warmup, parse_eval_mode(mode)).predicted; },
	    py::arg("model"), py::arg("test"), py::arg("warmup"), py::arg("mode") = "rolling");

	m.def("mae", [](const std::vector<double> &a, const std::vector<double> &p) { return metrics::mae(a, p); },
	      py::arg("actual"), py::arg("predicted"));
	m.def("mape", [](const std::vector<double> &a, const std::vector<double> &p) { return metrics::mape(a, p); },
	      py::arg("actual"), py::arg("predicted"));
	m.def("pearson",
	      [](const std::vector<std::optional<double>> &x, const std::vector<std::optional<double>> &y) {
		      return correlation::pearson(x, y);
	      },
	      py::arg("x"), py::arg("y"), "Pearson correlation; None entries are dropped pairwise.");
	m.def("acf", [](const std::vector<double> &x, std::size_t lags) { return values_of(correlation::acf(x, lags)); },
	      py::arg("series"), py::arg("max_lag"));
	m.def("pacf", [](const std::vector<double> &x, std::size_t lags) { return values_of(correlation::pacf(x, lags)); },
	      py::arg("series"), py::arg("max_lag"));

	m.def("fit_scaler",
	      [](const std::vector<double> &x) {
		      const auto s = data::fit_scaler(x);
		      return std::pair{s.min, s.max};
	      },
	      py::arg("train_values"));
	m.def("make_windows",
	      [](const std::vector<double> &x, std::size_t lookback) {
		      const auto ds = data::make_windows(x, lookback);
		      Rows inputs;
		      for (std::size_t i = 0; i < ds.size(); ++i) {
			      const auto w = ds.input(i);
			      inputs.emplace_back(w.begin(), w.end());
		      }
		      return std::pair{inputs, ds.targets};
	      },
	      py::arg("values"), py::arg("lookback"));

	py::class_<lstm::LstmConfig>(m, "LstmConfig")
	    .def(py::init<>())
	    .def_readwrite("hidden_size", &lstm::LstmConfig::hidden_size)
	    .def_readwrite("input_size", &lstm::LstmConfig::input_size)
	    .def_readwrite("seq_len", &lstm::LstmConfig::seq_len)
	    .def_readwrite("dropout_rate", &lstm::LstmConfig::dropout_rate)
	    .def_readwrite("epochs", &lstm::LstmConfig::epochs)
	    .def_readwrite("batch_size", &lstm::LstmConfig::batch_size)
	    .def_readwrite("learning_rate", &lstm::LstmConfig::learning_rate)
	    .def_readwrite("seed", &lstm::LstmConfig::seed);

	m.def(
	    "param_count",
	    [](std::size_t hidden, std::size_t input) {
		    lstm::LstmConfig c;
		    c.hidden_size = hidden;
		    c.input_size = input;
		    const auto n = lstm::param_count(c);
		    return std::pair{n.recurrent, n.dense};
	    },
	    py::arg("hidden_size") = 100, py::arg("input_size") = 25);
	m.def(
	    "train_lstm",
	    [](const Rows &inputs, const std::vector<double> &targets, const lstm::LstmConfig &config,
	       std::optional<std::pair<Rows, std::vector<double>>> validation) {
		    const auto train = to_dataset(inputs, targets);
		    lstm::TrainResult r;
		    {
			    py::gil_scoped_release release;
			    if (validation) {
				    r = lstm::train(train, to_dataset(validation->first, validation->second), config);
			    } else {
				    r = lstm::train(train, config);
			    }
		    }
		    py::dict out;
		    out["params"] = std::vector<double>(r.params.values().begin(), r.params.values().end());
		    out["train_loss"] = r.log.train_loss;
		    out["validation_loss"] = r.log.validation_loss;
		    return out;
	    },
	    py::arg("inputs"), py::arg("targets"), py::arg("config"), py::arg("validation") = py::none(),
	    "Train on scaled windows; returns flat parameters and per-epoch losses.");
	m.def(
	    "predict_lstm",
	    [](const std::vector<double> &params, const lstm::LstmConfig &config, const Rows &windows) {
		    const auto p = to_params(params, config);
		    return lstm::predict_windows(p, to_dataset(windows, std::vector<double>(windows.size(), 0.0)),
		                                 config.seq_len);
	    },
	    py::arg("params"), py::arg("config"), py::arg("windows"));

	m.def(
	    "generate_synthetic",
	    [](std::size_t length, std::uint64_t seed, double base, double amplitude, double ar_phi, double noise_sd) {
		    synth::SynthConfig c;
		    c.length = length;
		    c.seed = seed;
		    c.base = base;
		    c.amplitude = amplitude;
		    c.ar_phi = ar_phi;
		    c.noise_sd = noise_sd;
		    const auto table = synth::generate(c);
		    std::vector<std::string> stamps;
		    for (const auto &t : table.timestamps) {
			    stamps.push_back(data::format_timestamp(t));
		    }
		    py::dict out;
		    out["timestamps"] = stamps;
		    out["actual"] = table.column(synth::kActualColumn);
		    out["forecast"] = table.column(synth::kForecastColumn);
		    return out;
	    },
	    py::arg("length") = 5000, py::arg("seed") = 7, py::arg("base") = 28000.0, py::arg("amplitude") = 4500.0,
	    py::arg("ar_phi") = 0.8, py::arg("noise_sd") = 600.0);

	m.def(
	    "run_cli",
	    [](std::vector<std::string> args) {
		    args.insert(args.begin(), "gridcast");
		    std::vector<char *> argv;
		    for (auto &a : args) {
			    argv.push_back(a.data());
		    }
		    std::ostringstream out, err;
		    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
		    return py::make_tuple(code, out.str(), err.str());
	    },
	    py::arg("args"), "Run the command line in-process; returns (exit_code, stdout, stderr).");
}
