#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "gridcast/baselines.hpp"
#include "gridcast/metrics.hpp"
#include "gridcast/simplex.hpp"
#include "simulate.hpp"

using namespace gridcast;
using namespace gridcast::baselines;
using Catch::Approx;

namespace {

ArimaModel make_model(int p, int d, int q, std::vector<double> phi, std::vector<double> theta, double c = 0.0) {
	ArimaModel m;
	m.order = {p, d, q};
	m.phi = std::move(phi);
	m.theta = std::move(theta);
	m.intercept = c;
	return m;
}

} // namespace

TEST_CASE("simplex minimizes a smooth valley", "[simplex]") {
	auto rosenbrock = [](std::span<const double> x) {
		return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
	};
	optim::SimplexOptions opts;
	opts.max_iterations = 5000;
	opts.relative_tolerance = 1e-14;
	const std::vector<double> start{-1.2, 1.0};
	const auto r = optim::minimize_simplex(rosenbrock, start, opts);
	CHECK(r.converged);
	CHECK(r.x[0] == Approx(1.0).margin(1e-3));
	CHECK(r.x[1] == Approx(1.0).margin(1e-3));
	for (std::size_t i = 1; i < r.best_trace.size(); ++i) {
		REQUIRE(r.best_trace[i] <= r.best_trace[i - 1]);
	}

	// Infinite regions are avoided rather than propagated.
	auto walled = [](std::span<const double> x) {
		return x[0] < 0.5 ? std::numeric_limits<double>::quiet_NaN() : (x[0] - 2.0) * (x[0] - 2.0);
	};
	const std::vector<double> s2{1.0};
	CHECK(optim::minimize_simplex(walled, s2).x[0] == Approx(2.0).margin(1e-3));
}

TEST_CASE("fit_ar recovers known processes", "[baselines][ar]") {
	SECTION("AR(1) with tiny noise") {
		const auto x = testing::simulate_arma({0.5}, {}, 10000, 41, 1e-3);
		const auto m = fit_ar(x, 1);
		CHECK(m.order.p == 1);
		CHECK(m.order.q == 0);
		CHECK(m.order.d == 0);
		CHECK(m.theta.empty());
		CHECK(std::abs(m.phi[0] - 0.5) < 0.02);
		CHECK(std::abs(m.intercept) < 1e-3);
		CHECK(m.stationary);
	}
	SECTION("noiseless AR(2) recursion is solved exactly") {
		std::vector<double> x{5.0, -3.0};
		for (int t = 2; t < 30; ++t) {
			x.push_back(1.0 + 0.5 * x[t - 1] + 0.3 * x[t - 2]);
		}
		const auto m = fit_ar(x, 2);
		CHECK(std::abs(m.phi[0] - 0.5) < 1e-6);
		CHECK(std::abs(m.phi[1] - 0.3) < 1e-6);
		CHECK(std::abs(m.intercept - 1.0) < 1e-6);
		CHECK(m.sigma2 < 1e-12);
	}
	SECTION("white noise has no structure") {
		const auto x = testing::white_noise(10000, 42);
		const auto m = fit_ar(x, 3);
		for (double phi : m.phi) {
			CHECK(std::abs(phi) < 0.05);
		}
		CHECK(m.sigma2 == Approx(1.0).margin(0.05));
	}
	SECTION("errors") {
		CHECK_THROWS(fit_ar(std::vector<double>{1, 2, 3}, 0));
		CHECK_THROWS(fit_ar(std::vector<double>{1, 2, 3}, 2));
	}
}

TEST_CASE("stationarity check", "[baselines]") {
	CHECK(is_stationary(std::vector<double>{0.5}));
	CHECK_FALSE(is_stationary(std::vector<double>{1.2}));
	CHECK_FALSE(is_stationary(std::vector<double>{1.0}));
	CHECK(is_stationary(std::vector<double>{0.5, 0.3}));
	CHECK_FALSE(is_stationary(std::vector<double>{0.5, 0.6}));
	CHECK(is_stationary(std::vector<double>{}));
}

TEST_CASE("fit_arma", "[baselines][arma]") {
	SECTION("q = 0 reduces to fit_ar") {
		const auto x = testing::simulate_arma({0.6, -0.2}, {}, 3000, 51);
		const auto ar = fit_ar(x, 2);
		const auto arma = fit_arma(x, 2, 0);
		for (std::size_t i = 0; i < 2; ++i) {
			CHECK(std::abs(ar.phi[i] - arma.phi[i]) < 1e-6);
		}
		CHECK(std::abs(ar.intercept - arma.intercept) < 1e-6);
		CHECK(arma.theta.empty());
	}
	SECTION("ARMA(1,1) simulate and refit") {
		const auto x = testing::simulate_arma({0.6}, {0.3}, 20000, 52);
		const auto m = fit_arma(x, 1, 1);
		CHECK(std::abs(m.phi[0] - 0.6) < 0.05);
		CHECK(std::abs(m.theta[0] - 0.3) < 0.05);
		CHECK(m.sigma2 == Approx(1.0).margin(0.05));
	}
	SECTION("MA(1) simulate and refit") {
		const auto x = testing::simulate_arma({}, {0.5}, 20000, 53);
		const auto m = fit_arma(x, 0, 1);
		CHECK(m.phi.empty());
		REQUIRE(m.theta.size() == 1);
		CHECK(std::abs(m.theta[0] - 0.5) < 0.05);
	}
	SECTION("invalid orders") {
		const auto x = testing::white_noise(100, 54);
		CHECK_THROWS(fit_arma(x, 0, 0));
		CHECK_THROWS(fit_arma(x, -1, 1));
		CHECK_THROWS(fit_arma(std::vector<double>{1, 2, 3, 4}, 2, 2));
	}
}

TEST_CASE("CSS objective is non-increasing along the simplex path", "[baselines][arma][property]") {
	const auto x = testing::simulate_arma({0.5}, {0.4}, 2000, 61);
	auto objective = [&](std::span<const double> v) {
		return css_objective(x, v[0], v.subspan(1, 1), v.subspan(2, 1));
	};
	const std::vector<double> start{0.0, 0.0, 0.0};
	const auto r = optim::minimize_simplex(objective, start);
	REQUIRE(r.best_trace.size() == r.iterations);
	for (std::size_t i = 1; i < r.best_trace.size(); ++i) {
		REQUIRE(r.best_trace[i] <= r.best_trace[i - 1]);
	}
	CHECK(r.value <= objective(start));
}

TEST_CASE("css residuals use zero pre-sample innovations", "[baselines][arma]") {
	const std::vector<double> w{1.0, 0.5, -0.2, 0.8, 0.3};
	const std::vector<double> phi{0.6}, theta{0.3};
	const auto e = css_residuals(w, 0.1, phi, theta);
	// Hand-filtered: e_0 = 0 (pre-sample), then e_t = w_t - 0.1 - 0.6 w_{t-1} - 0.3 e_{t-1}.
	CHECK(e[0] == 0.0);
	CHECK(e[1] == Approx(-0.2).margin(1e-12));
	CHECK(e[2] == Approx(-0.54).margin(1e-12));
	CHECK(e[3] == Approx(0.982).margin(1e-12));
	CHECK(e[4] == Approx(-0.5746).margin(1e-12));
	CHECK(css_objective(w, 0.1, phi, theta) ==
	      Approx(0.04 + 0.2916 + 0.964324 + 0.33016516).margin(1e-12));
}

TEST_CASE("fit_arima", "[baselines][arima]") {
	SECTION("d = 0 is fit_arma") {
		const auto x = testing::simulate_arma({0.6}, {0.3}, 3000, 71);
		const auto a = fit_arima(x, 1, 0, 1);
		const auto b = fit_arma(x, 1, 1);
		CHECK(a.phi == b.phi);
		CHECK(a.theta == b.theta);
		CHECK(a.intercept == b.intercept);
	}
	SECTION("linear ramp continues exactly") {
		std::vector<double> ramp(50);
		for (std::size_t t = 0; t < ramp.size(); ++t) {
			ramp[t] = 3.0 * static_cast<double>(t) + 7.0;
		}
		const auto m = fit_arima(ramp, 0, 1, 0);
		CHECK(m.order.d == 1);
		CHECK(m.intercept == Approx(3.0).margin(1e-12));
		const auto diffs = difference(ramp, 1);
		for (double v : diffs) {
			CHECK(v == 3.0);
		}
		CHECK(std::abs(forecast_one_step(m, ramp) - (3.0 * 50 + 7.0)) < 1e-6);

		const std::vector<double> test{157.0, 160.0, 163.0, 166.0};
		const auto fs = rolling_forecast(m, test, ramp, EvalMode::Static);
		for (std::size_t i = 0; i < test.size(); ++i) {
			CHECK(std::abs(fs.predicted[i] - test[i]) < 1e-6);
		}
	}
	SECTION("quadratic has constant second difference") {
		std::vector<double> quad(40);
		for (std::size_t t = 0; t < quad.size(); ++t) {
			const double u = static_cast<double>(t);
			quad[t] = 0.5 * u * u - 2.0 * u + 1.0;
		}
		for (double v : difference(quad, 2)) {
			CHECK(v == Approx(1.0).margin(1e-12));
		}
		const auto m = fit_arima(quad, 0, 2, 0);
		std::vector<double> future;
		for (int t = 40; t < 45; ++t) {
			future.push_back(0.5 * t * t - 2.0 * t + 1.0);
		}
		const auto fs = rolling_forecast(m, future, quad, EvalMode::Static);
		for (std::size_t i = 0; i < future.size(); ++i) {
			CHECK(std::abs(fs.predicted[i] - future[i]) < 1e-6);
		}
	}
}

TEST_CASE("forecast_one_step", "[baselines][forecast]") {
	SECTION("AR(1) direct formula") {
		const auto m = make_model(1, 0, 0, {0.5}, {});
		CHECK(forecast_one_step(m, std::vector<double>{3.0, 10.0}) == 5.0);
	}
	SECTION("random walk is persistence") {
		const auto m = make_model(0, 1, 0, {}, {});
		CHECK(forecast_one_step(m, std::vector<double>{4.0, 2.0, 9.5}) == 9.5);
	}
	SECTION("ARMA(1,1) matches hand filtering") {
		// Innovations from the css residual case above: e_4 = -0.5746.
		// Forecast = 0.1 + 0.6 * 0.3 + 0.3 * (-0.5746) = 0.10762.
		const auto m = make_model(1, 0, 1, {0.6}, {0.3}, 0.1);
		const std::vector<double> h{1.0, 0.5, -0.2, 0.8, 0.3};
		CHECK(std::abs(forecast_one_step(m, h) - 0.10762) < 1e-9);
	}
	SECTION("insufficient history") {
		const auto m = make_model(2, 1, 0, {0.5, 0.1}, {});
		CHECK_THROWS(forecast_one_step(m, std::vector<double>{1.0, 2.0}));
	}
	SECTION("scale equivariance without intercept") {
		const auto x = testing::simulate_arma({0.7, -0.1}, {}, 500, 81);
		const auto m = make_model(2, 0, 0, {0.7, -0.1}, {});
		const double base = forecast_one_step(m, x);
		for (double a : {0.5, 3.0, -2.0, 1e4}) {
			std::vector<double> scaled(x.size());
			for (std::size_t i = 0; i < x.size(); ++i) {
				scaled[i] = a * x[i];
			}
			CHECK(std::abs(forecast_one_step(m, scaled) - a * base) <= 1e-9 * std::max(1.0, std::abs(a * base)));
		}
	}
}

TEST_CASE("rolling_forecast", "[baselines][forecast]") {
	SECTION("persistence") {
		const auto m = make_model(0, 1, 0, {}, {});
		const std::vector<double> test{1, 2, 3};
		const auto fs = rolling_forecast(m, test, std::vector<double>{0.0});
		CHECK(fs.predicted == std::vector<double>{0, 1, 2});
		CHECK(fs.actual == test);
	}
	SECTION("rolling beats static on AR(1) data") {
		const auto x = testing::simulate_arma({0.8}, {}, 5000, 91);
		const std::span<const double> all(x);
		const auto train = all.first(4000);
		const auto test = all.subspan(4000);
		const auto m = fit_ar(train, 1);
		const auto rolling = rolling_forecast(m, test, train, EvalMode::Rolling);
		const auto fixed = rolling_forecast(m, test, train, EvalMode::Static);
		CHECK(metrics::mae(test, rolling.predicted) <= metrics::mae(test, fixed.predicted));
	}
	SECTION("deterministic") {
		const auto x = testing::simulate_arma({0.5}, {0.2}, 800, 92);
		const std::span<const double> all(x);
		const auto m = fit_arma(all.first(600), 1, 1);
		const auto a = rolling_forecast(m, all.subspan(600), all.first(600));
		const auto b = rolling_forecast(fit_arma(all.first(600), 1, 1), all.subspan(600), all.first(600));
		CHECK(a.predicted == b.predicted);
	}
	SECTION("filter agrees with one-shot forecasts") {
		const auto x = testing::simulate_arma({0.5, 0.2}, {0.3}, 300, 93);
		const std::span<const double> all(x);
		auto m = fit_arima(all.first(200), 2, 1, 1);
		const auto fs = rolling_forecast(m, all.subspan(200, 20), all.first(200));
		for (std::size_t i = 0; i < 20; ++i) {
			CHECK(fs.predicted[i] == Approx(forecast_one_step(m, all.first(200 + i))).margin(1e-12));
		}
	}
}

TEST_CASE("moving average smoother", "[baselines][ma]") {
	CHECK(moving_average_forecast(std::vector<double>(30, 4.0), 24, 5) == std::vector<double>(5, 4.0));

	std::vector<double> hours(24);
	std::iota(hours.begin(), hours.end(), 1.0);
	CHECK(moving_average_forecast(hours, 24, 1) == std::vector<double>{12.5});
	CHECK(moving_average_forecast(hours, 1, 3) == std::vector<double>{24.0, 24.0, 24.0});
	CHECK_THROWS(moving_average_forecast(hours, 25, 1));
	CHECK_THROWS(moving_average_forecast(hours, 0, 1));

	const std::vector<double> test{10, 20, 30};
	const auto rolling = rolling_moving_average(2, test, std::vector<double>{2.0, 4.0});
	CHECK(rolling.predicted == std::vector<double>{3.0, 7.0, 15.0});
	const auto fixed = rolling_moving_average(2, test, std::vector<double>{2.0, 4.0}, EvalMode::Static);
	CHECK(fixed.predicted == std::vector<double>{3.0, 3.5, 3.25});
}

TEST_CASE("model json round trip", "[baselines][io]") {
	const auto x = testing::simulate_arma({0.5}, {0.2}, 1000, 99);
	const auto m = fit_arima(x, 1, 1, 1);
	const auto j = to_json(m);
	CHECK(j.at("schema_version") == kModelSchemaVersion);
	for (const char *key : {"p", "d", "q", "phi", "theta", "intercept", "sigma2", "flags"}) {
		CHECK(j.contains(key));
	}
	const auto back = model_from_json(nlohmann::json::parse(j.dump()));
	CHECK(back.phi == m.phi);
	CHECK(back.theta == m.theta);
	CHECK(back.intercept == m.intercept);
	CHECK(back.sigma2 == m.sigma2);
	CHECK(back.order.d == 1);

	auto bad = j;
	bad["schema_version"] = 99;
	CHECK_THROWS(model_from_json(bad));
}
