#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "gridcast/baselines.hpp"
#include "gridcast/error.hpp"

namespace gridcast::baselines {

namespace {

// Least squares with ridge on the normal equations. `row(t, out)` fills the
// regressors for observation t; `target(t)` gives the response.
template <typename RowFn, typename TargetFn>
Eigen::VectorXd solve_least_squares(std::size_t first, std::size_t last, std::size_t k, RowFn row, TargetFn target) {
	Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
	Eigen::VectorXd xty = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
	Eigen::VectorXd r(static_cast<Eigen::Index>(k));
	for (std::size_t t = first; t < last; ++t) {
		row(t, r);
		const double y = target(t);
		xtx.selfadjointView<Eigen::Lower>().rankUpdate(r);
		xty += y * r;
	}
	xtx.diagonal().array() += kRidgeEpsilon;
	Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx.selfadjointView<Eigen::Lower>());
	if (ldlt.info() != Eigen::Success) {
		throw NumericalError("least squares: normal equations could not be factored");
	}
	Eigen::VectorXd beta = ldlt.solve(xty);
	if (!beta.allFinite()) {
		throw NumericalError("least squares: non-finite solution");
	}
	return beta;
}

std::vector<double> binomials(int d) {
	std::vector<double> c(static_cast<std::size_t>(d) + 1, 1.0);
	for (int k = 1; k <= d; ++k) {
		c[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k) - 1] * (d - k + 1) / k;
	}
	return c;
}

bool is_invertible(std::span<const double> theta) {
	std::vector<double> neg(theta.size());
	std::transform(theta.begin(), theta.end(), neg.begin(), [](double v) { return -v; });
	return is_stationary(neg);
}

std::size_t to_size(int v) {
	return static_cast<std::size_t>(v);
}

// Hannan-Rissanen: long autoregression for innovation proxies, then one
// regression of w_t on its own lags and lagged proxies.
std::vector<double> hannan_rissanen(std::span<const double> w, int p, int q) {
	const std::size_t n = w.size();
	const std::size_t k = 1 + to_size(p) + to_size(q);
	const std::size_t long_order =
	    std::max<std::size_t>(to_size(std::max(p, q)) + 1, std::min<std::size_t>(20 + to_size(p + q), n / 10));

	std::vector<double> start(k, 0.0);
	start[0] = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
	const std::size_t first = long_order + to_size(q);
	if (first >= n || n - first < 2 * k + 10) {
		return start;
	}

	const auto long_ar = fit_ar(w, static_cast<int>(long_order));
	std::vector<double> proxy(n, 0.0);
	for (std::size_t t = long_order; t < n; ++t) {
		double fit = long_ar.intercept;
		for (std::size_t i = 0; i < long_order; ++i) {
			fit += long_ar.phi[i] * w[t - i - 1];
		}
		proxy[t] = w[t] - fit;
	}

	const auto beta = solve_least_squares(
	    std::max(first, to_size(p)), n, k,
	    [&](std::size_t t, Eigen::VectorXd &r) {
		    r(0) = 1.0;
		    for (std::size_t i = 0; i < to_size(p); ++i) {
			    r(static_cast<Eigen::Index>(1 + i)) = w[t - i - 1];
		    }
		    for (std::size_t j = 0; j < to_size(q); ++j) {
			    r(static_cast<Eigen::Index>(1 + to_size(p) + j)) = proxy[t - j - 1];
		    }
	    },
	    [&](std::size_t t) { return w[t]; });
	for (std::size_t i = 0; i < k; ++i) {
		start[i] = beta(static_cast<Eigen::Index>(i));
	}

	// Pull a non-invertible MA start back inside the unit circle.
	std::span<double> theta(start.data() + 1 + p, to_size(q));
	for (int tries = 0; tries < 50 && !is_invertible(theta); ++tries) {
		for (auto &v : theta) {
			v *= 0.9;
		}
	}
	return start;
}

} // namespace

ArimaModel fit_ar(std::span<const double> train, int p) {
	if (p <= 0) {
		throw std::invalid_argument("fit_ar: order p must be >= 1");
	}
	const std::size_t n = train.size();
	const std::size_t order = to_size(p);
	if (n <= order + 1) {
		throw std::invalid_argument("fit_ar: need more than p + 1 observations");
	}

	const auto beta = solve_least_squares(
	    order, n, order + 1,
	    [&](std::size_t t, Eigen::VectorXd &r) {
		    r(0) = 1.0;
		    for (std::size_t i = 0; i < order; ++i) {
			    r(static_cast<Eigen::Index>(i + 1)) = train[t - i - 1];
		    }
	    },
	    [&](std::size_t t) { return train[t]; });

	ArimaModel m;
	m.order = {p, 0, 0};
	m.intercept = beta(0);
	m.phi.assign(beta.data() + 1, beta.data() + beta.size());

	double ssr = 0.0;
	for (std::size_t t = order; t < n; ++t) {
		double fit = m.intercept;
		for (std::size_t i = 0; i < order; ++i) {
			fit += m.phi[i] * train[t - i - 1];
		}
		ssr += (train[t] - fit) * (train[t] - fit);
	}
	m.sigma2 = ssr / static_cast<double>(n - order);
	m.stationary = is_stationary(m.phi);
	return m;
}

std::vector<double> css_residuals(std::span<const double> w, double intercept, std::span<const double> phi,
                                  std::span<const double> theta) {
	const std::size_t p = phi.size(), q = theta.size();
	const std::size_t warm = std::max(p, q);
	std::vector<double> e(w.size(), 0.0);
	for (std::size_t t = warm; t < w.size(); ++t) {
		double fit = intercept;
		for (std::size_t i = 0; i < p; ++i) {
			fit += phi[i] * w[t - i - 1];
		}
		for (std::size_t j = 0; j < q; ++j) {
			fit += theta[j] * e[t - j - 1];
		}
		e[t] = w[t] - fit;
	}
	return e;
}

double css_objective(std::span<const double> w, double intercept, std::span<const double> phi,
                     std::span<const double> theta) {
	const auto e = css_residuals(w, intercept, phi, theta);
	double sum = 0.0;
	for (double v : e) {
		sum += v * v;
	}
	return sum;
}

ArimaModel fit_arma(std::span<const double> train, int p, int q, const optim::SimplexOptions &options) {
	if (p < 0 || q < 0 || p + q < 1) {
		throw std::invalid_argument("fit_arma: need p >= 0, q >= 0 and p + q >= 1");
	}
	if (train.size() <= to_size(p + q + 1)) {
		throw std::invalid_argument("fit_arma: need more than p + q + 1 observations");
	}
	if (q == 0) {
		// CSS with no MA terms is exactly the AR least-squares problem.
		return fit_ar(train, p);
	}

	const auto start = hannan_rissanen(train, p, q);
	const std::size_t pp = to_size(p), qq = to_size(q);
	auto objective = [&](std::span<const double> v) {
		return css_objective(train, v[0], v.subspan(1, pp), v.subspan(1 + pp, qq));
	};
	const auto result = optim::minimize_simplex(objective, start, options);
	if (!std::isfinite(result.value)) {
		throw NumericalError("fit_arma: conditional sum of squares is not finite");
	}

	ArimaModel m;
	m.order = {p, 0, q};
	m.intercept = result.x[0];
	m.phi.assign(result.x.begin() + 1, result.x.begin() + 1 + p);
	m.theta.assign(result.x.begin() + 1 + p, result.x.end());
	const std::size_t terms = train.size() - std::max(pp, qq);
	m.sigma2 = result.value / static_cast<double>(terms);
	m.stationary = is_stationary(m.phi);
	m.converged = result.converged;
	m.iterations = result.iterations;
	return m;
}

std::vector<double> difference(std::span<const double> series, int d) {
	if (d < 0) {
		throw std::invalid_argument("difference: order must be >= 0");
	}
	std::vector<double> out(series.begin(), series.end());
	for (int k = 0; k < d; ++k) {
		if (out.size() < 2) {
			throw std::invalid_argument("difference: series too short");
		}
		for (std::size_t t = 0; t + 1 < out.size(); ++t) {
			out[t] = out[t + 1] - out[t];
		}
		out.pop_back();
	}
	return out;
}

ArimaModel fit_arima(std::span<const double> train, int p, int d, int q, const optim::SimplexOptions &options) {
	if (p < 0 || d < 0 || q < 0) {
		throw std::invalid_argument("fit_arima: orders must be non-negative");
	}
	if (train.size() <= to_size(p + d + q + 1)) {
		throw std::invalid_argument("fit_arima: need more than p + d + q + 1 observations");
	}
	const auto w = difference(train, d);
	ArimaModel m;
	if (p + q == 0) {
		const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
		double ss = 0.0;
		for (double v : w) {
			ss += (v - mean) * (v - mean);
		}
		m.intercept = mean;
		m.sigma2 = ss / static_cast<double>(w.size());
	} else {
		m = fit_arma(w, p, q, options);
	}
	m.order = {p, d, q};
	return m;
}

bool is_stationary(std::span<const double> phi) {
	const auto p = static_cast<Eigen::Index>(phi.size());
	if (p == 0) {
		return true;
	}
	// Roots of 1 - sum phi_i z^i outside the unit circle <=> eigenvalues of
	// the companion matrix inside it.
	Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
	for (Eigen::Index i = 0; i < p; ++i) {
		companion(0, i) = phi[static_cast<std::size_t>(i)];
	}
	for (Eigen::Index i = 1; i < p; ++i) {
		companion(i, i - 1) = 1.0;
	}
	Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
	if (solver.info() != Eigen::Success) {
		return false;
	}
	return (solver.eigenvalues().array().abs() < 1.0).all();
}

ArimaFilter::ArimaFilter(const ArimaModel &model)
    : model_(model), warm_(std::max(model.phi.size(), model.theta.size())) {
	if (model.phi.size() != to_size(model.order.p) || model.theta.size() != to_size(model.order.q) || model.order.d < 0) {
		throw std::invalid_argument("ArimaFilter: coefficient lengths do not match the declared orders");
	}
}

double ArimaFilter::predict_differenced() const {
	double w = model_.intercept;
	const std::size_t nd = diffs_.size();
	for (std::size_t i = 0; i < model_.phi.size() && i < nd; ++i) {
		w += model_.phi[i] * diffs_[nd - 1 - i];
	}
	const std::size_t ne = innovations_.size();
	for (std::size_t j = 0; j < model_.theta.size() && j < ne; ++j) {
		w += model_.theta[j] * innovations_[ne - 1 - j];
	}
	return w;
}

void ArimaFilter::push(double value) {
	++observed_;
	const std::size_t d = to_size(model_.order.d);
	if (raw_tail_.size() < d) {
		raw_tail_.push_back(value);
		return;
	}
	double w = value;
	if (d > 0) {
		const auto c = binomials(model_.order.d);
		double sign = -1.0;
		for (std::size_t k = 1; k <= d; ++k, sign = -sign) {
			w += sign * c[k] * raw_tail_[d - k];
		}
		raw_tail_.push_back(value);
		raw_tail_.pop_front();
	}

	const double e = diff_count_ < warm_ ? 0.0 : w - predict_differenced();
	diffs_.push_back(w);
	if (diffs_.size() > model_.phi.size()) {
		diffs_.pop_front();
	}
	if (!model_.theta.empty()) {
		innovations_.push_back(e);
		if (innovations_.size() > model_.theta.size()) {
			innovations_.pop_front();
		}
	}
	++diff_count_;
}

bool ArimaFilter::ready() const {
	return raw_tail_.size() == to_size(model_.order.d) && diff_count_ >= model_.phi.size();
}

double ArimaFilter::predict() const {
	if (!ready()) {
		throw std::invalid_argument("forecast: need at least p + d = " +
		                            std::to_string(model_.order.p + model_.order.d) + " observations, have " +
		                            std::to_string(observed_));
	}
	double x = predict_differenced();
	const std::size_t d = to_size(model_.order.d);
	if (d > 0) {
		const auto c = binomials(model_.order.d);
		double sign = 1.0;
		for (std::size_t k = 1; k <= d; ++k, sign = -sign) {
			x += sign * c[k] * raw_tail_[d - k];
		}
	}
	return x;
}

double forecast_one_step(const ArimaModel &model, std::span<const double> history) {
	ArimaFilter filter(model);
	for (double v : history) {
		filter.push(v);
	}
	return filter.predict();
}

ForecastSeries rolling_forecast(const ArimaModel &model, std::span<const double> test, std::span<const double> warmup,
                                EvalMode mode) {
	ArimaFilter filter(model);
	for (double v : warmup) {
		filter.push(v);
	}
	ForecastSeries out;
	out.predicted.reserve(test.size());
	out.actual.assign(test.begin(), test.end());
	for (double actual : test) {
		const double pred = filter.predict();
		out.predicted.push_back(pred);
		filter.push(mode == EvalMode::Rolling ? actual : pred);
	}
	return out;
}

std::vector<double> moving_average_forecast(std::span<const double> history, std::size_t window, std::size_t horizon) {
	if (window == 0) {
		throw std::invalid_argument("moving_average_forecast: window must be >= 1");
	}
	if (history.size() < window) {
		throw std::invalid_argument("moving_average_forecast: window " + std::to_string(window) +
		                            " exceeds history length " + std::to_string(history.size()));
	}
	std::deque<double> tail(history.end() - static_cast<std::ptrdiff_t>(window), history.end());
	std::vector<double> out;
	out.reserve(horizon);
	for (std::size_t h = 0; h < horizon; ++h) {
		const double mean = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(window);
		out.push_back(mean);
		tail.pop_front();
		tail.push_back(mean);
	}
	return out;
}

ForecastSeries rolling_moving_average(std::size_t window, std::span<const double> test, std::span<const double> warmup,
                                      EvalMode mode) {
	if (window == 0 || warmup.size() < window) {
		throw std::invalid_argument("rolling_moving_average: warmup shorter than window " + std::to_string(window));
	}
	std::deque<double> tail(warmup.end() - static_cast<std::ptrdiff_t>(window), warmup.end());
	ForecastSeries out;
	out.predicted.reserve(test.size());
	out.actual.assign(test.begin(), test.end());
	for (double actual : test) {
		const double mean = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(window);
		out.predicted.push_back(mean);
		tail.pop_front();
		tail.push_back(mode == EvalMode::Rolling ? actual : mean);
	}
	return out;
}

nlohmann::json to_json(const ArimaModel &model) {
	return {{"schema_version", kModelSchemaVersion},
	        {"p", model.order.p},
	        {"d", model.order.d},
	        {"q", model.order.q},
	        {"phi", model.phi},
	        {"theta", model.theta},
	        {"intercept", model.intercept},
	        {"sigma2", model.sigma2},
	        {"flags",
	         {{"stationary", model.stationary}, {"converged", model.converged}, {"iterations", model.iterations}}}};
}

ArimaModel model_from_json(const nlohmann::json &j) {
	try {
		if (j.at("schema_version").get<int>() != kModelSchemaVersion) {
			throw IoError("model json: unsupported schema_version " + j.at("schema_version").dump());
		}
		ArimaModel m;
		m.order = {j.at("p").get<int>(), j.at("d").get<int>(), j.at("q").get<int>()};
		m.phi = j.at("phi").get<std::vector<double>>();
		m.theta = j.at("theta").get<std::vector<double>>();
		m.intercept = j.at("intercept").get<double>();
		m.sigma2 = j.at("sigma2").get<double>();
		if (j.contains("flags")) {
			const auto &f = j.at("flags");
			m.stationary = f.value("stationary", true);
			m.converged = f.value("converged", true);
			m.iterations = f.value("iterations", std::size_t{0});
		}
		if (m.phi.size() != to_size(m.order.p) || m.theta.size() != to_size(m.order.q) || m.sigma2 < 0.0) {
			throw IoError("model json: coefficient lengths do not match orders");
		}
		return m;
	} catch (const nlohmann::json::exception &e) {
		throw IoError(std::string("model json: ") + e.what());
	}
}

} // namespace gridcast::baselines
