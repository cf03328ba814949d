#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include <json.hpp>

#include "gridcast/forecast.hpp"
#include "gridcast/simplex.hpp"

namespace gridcast::baselines {

struct ArimaOrder {
	int p = 0;
	int d = 0;
	int q = 0;
};

/// Unified AR / ARMA / ARIMA coefficient set.
///
/// The differenced series w_t follows
///   w_t = c + sum_i phi_i w_{t-i} + sum_j theta_j e_{t-j} + e_t
/// with pre-sample innovations fixed at zero.
struct ArimaModel {
	ArimaOrder order;
	std::vector<double> phi;
	std::vector<double> theta;
	double intercept = 0.0;
	double sigma2 = 0.0;
	bool stationary = true; // AR roots outside the unit circle
	bool converged = true;  // simplex refinement reached tolerance
	std::size_t iterations = 0;
};

inline constexpr int kModelSchemaVersion = 1;
inline constexpr double kRidgeEpsilon = 1e-8;

/// Ordinary least squares AR(p) with intercept over t = p..n-1. A ridge of
/// kRidgeEpsilon on the normal equations keeps near-singular designs solvable.
ArimaModel fit_ar(std::span<const double> train, int p);

/// Conditional-sum-of-squares ARMA(p, q). Starts from a Hannan-Rissanen
/// estimate and refines with Nelder-Mead. q == 0 reduces to fit_ar.
ArimaModel fit_arma(std::span<const double> train, int p, int q, const optim::SimplexOptions &options = {});

/// Differences d times and fits ARMA(p, q). p == q == 0 fits the mean of
/// the differenced series (drift).
ArimaModel fit_arima(std::span<const double> train, int p, int d, int q, const optim::SimplexOptions &options = {});

/// Innovations e_t for t >= max(p, q); earlier entries are zero.
std::vector<double> css_residuals(std::span<const double> w, double intercept, std::span<const double> phi,
                                  std::span<const double> theta);
double css_objective(std::span<const double> w, double intercept, std::span<const double> phi,
                     std::span<const double> theta);

std::vector<double> difference(std::span<const double> series, int d);

/// True when every root of 1 - phi_1 z - ... - phi_p z^p lies outside the unit circle.
bool is_stationary(std::span<const double> phi);

/// Incremental filter: push observations on the original scale, ask for the
/// next one-step prediction. Innovations follow the CSS convention.
class ArimaFilter {
public:
	explicit ArimaFilter(const ArimaModel &model);

	void push(double value);
	bool ready() const;
	double predict() const;
	std::size_t observed() const { return observed_; }

private:
	ArimaModel model_;
	std::size_t warm_; // max(p, q)
	std::deque<double> raw_tail_;   // last d raw values, newest at back
	std::deque<double> diffs_;      // last p differenced values
	std::deque<double> innovations_; // last q innovations
	std::size_t diff_count_ = 0;
	std::size_t observed_ = 0;

	double predict_differenced() const;
};

double forecast_one_step(const ArimaModel &model, std::span<const double> history);

/// Predictions for every point of `test`, given the pre-test `warmup`.
ForecastSeries rolling_forecast(const ArimaModel &model, std::span<const double> test,
                                std::span<const double> warmup, EvalMode mode = EvalMode::Rolling);

/// Mean of the last `window` values, extended recursively over `horizon` steps.
std::vector<double> moving_average_forecast(std::span<const double> history, std::size_t window,
                                            std::size_t horizon);

ForecastSeries rolling_moving_average(std::size_t window, std::span<const double> test,
                                      std::span<const double> warmup, EvalMode mode = EvalMode::Rolling);

nlohmann::json to_json(const ArimaModel &model);
ArimaModel model_from_json(const nlohmann::json &j);

} // namespace gridcast::baselines
