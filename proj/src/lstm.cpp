#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gridcast/error.hpp"
#include "gridcast/lstm.hpp"

namespace gridcast::lstm {

namespace {

using Eigen::Index;

Index idx(std::size_t v) {
	return static_cast<Index>(v);
}

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd &z) {
	return (1.0 + (-z.array()).exp()).inverse().matrix();
}

std::string format_double(double v) {
	char buf[32];
	auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
	return std::string(buf, ptr);
}

void check_window_batch(const Eigen::MatrixXd &windows, std::size_t seq_len, const LstmParams &params) {
	if (seq_len == 0 || static_cast<std::size_t>(windows.rows()) != seq_len * params.input_size()) {
		throw std::invalid_argument("forward: window has " + std::to_string(windows.rows()) + " values, expected " +
		                            std::to_string(seq_len) + " x " + std::to_string(params.input_size()));
	}
	if (windows.cols() == 0) {
		throw std::invalid_argument("forward: empty batch");
	}
}

} // namespace

void LstmConfig::validate() const {
	if (hidden_size < 1 || input_size < 1 || seq_len < 1 || epochs < 1 || batch_size < 1) {
		throw std::invalid_argument("lstm config: hidden_size, input_size, seq_len, epochs and batch_size must be >= 1");
	}
	if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
		throw std::invalid_argument("lstm config: dropout_rate must lie in [0, 1)");
	}
	if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
		throw std::invalid_argument("lstm config: learning_rate must be positive");
	}
}

ParamCount param_count(const LstmConfig &config) {
	const std::size_t h = config.hidden_size, d = config.input_size;
	return {4 * (h * (d + h) + h), h + 1};
}

LstmParams::LstmParams(std::size_t hidden_size, std::size_t input_size)
    : hidden_(hidden_size), input_(input_size),
      values_(4 * hidden_size * (input_size + hidden_size) + 4 * hidden_size + hidden_size + 1, 0.0) {
	if (hidden_size == 0 || input_size == 0) {
		throw std::invalid_argument("LstmParams: sizes must be >= 1");
	}
}

Eigen::Map<RowMatrix> LstmParams::gate_weights() {
	return {values_.data(), idx(4 * hidden_), idx(input_ + hidden_)};
}

Eigen::Map<const RowMatrix> LstmParams::gate_weights() const {
	return {values_.data(), idx(4 * hidden_), idx(input_ + hidden_)};
}

Eigen::Map<Eigen::VectorXd> LstmParams::gate_biases() {
	return {values_.data() + weight_count(), idx(4 * hidden_)};
}

Eigen::Map<const Eigen::VectorXd> LstmParams::gate_biases() const {
	return {values_.data() + weight_count(), idx(4 * hidden_)};
}

Eigen::Map<Eigen::VectorXd> LstmParams::dense_weights() {
	return {values_.data() + weight_count() + 4 * hidden_, idx(hidden_)};
}

Eigen::Map<const Eigen::VectorXd> LstmParams::dense_weights() const {
	return {values_.data() + weight_count() + 4 * hidden_, idx(hidden_)};
}

LstmParams init_params(const LstmConfig &config, std::uint64_t seed) {
	config.validate();
	const std::size_t h = config.hidden_size, d = config.input_size;
	LstmParams params(h, d);
	Rng rng(seed);

	const double input_limit = std::sqrt(6.0 / static_cast<double>(d + 4 * h));
	const double recurrent_limit = std::sqrt(6.0 / static_cast<double>(h + 4 * h));
	const double dense_limit = std::sqrt(6.0 / static_cast<double>(h + 1));

	auto w = params.gate_weights();
	for (Index c = 0; c < w.cols(); ++c) {
		const double limit = static_cast<std::size_t>(c) < d ? input_limit : recurrent_limit;
		for (Index r = 0; r < w.rows(); ++r) {
			w(r, c) = rng.uniform(-limit, limit);
		}
	}
	params.gate_biases().segment(idx(kForget * h), idx(h)).setOnes();
	auto dense = params.dense_weights();
	for (Index k = 0; k < dense.size(); ++k) {
		dense(k) = rng.uniform(-dense_limit, dense_limit);
	}
	return params;
}

BatchState BatchState::zeros(std::size_t hidden, std::size_t batch) {
	return {Eigen::MatrixXd::Zero(idx(hidden), idx(batch)), Eigen::MatrixXd::Zero(idx(hidden), idx(batch))};
}

std::pair<BatchState, StepCache> cell_forward(const Eigen::MatrixXd &x, const BatchState &state,
                                              const LstmParams &params) {
	const Index h = idx(params.hidden_size()), d = idx(params.input_size());
	if (x.rows() != d || state.h.rows() != h || state.c.rows() != h || state.h.cols() != x.cols() ||
	    state.c.cols() != x.cols()) {
		throw std::invalid_argument("cell_forward: input or state shape does not match the parameters");
	}
	StepCache cache;
	cache.input.resize(d + h, x.cols());
	cache.input.topRows(d) = x;
	cache.input.bottomRows(h) = state.h;

	Eigen::MatrixXd z = params.gate_weights() * cache.input;
	z.colwise() += params.gate_biases();

	cache.gates.resize(4 * h, x.cols());
	cache.gates.topRows(2 * h) = sigmoid(z.topRows(2 * h));
	cache.gates.middleRows(2 * h, h) = z.middleRows(2 * h, h).array().tanh().matrix();
	cache.gates.bottomRows(h) = sigmoid(z.bottomRows(h));

	const auto i = cache.gates.middleRows(kInput * h, h).array();
	const auto f = cache.gates.middleRows(kForget * h, h).array();
	const auto g = cache.gates.middleRows(kCandidate * h, h).array();
	const auto o = cache.gates.middleRows(kOutput * h, h).array();

	BatchState next;
	next.c = (f * state.c.array() + i * g).matrix();
	cache.c_prev = state.c;
	cache.tanh_c = next.c.array().tanh().matrix();
	next.h = (o * cache.tanh_c.array()).matrix();
	return {std::move(next), std::move(cache)};
}

std::pair<LstmState, StepCache> cell_forward(std::span<const double> x, const LstmState &state,
                                             const LstmParams &params) {
	const Eigen::MatrixXd xm = Eigen::Map<const Eigen::VectorXd>(x.data(), idx(x.size()));
	BatchState batch{state.h, state.c};
	auto [next, cache] = cell_forward(xm, batch, params);
	return {LstmState{next.h.col(0), next.c.col(0)}, std::move(cache)};
}

ForwardCache forward(const Eigen::MatrixXd &windows, std::size_t seq_len, const LstmParams &params,
                     const Eigen::MatrixXd *dropout_mask) {
	check_window_batch(windows, seq_len, params);
	const std::size_t d = params.input_size();
	ForwardCache cache;
	cache.seq_len = seq_len;
	cache.steps.reserve(seq_len);

	BatchState state = BatchState::zeros(params.hidden_size(), static_cast<std::size_t>(windows.cols()));
	for (std::size_t t = 0; t < seq_len; ++t) {
		auto [next, step] = cell_forward(windows.middleRows(idx(t * d), idx(d)), state, params);
		cache.steps.push_back(std::move(step));
		state = std::move(next);
	}
	if (dropout_mask) {
		if (dropout_mask->rows() != state.h.rows() || dropout_mask->cols() != state.h.cols()) {
			throw std::invalid_argument("forward: dropout mask shape does not match the batch");
		}
		cache.mask = *dropout_mask;
		cache.h_out = state.h.cwiseProduct(*dropout_mask);
	} else {
		cache.h_out = std::move(state.h);
	}
	cache.predictions = cache.h_out.transpose() * params.dense_weights();
	cache.predictions.array() += params.dense_bias();
	return cache;
}

double network_forward(std::span<const double> window, std::size_t seq_len, const LstmParams &params,
                       std::span<const double> dropout_mask) {
	const Eigen::MatrixXd w = Eigen::Map<const Eigen::VectorXd>(window.data(), idx(window.size()));
	if (dropout_mask.empty()) {
		return forward(w, seq_len, params).predictions(0);
	}
	const Eigen::MatrixXd mask = Eigen::Map<const Eigen::VectorXd>(dropout_mask.data(), idx(dropout_mask.size()));
	return forward(w, seq_len, params, &mask).predictions(0);
}

Eigen::MatrixXd dropout_mask(std::size_t hidden, std::size_t batch, double rate, Rng &rng) {
	if (!(rate >= 0.0 && rate < 1.0)) {
		throw std::invalid_argument("dropout_mask: rate must lie in [0, 1)");
	}
	Eigen::MatrixXd mask = Eigen::MatrixXd::Ones(idx(hidden), idx(batch));
	if (rate == 0.0) {
		return mask;
	}
	const double kept = 1.0 / (1.0 - rate);
	for (Index j = 0; j < mask.cols(); ++j) {
		for (Index i = 0; i < mask.rows(); ++i) {
			mask(i, j) = rng.uniform() < rate ? 0.0 : kept;
		}
	}
	return mask;
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
	if (predictions.empty() || predictions.size() != targets.size()) {
		throw std::invalid_argument("mse_loss: need equal non-zero lengths");
	}
	double sum = 0.0;
	for (std::size_t i = 0; i < predictions.size(); ++i) {
		const double r = predictions[i] - targets[i];
		sum += r * r;
	}
	return sum / static_cast<double>(predictions.size());
}

LstmParams backward(const ForwardCache &cache, std::span<const double> targets, const LstmParams &params) {
	const Index h = idx(params.hidden_size()), d = idx(params.input_size());
	const Index batch = cache.predictions.size();
	if (static_cast<std::size_t>(batch) != targets.size() || cache.steps.size() != cache.seq_len ||
	    cache.steps.empty() || cache.h_out.rows() != h || cache.steps.front().input.rows() != d + h) {
		throw std::invalid_argument("backward: cache does not match the parameters or targets");
	}

	LstmParams grad(params.hidden_size(), params.input_size());
	const Eigen::Map<const Eigen::VectorXd> y(targets.data(), batch);
	const Eigen::VectorXd dpred = (cache.predictions - y) * (2.0 / static_cast<double>(batch));

	grad.dense_weights() = cache.h_out * dpred;
	grad.dense_bias() = dpred.sum();

	Eigen::MatrixXd dh = params.dense_weights() * dpred.transpose();
	if (cache.mask.size() != 0) {
		dh = dh.cwiseProduct(cache.mask);
	}
	Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(h, batch);
	Eigen::MatrixXd dz(4 * h, batch);
	auto dw = grad.gate_weights();
	auto db = grad.gate_biases();

	for (std::size_t t = cache.steps.size(); t-- > 0;) {
		const auto &step = cache.steps[t];
		const auto i = step.gates.middleRows(kInput * h, h).array();
		const auto f = step.gates.middleRows(kForget * h, h).array();
		const auto g = step.gates.middleRows(kCandidate * h, h).array();
		const auto o = step.gates.middleRows(kOutput * h, h).array();
		const auto tc = step.tanh_c.array();

		dc.array() += dh.array() * o * (1.0 - tc.square());
		dz.middleRows(kInput * h, h) = (dc.array() * g * i * (1.0 - i)).matrix();
		dz.middleRows(kForget * h, h) = (dc.array() * step.c_prev.array() * f * (1.0 - f)).matrix();
		dz.middleRows(kCandidate * h, h) = (dc.array() * i * (1.0 - g.square())).matrix();
		dz.middleRows(kOutput * h, h) = (dh.array() * tc * o * (1.0 - o)).matrix();

		dw.noalias() += dz * step.input.transpose();
		db += dz.rowwise().sum();
		dh = (params.gate_weights().rightCols(h).transpose() * dz).eval();
		dc = (dc.array() * f).matrix();
	}
	return grad;
}

void adam_step(std::span<double> params, std::span<const double> gradients, AdamState &state, double learning_rate) {
	if (params.size() != gradients.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
		throw std::invalid_argument("adam_step: parameter, gradient and state sizes differ");
	}
	++state.step;
	const double t = static_cast<double>(state.step);
	const double correct1 = 1.0 - std::pow(state.beta1, t);
	const double correct2 = 1.0 - std::pow(state.beta2, t);
	for (std::size_t k = 0; k < params.size(); ++k) {
		const double g = gradients[k];
		state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g;
		state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g * g;
		const double m_hat = state.m[k] / correct1;
		const double v_hat = state.v[k] / correct2;
		params[k] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
	}
}

void TrainingLog::write_csv(std::ostream &out) const {
	out << "epoch,train_loss,val_loss\n";
	for (std::size_t e = 0; e < train_loss.size(); ++e) {
		out << e + 1 << ',' << format_double(train_loss[e]) << ',';
		if (e < validation_loss.size()) {
			out << format_double(validation_loss[e]);
		}
		out << '\n';
	}
}

namespace {

void check_dataset(const data::WindowedDataset &ds, const LstmConfig &config, const char *what) {
	if (ds.size() == 0) {
		throw std::invalid_argument(std::string("train: ") + what + " set is empty");
	}
	if (ds.lookback != config.window_length() || ds.inputs.size() != ds.size() * ds.lookback) {
		throw std::invalid_argument(std::string("train: ") + what + " windows have length " +
		                            std::to_string(ds.lookback) + ", config expects " +
		                            std::to_string(config.window_length()));
	}
}

TrainResult train_impl(const data::WindowedDataset &train_set, const data::WindowedDataset *validation_set,
                       const LstmConfig &config, const EpochCallback &on_epoch) {
	config.validate();
	check_dataset(train_set, config, "training");
	if (validation_set) {
		check_dataset(*validation_set, config, "validation");
	}

	TrainResult result{init_params(config, config.seed), AdamState{}, {}};
	result.adam = AdamState(result.params.size());
	// Shuffling and dropout draw from their own stream so that changing the
	// data size never perturbs the initial weights.
	Rng rng(config.seed ^ 0x5DEECE66DULL);

	const std::size_t n = train_set.size();
	const std::size_t width = config.window_length();
	std::vector<std::size_t> order(n);
	std::iota(order.begin(), order.end(), 0);

	Eigen::MatrixXd windows;
	std::vector<double> targets;
	for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
		for (std::size_t k = n; k > 1; --k) {
			std::swap(order[k - 1], order[rng.below(k)]);
		}

		double loss_sum = 0.0;
		std::size_t batches = 0;
		for (std::size_t start = 0; start < n; start += config.batch_size) {
			const std::size_t b = std::min(config.batch_size, n - start);
			windows.resize(idx(width), idx(b));
			targets.resize(b);
			for (std::size_t j = 0; j < b; ++j) {
				const auto in = train_set.input(order[start + j]);
				std::copy(in.begin(), in.end(), windows.col(idx(j)).data());
				targets[j] = train_set.targets[order[start + j]];
			}

			Eigen::MatrixXd mask;
			const Eigen::MatrixXd *mask_ptr = nullptr;
			if (config.dropout_rate > 0.0) {
				mask = dropout_mask(config.hidden_size, b, config.dropout_rate, rng);
				mask_ptr = &mask;
			}
			const auto cache = forward(windows, config.seq_len, result.params, mask_ptr);
			const double loss =
			    mse_loss({cache.predictions.data(), static_cast<std::size_t>(cache.predictions.size())}, targets);
			++batches;
			if (!std::isfinite(loss)) {
				throw NumericalError("training diverged: non-finite loss at epoch " + std::to_string(epoch) +
				                     ", batch " + std::to_string(batches));
			}
			loss_sum += loss;
			const auto grad = backward(cache, targets, result.params);
			adam_step(result.params.values(), grad.values(), result.adam, config.learning_rate);
		}

		const double train_loss = loss_sum / static_cast<double>(batches);
		result.log.train_loss.push_back(train_loss);
		double validation_loss = std::nan("");
		if (validation_set) {
			const auto pred = predict_windows(result.params, *validation_set, config.seq_len);
			validation_loss = mse_loss(pred, validation_set->targets);
			if (!std::isfinite(validation_loss)) {
				throw NumericalError("training diverged: non-finite validation loss at epoch " +
				                     std::to_string(epoch));
			}
			result.log.validation_loss.push_back(validation_loss);
		}
		if (on_epoch) {
			on_epoch(epoch, train_loss, validation_loss);
		}
	}
	return result;
}

} // namespace

TrainResult train(const data::WindowedDataset &train_set, const LstmConfig &config, const EpochCallback &on_epoch) {
	return train_impl(train_set, nullptr, config, on_epoch);
}

TrainResult train(const data::WindowedDataset &train_set, const data::WindowedDataset &validation_set,
                  const LstmConfig &config, const EpochCallback &on_epoch) {
	return train_impl(train_set, &validation_set, config, on_epoch);
}

std::vector<double> predict_windows(const LstmParams &params, const data::WindowedDataset &dataset,
                                    std::size_t seq_len) {
	constexpr std::size_t kChunk = 1024;
	const std::size_t n = dataset.size();
	const std::size_t width = dataset.lookback;
	std::vector<double> out;
	out.reserve(n);
	for (std::size_t start = 0; start < n; start += kChunk) {
		const std::size_t b = std::min(kChunk, n - start);
		const Eigen::Map<const Eigen::MatrixXd> windows(dataset.inputs.data() + start * width, idx(width), idx(b));
		const auto cache = forward(windows, seq_len, params);
		out.insert(out.end(), cache.predictions.data(), cache.predictions.data() + b);
	}
	return out;
}

std::vector<double> predict_series(const LstmParams &params, std::span<const double> scaled_history,
                                   std::size_t test_length, const LstmConfig &config,
                                   const data::ScalerParams &scaler, EvalMode mode) {
	const std::size_t width = config.window_length();
	if (scaled_history.size() < test_length + width) {
		throw std::invalid_argument("predict_series: history of " + std::to_string(scaled_history.size()) +
		                            " points cannot cover " + std::to_string(test_length) +
		                            " test points with a window of " + std::to_string(width));
	}
	const std::size_t first = scaled_history.size() - test_length;
	std::vector<double> scaled;
	scaled.reserve(test_length);
	if (mode == EvalMode::Rolling) {
		if (test_length > 0) {
			const auto windows = data::make_windows(scaled_history.subspan(first - width), width);
			scaled = predict_windows(params, windows, config.seq_len);
		}
	} else {
		std::vector<double> buffer(scaled_history.begin() + static_cast<std::ptrdiff_t>(first - width),
		                           scaled_history.begin() + static_cast<std::ptrdiff_t>(first));
		for (std::size_t k = 0; k < test_length; ++k) {
			const double next = network_forward(buffer, config.seq_len, params);
			scaled.push_back(next);
			buffer.erase(buffer.begin());
			buffer.push_back(next);
		}
	}
	return data::inverse_scale(scaled, scaler);
}

} // namespace gridcast::lstm
