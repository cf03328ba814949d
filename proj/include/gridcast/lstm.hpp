#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gridcast/data.hpp"
#include "gridcast/forecast.hpp"
#include "gridcast/rng.hpp"

namespace gridcast::lstm {

/// Single-layer LSTM -> dropout -> dense(1) regressor.
///
/// A window of length seq_len * input_size is fed as seq_len steps of
/// input_size features. The defaults take the 25-hour window as one
/// 25-feature step, which gives 50400 recurrent and 101 dense parameters.
struct LstmConfig {
	std::size_t hidden_size = 100;
	std::size_t input_size = 25;
	std::size_t seq_len = 1;
	double dropout_rate = 0.2;
	std::size_t epochs = 50;
	std::size_t batch_size = 70;
	double learning_rate = 1e-3;
	std::uint64_t seed = 42;

	std::size_t window_length() const { return seq_len * input_size; }
	void validate() const;
};

struct ParamCount {
	std::size_t recurrent = 0;
	std::size_t dense = 0;

	std::size_t total() const { return recurrent + dense; }
	bool operator==(const ParamCount &) const = default;
};

ParamCount param_count(const LstmConfig &config);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// All trainable values in one flat buffer:
///   gate weights  4H x (D+H), row-major, gate blocks [i; f; g; o] over [x_t; h_{t-1}]
///   gate biases   4H
///   dense weights H
///   dense bias    1
/// Gradients use the same type, so shapes always agree.
class LstmParams {
public:
	LstmParams() = default;
	LstmParams(std::size_t hidden_size, std::size_t input_size);

	std::size_t hidden_size() const { return hidden_; }
	std::size_t input_size() const { return input_; }
	std::size_t size() const { return values_.size(); }

	std::span<double> values() { return values_; }
	std::span<const double> values() const { return values_; }

	Eigen::Map<RowMatrix> gate_weights();
	Eigen::Map<const RowMatrix> gate_weights() const;
	Eigen::Map<Eigen::VectorXd> gate_biases();
	Eigen::Map<const Eigen::VectorXd> gate_biases() const;
	Eigen::Map<Eigen::VectorXd> dense_weights();
	Eigen::Map<const Eigen::VectorXd> dense_weights() const;
	double &dense_bias() { return values_.back(); }
	double dense_bias() const { return values_.back(); }

	bool operator==(const LstmParams &) const = default;

private:
	std::size_t hidden_ = 0;
	std::size_t input_ = 0;
	std::vector<double> values_;

	std::size_t weight_count() const { return 4 * hidden_ * (input_ + hidden_); }
};

enum Gate : std::size_t { kInput = 0, kForget = 1, kCandidate = 2, kOutput = 3 };

/// Uniform +-sqrt(6 / (fan_in + fan_out)) per block (input weights,
/// recurrent weights, dense head); biases zero except forget gate = 1.
LstmParams init_params(const LstmConfig &config, std::uint64_t seed);

struct LstmState {
	Eigen::VectorXd h;
	Eigen::VectorXd c;
};

// Hidden and cell state for a batch, one column per sample.
struct BatchState {
	Eigen::MatrixXd h;
	Eigen::MatrixXd c;

	static BatchState zeros(std::size_t hidden, std::size_t batch);
};

// Everything the backward pass needs from one time step.
struct StepCache {
	Eigen::MatrixXd input;  // (D+H) x B, the concatenation [x_t; h_{t-1}]
	Eigen::MatrixXd gates;  // 4H x B, post-activation i, f, g, o
	Eigen::MatrixXd c_prev; // H x B
	Eigen::MatrixXd tanh_c; // H x B
};

std::pair<BatchState, StepCache> cell_forward(const Eigen::MatrixXd &x, const BatchState &state,
                                              const LstmParams &params);
std::pair<LstmState, StepCache> cell_forward(std::span<const double> x, const LstmState &state,
                                             const LstmParams &params);

struct ForwardCache {
	std::size_t seq_len = 0;
	std::vector<StepCache> steps;
	Eigen::MatrixXd mask;     // H x B inverted-dropout mask, empty when disabled
	Eigen::MatrixXd h_out;    // H x B, final hidden state after dropout
	Eigen::VectorXd predictions;
};

/// Batched forward pass. `windows` is (T*D) x B, one window per column.
ForwardCache forward(const Eigen::MatrixXd &windows, std::size_t seq_len, const LstmParams &params,
                     const Eigen::MatrixXd *dropout_mask = nullptr);

/// Single-window prediction. The mask, when given, has one entry per hidden unit.
double network_forward(std::span<const double> window, std::size_t seq_len, const LstmParams &params,
                       std::span<const double> dropout_mask = {});

/// Inverted dropout: each entry is 0 with probability `rate`, else 1 / (1 - rate).
Eigen::MatrixXd dropout_mask(std::size_t hidden, std::size_t batch, double rate, Rng &rng);

double mse_loss(std::span<const double> predictions, std::span<const double> targets);

/// Exact gradient of the batch-mean squared error through the dense head,
/// dropout and every time step.
LstmParams backward(const ForwardCache &cache, std::span<const double> targets, const LstmParams &params);

struct AdamState {
	std::vector<double> m;
	std::vector<double> v;
	std::uint64_t step = 0;
	double beta1 = 0.9;
	double beta2 = 0.999;
	double epsilon = 1e-8;

	AdamState() = default;
	explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
	bool operator==(const AdamState &) const = default;
};

void adam_step(std::span<double> params, std::span<const double> gradients, AdamState &state, double learning_rate);

struct TrainingLog {
	std::vector<double> train_loss;      // epoch mean of minibatch losses (dropout active)
	std::vector<double> validation_loss; // full held-out MSE, dropout off; empty without validation

	void write_csv(std::ostream &out) const;
};

struct TrainResult {
	LstmParams params;
	AdamState adam;
	TrainingLog log;
};

using EpochCallback = std::function<void(std::size_t epoch, double train_loss, double validation_loss)>;

/// Minibatch Adam on batch-mean MSE. Each epoch reshuffles with the seeded
/// generator; the last partial batch is trained. Throws NumericalError on a
/// non-finite loss.
TrainResult train(const data::WindowedDataset &train_set, const LstmConfig &config, const EpochCallback &on_epoch = {});
TrainResult train(const data::WindowedDataset &train_set, const data::WindowedDataset &validation_set,
                  const LstmConfig &config, const EpochCallback &on_epoch = {});

/// Scaled predictions for every window of a dataset, dropout off.
std::vector<double> predict_windows(const LstmParams &params, const data::WindowedDataset &dataset,
                                    std::size_t seq_len);

/// One-step predictions for the last `test_length` points of `scaled_history`,
/// returned in MWh. Rolling mode reads true windows; static mode feeds
/// predictions back into the window.
std::vector<double> predict_series(const LstmParams &params, std::span<const double> scaled_history,
                                   std::size_t test_length, const LstmConfig &config,
                                   const data::ScalerParams &scaler, EvalMode mode = EvalMode::Rolling);

// Checkpoints

inline constexpr int kCheckpointSchemaVersion = 1;

struct Checkpoint {
	LstmConfig config;
	LstmParams params;
	std::optional<AdamState> adam;
	std::optional<data::ScalerParams> scaler;
};

nlohmann::json to_json(const Checkpoint &checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json &j);
void save_checkpoint(const Checkpoint &checkpoint, const std::filesystem::path &path);
Checkpoint load_checkpoint(const std::filesystem::path &path);

} // namespace gridcast::lstm
