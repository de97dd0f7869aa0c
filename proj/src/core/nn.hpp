// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_NN_HPP_
#define GVAE_CORE_NN_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gvae {

// Ids are part of the checkpoint format.
enum class Activation : std::uint8_t {
  kIdentity = 0,
  kTanh = 1,
  kRelu = 2,
  kSigmoid = 3,
  kExp = 4,
};

const char *ActivationName(Activation a);
Activation ActivationFromId(std::uint8_t id);

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
  Activation activation = Activation::kIdentity;
};

struct LayerGrad {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};
using NetGrad = std::vector<LayerGrad>;

/// Per-layer inputs and post-activation outputs of one batched forward pass.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> outputs;
};

/// Dense feed-forward network. Batches are column-major: one sample per
/// column, so a batch of B inputs is an (in x B) matrix.
class FeedForwardNet {
 public:
  FeedForwardNet() = default;
  explicit FeedForwardNet(std::vector<DenseLayer> layers);

  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  /// `dims` has one more entry than `activations`.
  static FeedForwardNet Build(std::span<const int> dims,
                              std::span<const Activation> activations,
                              std::uint64_t seed);

  Eigen::MatrixXd Forward(const Eigen::MatrixXd &x,
                          ForwardCache *cache = nullptr) const;

  /// Reverse pass from dLoss/dOutput. Parameter gradients are accumulated
  /// into `grads` (when non-null); the gradient wrt the input is returned.
  /// With `grad_is_preactivation` the incoming gradient is taken wrt the
  /// last layer's pre-activation (fused sigmoid + cross-entropy).
  Eigen::MatrixXd Backward(const ForwardCache &cache,
                           const Eigen::MatrixXd &grad_output,
                           NetGrad *grads,
                           bool grad_is_preactivation = false) const;

  NetGrad ZeroGrad() const;
  std::size_t ParameterCount() const;
  bool AllFinite() const;

  int input_dim() const;
  int output_dim() const;
  bool empty() const { return layers_.empty(); }
  const std::vector<DenseLayer> &layers() const { return layers_; }
  std::vector<DenseLayer> &mutable_layers() { return layers_; }

 private:
  std::vector<DenseLayer> layers_;
};

void ApplyActivation(Activation a, Eigen::MatrixXd &m);

using NetList = std::vector<FeedForwardNet *>;

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam moments for a fixed list of networks, with bias correction.
class AdamState {
 public:
  AdamState(const AdamConfig &config, const NetList &nets);

  /// Throws Error(kNumeric, "diverged") on a non-finite gradient, leaving
  /// the parameters untouched.
  void Step(const NetList &nets, std::span<const NetGrad> grads);

  std::uint64_t steps() const { return step_; }
  const AdamConfig &config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<NetGrad> first_;
  std::vector<NetGrad> second_;
  std::uint64_t step_ = 0;
};

struct LossAndGrad {
  double loss = 0.0;
  Eigen::MatrixXd grad;
};

inline constexpr double kProbabilityClamp = 1e-7;

/// Mean binary cross-entropy over all entries; p clamped to
/// [1e-7, 1 - 1e-7]. The gradient is wrt p (zero where clamping is active).
LossAndGrad BceLoss(const Eigen::MatrixXd &p, const Eigen::MatrixXd &t);

struct TrainConfig {
  int batch_size = 128;
  double lr = 1e-3;
  int patience = 20;
  int max_epochs = 500;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double valid_loss = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_valid_loss = 0.0;
  bool diverged = false;
  std::string stop_reason;
};

/// What the training loop needs from a model: a mini-batch loss that fills
/// per-network gradients (already averaged over the batch) and a
/// deterministic validation loss.
struct TrainingProblem {
  std::size_t train_size = 0;
  std::function<double(std::span<const std::size_t> batch,
                       std::vector<NetGrad> &grads, std::mt19937_64 &rng)>
      batch_loss;
  std::function<double()> validation_loss;
  // Optional per-epoch progress hook.
  std::function<void(const EpochRecord &)> on_epoch;
};

/// Shuffled mini-batch Adam with early stopping on the validation loss. On
/// return the networks hold the parameters of the best validation epoch.
TrainHistory Train(const NetList &nets, const TrainingProblem &problem,
                   const TrainConfig &config);

}  // namespace gvae

#endif  // GVAE_CORE_NN_HPP_
