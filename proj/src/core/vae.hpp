// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_VAE_HPP_
#define GVAE_CORE_VAE_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/checkpoint.hpp"
#include "core/nn.hpp"

namespace gvae {

enum class VaeVariant { kM1, kM2Vad, kM2Ibm };

const char *VariantName(VaeVariant v);
VaeVariant ParseVariant(const std::string &name);
bool IsGuided(VaeVariant v);

/// Label width c: 0 for M1, 1 for VAD guidance, F for IBM guidance.
int LabelDim(VaeVariant v, int bins);

struct VaeArchitecture {
  VaeVariant variant = VaeVariant::kM1;
  int bins = 513;
  int latent_dim = 16;
  std::vector<int> hidden = {128, 128};
};

/// Diagonal Gaussian over the latent, kept as mean and log-variance.
struct GaussianPosterior {
  Eigen::VectorXd mean;
  Eigen::VectorXd log_var;

  Eigen::VectorXd variance() const { return log_var.array().exp().matrix(); }
};

/// Batched encoder output, D x B each.
struct EncoderOutput {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd log_var;
};

/// Speech prior: recognition model (shared tanh trunk feeding a mean head
/// and a log-variance head) and a generative model whose exp output layer
/// yields per-bin speech variances. Guided variants concatenate the label
/// to the power spectrum at the encoder input and to the latent at the
/// decoder input.
class VaeModel {
 public:
  VaeModel() = default;

  static VaeModel Build(const VaeArchitecture &arch, std::uint64_t seed);
  static VaeModel Build(VaeVariant variant, int bins = 513,
                        int latent_dim = 16, std::uint64_t seed = 0);

  /// power: F x B raw power (|s|^2). labels: c x B, required iff guided.
  EncoderOutput EncodeBatch(const Eigen::MatrixXd &power,
                            const Eigen::MatrixXd *labels) const;
  GaussianPosterior Encode(const Eigen::VectorXd &power,
                           const Eigen::VectorXd *label) const;

  /// z: D x B. Returns strictly positive variances, F x B.
  Eigen::MatrixXd DecodeBatch(const Eigen::MatrixXd &z,
                              const Eigen::MatrixXd *labels) const;
  Eigen::VectorXd Decode(const Eigen::VectorXd &z,
                         const Eigen::VectorXd *label) const;

  VaeVariant variant() const { return variant_; }
  int bins() const { return bins_; }
  int latent_dim() const { return latent_dim_; }
  int label_dim() const { return LabelDim(variant_, bins_); }
  std::size_t ParameterCount() const;

  FeedForwardNet &trunk() { return trunk_; }
  FeedForwardNet &mean_head() { return mean_head_; }
  FeedForwardNet &logvar_head() { return logvar_head_; }
  FeedForwardNet &decoder() { return decoder_; }
  const FeedForwardNet &trunk() const { return trunk_; }
  const FeedForwardNet &mean_head() const { return mean_head_; }
  const FeedForwardNet &logvar_head() const { return logvar_head_; }
  const FeedForwardNet &decoder() const { return decoder_; }

  /// Trainable networks in gradient order: trunk, mean, log-var, decoder.
  NetList Params();

  Checkpoint ToCheckpoint() const;
  static VaeModel FromCheckpoint(const Checkpoint &ck);

  /// Throws unless labels are present exactly when the variant is guided
  /// and have the right width and batch size.
  void CheckLabels(const Eigen::MatrixXd *labels, Eigen::Index batch) const;

 private:
  VaeVariant variant_ = VaeVariant::kM1;
  int bins_ = 0;
  int latent_dim_ = 0;
  FeedForwardNet trunk_;
  FeedForwardNet mean_head_;
  FeedForwardNet logvar_head_;
  FeedForwardNet decoder_;
};

/// Reparameterized draw z = mean + sqrt(variance) * eps, eps ~ N(0, I).
Eigen::VectorXd SampleLatent(const GaussianPosterior &post,
                             std::mt19937_64 &rng);

Eigen::MatrixXd StandardNormal(Eigen::Index rows, Eigen::Index cols,
                               std::mt19937_64 &rng);

struct ElboTerms {
  double loss = 0.0;
  double recon = 0.0;
  double kl = 0.0;
};

/// Negative ELBO averaged over the batch, one latent sample per frame with
/// the supplied noise `eps` (D x B):
///   recon = sum_f log v_f + s2_f / v_f
///   kl    = 0.5 * sum_d mu_d^2 + var_d - log var_d - 1
/// When `grads` is non-null it must hold one zeroed NetGrad per network in
/// Params() order; gradients are accumulated into it.
ElboTerms ElboLoss(const VaeModel &model, const Eigen::MatrixXd &power,
                   const Eigen::MatrixXd *labels, const Eigen::MatrixXd &eps,
                   std::vector<NetGrad> *grads);

/// Frames in columns: power F x N, labels c x N (empty for M1).
struct FrameSet {
  Eigen::MatrixXd power;
  Eigen::MatrixXd labels;

  Eigen::Index size() const { return power.cols(); }
};

TrainHistory TrainVae(VaeModel &model, const FrameSet &train,
                      const FrameSet &valid, const TrainConfig &config,
                      std::function<void(const EpochRecord &)> on_epoch = {});

}  // namespace gvae

#endif  // GVAE_CORE_VAE_HPP_
