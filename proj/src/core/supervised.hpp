// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_SUPERVISED_HPP_
#define GVAE_CORE_SUPERVISED_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "core/checkpoint.hpp"
#include "core/labels.hpp"
#include "core/nn.hpp"
#include "core/signal.hpp"

namespace gvae {

/// Mask estimator: standardized mixture log-power through ReLU hidden
/// layers to a sigmoid mask over all bins.
class MaskNet {
 public:
  MaskNet() = default;

  static MaskNet Build(int bins, std::uint64_t seed,
                       const std::vector<int> &hidden = {128, 128, 128, 128,
                                                         128});

  /// N x F mask in (0, 1).
  Eigen::MatrixXd Mask(const PowerSpec &mixture) const;

  int bins() const { return net_.input_dim(); }
  const FeedForwardNet &net() const { return net_; }
  FeedForwardNet &net() { return net_; }
  const Standardizer &standardizer() const { return standardizer_; }
  void set_standardizer(Standardizer s) { standardizer_ = std::move(s); }
  std::size_t ParameterCount() const { return net_.ParameterCount(); }

  Checkpoint ToCheckpoint() const;
  static MaskNet FromCheckpoint(const Checkpoint &ck);

 private:
  FeedForwardNet net_;
  Standardizer standardizer_;
};

/// Magnitude spectrum approximation, frames in columns:
///   loss = 1/B sum_b sum_f (mask * |x| - |s|)^2
/// The gradient is wrt the mask.
LossAndGrad MsaLoss(const Eigen::MatrixXd &mask,
                    const Eigen::MatrixXd &mixture_mag,
                    const Eigen::MatrixXd &clean_mag);

/// Applies a real mask to the complex mixture (noisy phase kept).
Spectrogram ApplyMask(const Spectrogram &mixture, const Eigen::MatrixXd &mask);

Spectrogram EnhanceSupervised(const MaskNet &model, const Spectrogram &mixture);

struct MaskTrainingSet {
  std::vector<Spectrogram> mixtures;
  std::vector<Eigen::MatrixXd> clean_magnitudes;  // N x F each
};

MaskNet TrainMaskNet(const MaskTrainingSet &train,
                     const MaskTrainingSet &valid, const TrainConfig &config,
                     TrainHistory *history = nullptr,
                     std::function<void(const EpochRecord &)> on_epoch = {},
                     const std::vector<int> &hidden = {128, 128, 128, 128,
                                                       128});

}  // namespace gvae

#endif  // GVAE_CORE_SUPERVISED_HPP_
