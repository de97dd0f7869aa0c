// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_CLASSIFIER_HPP_
#define GVAE_CORE_CLASSIFIER_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/checkpoint.hpp"
#include "core/labels.hpp"
#include "core/nn.hpp"
#include "core/signal.hpp"

namespace gvae {

/// Where test-time labels for a guided model come from.
enum class ClassifierBackend { kNone, kDnnVad, kDnnIbm, kSppIbm, kOracle };

const char *BackendName(ClassifierBackend b);
ClassifierBackend ParseBackend(const std::string &name);

/// Noise-robust label estimator: standardized log-power of the mixture
/// through ReLU hidden layers to a sigmoid output of width 1 (VAD) or F
/// (IBM).
class ClassifierModel {
 public:
  ClassifierModel() = default;

  static ClassifierModel Build(LabelKind kind, int bins, std::uint64_t seed,
                               const std::vector<int> &hidden = {128, 128});

  /// Posterior probabilities, N x c.
  Eigen::MatrixXd Probabilities(const PowerSpec &mixture) const;

  LabelKind kind() const { return kind_; }
  int bins() const { return net_.input_dim(); }
  const FeedForwardNet &net() const { return net_; }
  FeedForwardNet &net() { return net_; }
  const Standardizer &standardizer() const { return standardizer_; }
  void set_standardizer(Standardizer s) { standardizer_ = std::move(s); }
  std::size_t ParameterCount() const { return net_.ParameterCount(); }

  Checkpoint ToCheckpoint() const;
  static ClassifierModel FromCheckpoint(const Checkpoint &ck);

 private:
  LabelKind kind_ = LabelKind::kVad;
  FeedForwardNet net_;
  Standardizer standardizer_;
};

/// Hard decision: 1 iff probability > 0.5.
LabelSeq HardLabels(const Eigen::MatrixXd &probabilities, LabelKind kind);

struct Classification {
  Eigen::MatrixXd probabilities;
  LabelSeq labels;
};

Classification Classify(const ClassifierModel &model,
                        const PowerSpec &mixture);

/// Paired mixture spectra and ground-truth labels.
struct LabeledSet {
  std::vector<PowerSpec> mixtures;
  std::vector<LabelSeq> labels;
};

/// Fits the standardizer on the training mixtures, then trains with mean
/// BCE (averaged over frames and, for IBM, bins).
ClassifierModel TrainClassifier(
    LabelKind kind, const LabeledSet &train, const LabeledSet &valid,
    const TrainConfig &config, TrainHistory *history = nullptr,
    std::function<void(const EpochRecord &)> on_epoch = {},
    const std::vector<int> &hidden = {128, 128});

/// Fixed configuration of the non-learned speech-presence estimator.
struct SppConfig {
  double prior_snr_db = 15.0;
  double speech_prior = 0.5;
  double psd_smoothing = 0.8;
  int init_frames = 5;
  double psd_floor = 1e-10;
};

struct SppResult {
  Eigen::MatrixXd presence;  // N x F speech presence probabilities
  LabelSeq labels;           // IBM, 1 iff presence > 0.5
};

/// Causal speech-presence-probability IBM estimator with recursive noise
/// PSD tracking. Frames before `init_frames` use the running mean of the
/// frames seen so far as the noise estimate.
SppResult SppIbm(const PowerSpec &mixture, const SppConfig &config = {});

/// Ground-truth labels computed from the clean and noise components.
LabelSeq OracleLabels(LabelKind kind, const PowerSpec &clean,
                      const PowerSpec &noise,
                      double vad_floor_db = kDefaultVadFloorDb);

}  // namespace gvae

#endif  // GVAE_CORE_CLASSIFIER_HPP_
