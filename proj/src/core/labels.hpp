// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_LABELS_HPP_
#define GVAE_CORE_LABELS_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "core/signal.hpp"

namespace gvae {

enum class LabelKind { kVad, kIbm };

const char *LabelKindName(LabelKind kind);

/// Per-frame binary labels. VAD: N x 1. IBM: N x F. Entries are 0 or 1.
struct LabelSeq {
  LabelKind kind = LabelKind::kVad;
  Eigen::MatrixXd values;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index dim() const { return values.cols(); }
};

inline constexpr double kDefaultVadFloorDb = -40.0;

/// Frame n is active iff its summed power is within `floor_db` of the
/// loudest frame.
LabelSeq VadLabels(const PowerSpec &clean_power,
                   double floor_db = kDefaultVadFloorDb);

/// Bin (n, f) is 1 iff clean power strictly exceeds noise power.
LabelSeq IbmLabels(const PowerSpec &clean_power, const PowerSpec &noise_power);

inline constexpr double kLogPowerFloor = 1e-10;
inline constexpr double kMinStd = 1e-6;

/// Per-bin z-scoring of log(power + 1e-10), fitted on training data.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(Eigen::VectorXd mean, Eigen::VectorXd std);

  static Standardizer Fit(std::span<const PowerSpec> train);

  /// Returns standardized features, N x F.
  Eigen::MatrixXd Apply(const PowerSpec &p) const;

  bool fitted() const { return mean_.size() > 0; }
  const Eigen::VectorXd &mean() const { return mean_; }
  const Eigen::VectorXd &std() const { return std_; }
  // Bins whose standard deviation was clamped to 1e-6 during Fit.
  const std::vector<Eigen::Index> &clamped_bins() const { return clamped_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd std_;
  std::vector<Eigen::Index> clamped_;
};

}  // namespace gvae

#endif  // GVAE_CORE_LABELS_HPP_
