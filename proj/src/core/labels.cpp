// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/labels.hpp"

#include <cmath>

#include "core/error.hpp"

namespace gvae {

const char *LabelKindName(LabelKind kind) {
  return kind == LabelKind::kVad ? "VAD" : "IBM";
}

LabelSeq VadLabels(const PowerSpec &clean_power, double floor_db) {
  if (!(floor_db < 0.0))
    Fail(ErrorCode::kInvalidArgument, "vad floor_db must be negative");
  if (clean_power.frames() < 1)
    Fail(ErrorCode::kInvalidArgument, "empty power spectrogram");
  const Eigen::VectorXd energy = clean_power.data.rowwise().sum();
  const double peak = energy.maxCoeff();
  if (!(peak > 0.0)) Fail(ErrorCode::kInvalidArgument, "silent utterance");
  const double threshold = peak * std::pow(10.0, floor_db / 10.0);
  LabelSeq out;
  out.kind = LabelKind::kVad;
  out.values = (energy.array() >= threshold).cast<double>().matrix();
  return out;
}

LabelSeq IbmLabels(const PowerSpec &clean_power, const PowerSpec &noise_power) {
  if (clean_power.frames() != noise_power.frames() ||
      clean_power.bins() != noise_power.bins())
    Fail(ErrorCode::kInvalidArgument, "ibm: shape mismatch");
  LabelSeq out;
  out.kind = LabelKind::kIbm;
  out.values =
      (clean_power.data.array() > noise_power.data.array()).cast<double>();
  return out;
}

Standardizer::Standardizer(Eigen::VectorXd mean, Eigen::VectorXd std)
    : mean_(std::move(mean)), std_(std::move(std)) {
  if (mean_.size() != std_.size())
    Fail(ErrorCode::kInvalidArgument, "standardizer size mismatch");
  if ((std_.array() <= 0.0).any())
    Fail(ErrorCode::kInvalidArgument, "standardizer std must be positive");
}

Standardizer Standardizer::Fit(std::span<const PowerSpec> train) {
  if (train.empty()) Fail(ErrorCode::kInvalidArgument, "empty training set");
  const Eigen::Index bins = train.front().bins();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(bins);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(bins);
  double count = 0.0;
  for (const PowerSpec &p : train) {
    if (p.bins() != bins)
      Fail(ErrorCode::kInvalidArgument, "inconsistent bin counts");
    const Eigen::ArrayXXd logp = (p.data.array() + kLogPowerFloor).log();
    sum += logp.colwise().sum().matrix().transpose();
    count += static_cast<double>(p.frames());
  }
  if (count == 0.0) Fail(ErrorCode::kInvalidArgument, "empty training set");
  Standardizer s;
  s.mean_ = sum / count;
  // Second pass for a numerically stable variance.
  for (const PowerSpec &p : train) {
    const Eigen::ArrayXXd logp = (p.data.array() + kLogPowerFloor).log();
    sq += (logp.rowwise() - s.mean_.transpose().array())
              .square()
              .colwise()
              .sum()
              .matrix()
              .transpose();
  }
  s.std_ = (sq / count).cwiseSqrt();
  for (Eigen::Index f = 0; f < bins; ++f) {
    if (s.std_(f) < kMinStd) {
      s.std_(f) = kMinStd;
      s.clamped_.push_back(f);
    }
  }
  return s;
}

Eigen::MatrixXd Standardizer::Apply(const PowerSpec &p) const {
  if (!fitted()) Fail(ErrorCode::kState, "standardizer not fitted");
  if (p.bins() != mean_.size())
    Fail(ErrorCode::kInvalidArgument, "standardizer bin count mismatch");
  Eigen::ArrayXXd logp = (p.data.array() + kLogPowerFloor).log();
  logp.rowwise() -= mean_.transpose().array();
  logp.rowwise() /= std_.transpose().array();
  return logp.matrix();
}

}  // namespace gvae
