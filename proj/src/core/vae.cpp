// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/vae.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace gvae {
namespace {

Eigen::MatrixXd StackRows(const Eigen::MatrixXd &top,
                          const Eigen::MatrixXd *bottom) {
  if (bottom == nullptr) return top;
  Eigen::MatrixXd out(top.rows() + bottom->rows(), top.cols());
  out << top, *bottom;
  return out;
}

std::vector<int> Dims(int in, const std::vector<int> &hidden, int out) {
  std::vector<int> d{in};
  d.insert(d.end(), hidden.begin(), hidden.end());
  if (out > 0) d.push_back(out);
  return d;
}

// Fixed noise for validation so epoch-to-epoch comparisons are not
// dominated by sampling noise.
constexpr std::uint64_t kValidationNoiseSeed = 0x9e3779b97f4a7c15ULL;
constexpr Eigen::Index kValidationChunk = 4096;

}  // namespace

const char *VariantName(VaeVariant v) {
  switch (v) {
    case VaeVariant::kM1: return "M1";
    case VaeVariant::kM2Vad: return "M2-VAD";
    case VaeVariant::kM2Ibm: return "M2-IBM";
  }
  return "?";
}

VaeVariant ParseVariant(const std::string &name) {
  std::string n;
  for (char c : name) n.push_back(static_cast<char>(std::toupper(c)));
  std::replace(n.begin(), n.end(), '+', '-');
  std::replace(n.begin(), n.end(), '_', '-');
  if (n == "M1") return VaeVariant::kM1;
  if (n == "M2-VAD") return VaeVariant::kM2Vad;
  if (n == "M2-IBM") return VaeVariant::kM2Ibm;
  Fail(ErrorCode::kInvalidArgument, "unknown model variant '" + name + "'");
}

bool IsGuided(VaeVariant v) { return v != VaeVariant::kM1; }

int LabelDim(VaeVariant v, int bins) {
  switch (v) {
    case VaeVariant::kM1: return 0;
    case VaeVariant::kM2Vad: return 1;
    case VaeVariant::kM2Ibm: return bins;
  }
  return 0;
}

VaeModel VaeModel::Build(const VaeArchitecture &arch, std::uint64_t seed) {
  if (arch.bins < 1 || arch.latent_dim < 1 || arch.hidden.empty())
    Fail(ErrorCode::kInvalidArgument, "bad VAE architecture");
  const int c = LabelDim(arch.variant, arch.bins);
  VaeModel m;
  m.variant_ = arch.variant;
  m.bins_ = arch.bins;
  m.latent_dim_ = arch.latent_dim;
  const std::vector<int> trunk_dims = Dims(arch.bins + c, arch.hidden, 0);
  const std::vector<Activation> trunk_acts(arch.hidden.size(),
                                           Activation::kTanh);
  const int top = arch.hidden.back();
  const std::vector<int> head_dims{top, arch.latent_dim};
  const std::vector<Activation> head_acts{Activation::kIdentity};
  const std::vector<int> dec_dims =
      Dims(arch.latent_dim + c, arch.hidden, arch.bins);
  std::vector<Activation> dec_acts(arch.hidden.size(), Activation::kTanh);
  dec_acts.push_back(Activation::kExp);
  m.trunk_ = FeedForwardNet::Build(trunk_dims, trunk_acts, seed);
  m.mean_head_ = FeedForwardNet::Build(head_dims, head_acts, seed + 1);
  m.logvar_head_ = FeedForwardNet::Build(head_dims, head_acts, seed + 2);
  m.decoder_ = FeedForwardNet::Build(dec_dims, dec_acts, seed + 3);
  return m;
}

VaeModel VaeModel::Build(VaeVariant variant, int bins, int latent_dim,
                         std::uint64_t seed) {
  VaeArchitecture arch;
  arch.variant = variant;
  arch.bins = bins;
  arch.latent_dim = latent_dim;
  return Build(arch, seed);
}

void VaeModel::CheckLabels(const Eigen::MatrixXd *labels,
                           Eigen::Index batch) const {
  if (IsGuided(variant_) != (labels != nullptr))
    Fail(ErrorCode::kInvalidArgument,
         std::string("labels must be given iff the model is guided (") +
             VariantName(variant_) + ")");
  if (labels != nullptr &&
      (labels->rows() != label_dim() || labels->cols() != batch))
    Fail(ErrorCode::kInvalidArgument, "label dimensions do not match model");
}

EncoderOutput VaeModel::EncodeBatch(const Eigen::MatrixXd &power,
                                    const Eigen::MatrixXd *labels) const {
  if (power.rows() != bins_)
    Fail(ErrorCode::kInvalidArgument, "power frame has wrong bin count");
  CheckLabels(labels, power.cols());
  const Eigen::MatrixXd h = trunk_.Forward(StackRows(power, labels));
  return EncoderOutput{mean_head_.Forward(h), logvar_head_.Forward(h)};
}

GaussianPosterior VaeModel::Encode(const Eigen::VectorXd &power,
                                   const Eigen::VectorXd *label) const {
  Eigen::MatrixXd l;
  if (label != nullptr) l = *label;
  EncoderOutput out =
      EncodeBatch(power, label != nullptr ? &l : nullptr);
  return GaussianPosterior{out.mean.col(0), out.log_var.col(0)};
}

Eigen::MatrixXd VaeModel::DecodeBatch(const Eigen::MatrixXd &z,
                                      const Eigen::MatrixXd *labels) const {
  if (z.rows() != latent_dim_)
    Fail(ErrorCode::kInvalidArgument, "latent has wrong dimension");
  CheckLabels(labels, z.cols());
  return decoder_.Forward(StackRows(z, labels));
}

Eigen::VectorXd VaeModel::Decode(const Eigen::VectorXd &z,
                                 const Eigen::VectorXd *label) const {
  Eigen::MatrixXd l;
  if (label != nullptr) l = *label;
  return DecodeBatch(z, label != nullptr ? &l : nullptr).col(0);
}

std::size_t VaeModel::ParameterCount() const {
  return trunk_.ParameterCount() + mean_head_.ParameterCount() +
         logvar_head_.ParameterCount() + decoder_.ParameterCount();
}

NetList VaeModel::Params() {
  return {&trunk_, &mean_head_, &logvar_head_, &decoder_};
}

Checkpoint VaeModel::ToCheckpoint() const {
  Checkpoint ck;
  ck.header["kind"] = "vae";
  ck.header["variant"] = VariantName(variant_);
  ck.header["latent_dim"] = std::to_string(latent_dim_);
  ck.header["bins"] = std::to_string(bins_);
  ck.header["label_dim"] = std::to_string(label_dim());
  ck.AddNet("encoder.trunk", trunk_);
  ck.AddNet("encoder.mean", mean_head_);
  ck.AddNet("encoder.logvar", logvar_head_);
  ck.AddNet("decoder", decoder_);
  return ck;
}

VaeModel VaeModel::FromCheckpoint(const Checkpoint &ck) {
  if (ck.Header("kind") != "vae")
    Fail(ErrorCode::kFormat, "checkpoint is not a VAE");
  VaeModel m;
  m.variant_ = ParseVariant(ck.Header("variant"));
  m.latent_dim_ = std::stoi(ck.Header("latent_dim"));
  m.bins_ = std::stoi(ck.Header("bins"));
  m.trunk_ = ck.Net("encoder.trunk");
  m.mean_head_ = ck.Net("encoder.mean");
  m.logvar_head_ = ck.Net("encoder.logvar");
  m.decoder_ = ck.Net("decoder");
  const int c = m.label_dim();
  if (m.trunk_.input_dim() != m.bins_ + c ||
      m.decoder_.input_dim() != m.latent_dim_ + c ||
      m.decoder_.output_dim() != m.bins_ ||
      m.mean_head_.output_dim() != m.latent_dim_ ||
      m.logvar_head_.output_dim() != m.latent_dim_ ||
      m.mean_head_.input_dim() != m.trunk_.output_dim() ||
      m.logvar_head_.input_dim() != m.trunk_.output_dim())
    Fail(ErrorCode::kFormat, "VAE checkpoint has inconsistent dimensions");
  return m;
}

Eigen::MatrixXd StandardNormal(Eigen::Index rows, Eigen::Index cols,
                               std::mt19937_64 &rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = n(rng);
  return out;
}

Eigen::VectorXd SampleLatent(const GaussianPosterior &post,
                             std::mt19937_64 &rng) {
  const Eigen::VectorXd eps = StandardNormal(post.mean.size(), 1, rng);
  return post.mean +
         (0.5 * post.log_var.array()).exp().matrix().cwiseProduct(eps);
}

ElboTerms ElboLoss(const VaeModel &model, const Eigen::MatrixXd &power,
                   const Eigen::MatrixXd *labels, const Eigen::MatrixXd &eps,
                   std::vector<NetGrad> *grads) {
  if (power.rows() != model.bins())
    Fail(ErrorCode::kInvalidArgument, "power frame has wrong bin count");
  if ((power.array() < 0.0).any())
    Fail(ErrorCode::kInvalidArgument, "negative power");
  model.CheckLabels(labels, power.cols());
  const Eigen::Index batch = power.cols();
  if (eps.rows() != model.latent_dim() || eps.cols() != batch)
    Fail(ErrorCode::kInvalidArgument, "eps has wrong shape");
  if (batch == 0) return {};

  ForwardCache trunk_c, mean_c, logvar_c, dec_c;
  const Eigen::MatrixXd h =
      model.trunk().Forward(StackRows(power, labels), &trunk_c);
  const Eigen::MatrixXd mu = model.mean_head().Forward(h, &mean_c);
  const Eigen::MatrixXd lv = model.logvar_head().Forward(h, &logvar_c);
  const Eigen::ArrayXXd sd = (0.5 * lv.array()).exp();
  const Eigen::MatrixXd z = mu + (sd * eps.array()).matrix();
  const Eigen::MatrixXd v =
      model.decoder().Forward(StackRows(z, labels), &dec_c);

  const Eigen::ArrayXXd ratio = power.array() / v.array();
  const double recon = (v.array().log() + ratio).sum();
  const double kl =
      0.5 * (mu.array().square() + lv.array().exp() - lv.array() - 1.0).sum();
  const double inv_b = 1.0 / static_cast<double>(batch);
  ElboTerms terms{(recon + kl) * inv_b, recon * inv_b, kl * inv_b};
  if (grads == nullptr) return terms;
  if (grads->size() != 4)
    Fail(ErrorCode::kInvalidArgument, "elbo: expected 4 gradient buffers");

  // d(log v + s2/v)/dv = (1 - s2/v) / v; the exp layer multiplies by v.
  const Eigen::MatrixXd dv =
      ((1.0 - ratio) / v.array()).matrix() * inv_b;
  const Eigen::MatrixXd dzl = model.decoder().Backward(dec_c, dv, &(*grads)[3]);
  const Eigen::MatrixXd dz = dzl.topRows(model.latent_dim());
  const Eigen::MatrixXd dmu = dz + mu * inv_b;
  const Eigen::MatrixXd dlv =
      (dz.array() * eps.array() * 0.5 * sd +
       0.5 * (lv.array().exp() - 1.0) * inv_b)
          .matrix();
  Eigen::MatrixXd dh = model.mean_head().Backward(mean_c, dmu, &(*grads)[1]);
  dh += model.logvar_head().Backward(logvar_c, dlv, &(*grads)[2]);
  model.trunk().Backward(trunk_c, dh, &(*grads)[0]);
  return terms;
}

TrainHistory TrainVae(VaeModel &model, const FrameSet &train,
                      const FrameSet &valid, const TrainConfig &config,
                      std::function<void(const EpochRecord &)> on_epoch) {
  const bool guided = IsGuided(model.variant());
  if (train.size() == 0 || valid.size() == 0)
    Fail(ErrorCode::kInvalidArgument, "empty training or validation set");
  if (guided && (train.labels.cols() != train.size() ||
                 valid.labels.cols() != valid.size()))
    Fail(ErrorCode::kInvalidArgument, "guided VAE needs labels per frame");

  const int d = model.latent_dim();
  Eigen::MatrixXd valid_eps;
  {
    std::mt19937_64 rng(kValidationNoiseSeed ^ config.seed);
    valid_eps = StandardNormal(d, valid.size(), rng);
  }

  TrainingProblem problem;
  problem.train_size = static_cast<std::size_t>(train.size());
  problem.batch_loss = [&](std::span<const std::size_t> batch,
                           std::vector<NetGrad> &grads,
                           std::mt19937_64 &rng) {
    const Eigen::Index b = static_cast<Eigen::Index>(batch.size());
    Eigen::MatrixXd p(train.power.rows(), b);
    Eigen::MatrixXd l;
    if (guided) l.resize(train.labels.rows(), b);
    for (Eigen::Index i = 0; i < b; ++i) {
      p.col(i) = train.power.col(static_cast<Eigen::Index>(batch[i]));
      if (guided) l.col(i) = train.labels.col(static_cast<Eigen::Index>(batch[i]));
    }
    const Eigen::MatrixXd eps = StandardNormal(d, b, rng);
    return ElboLoss(model, p, guided ? &l : nullptr, eps, &grads).loss;
  };
  problem.validation_loss = [&]() {
    double acc = 0.0;
    for (Eigen::Index start = 0; start < valid.size();
         start += kValidationChunk) {
      const Eigen::Index n = std::min(kValidationChunk, valid.size() - start);
      const Eigen::MatrixXd p = valid.power.middleCols(start, n);
      Eigen::MatrixXd l;
      if (guided) l = valid.labels.middleCols(start, n);
      acc += ElboLoss(model, p, guided ? &l : nullptr,
                      valid_eps.middleCols(start, n), nullptr)
                 .loss *
             static_cast<double>(n);
    }
    return acc / static_cast<double>(valid.size());
  };
  problem.on_epoch = std::move(on_epoch);
  return Train(model.Params(), problem, config);
}

}  // namespace gvae
