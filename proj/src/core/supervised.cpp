// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/supervised.hpp"

#include "core/error.hpp"

namespace gvae {

MaskNet MaskNet::Build(int bins, std::uint64_t seed,
                       const std::vector<int> &hidden) {
  std::vector<int> dims{bins};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(bins);
  std::vector<Activation> acts(hidden.size(), Activation::kRelu);
  acts.push_back(Activation::kSigmoid);
  MaskNet m;
  m.net_ = FeedForwardNet::Build(dims, acts, seed);
  return m;
}

Eigen::MatrixXd MaskNet::Mask(const PowerSpec &mixture) const {
  return net_.Forward(standardizer_.Apply(mixture).transpose()).transpose();
}

Checkpoint MaskNet::ToCheckpoint() const {
  if (!standardizer_.fitted())
    Fail(ErrorCode::kState, "standardizer not fitted");
  Checkpoint ck;
  ck.header["kind"] = "supervised";
  ck.header["bins"] = std::to_string(bins());
  ck.AddNet("mask", net_);
  ck.AddArray("standardizer.mean", standardizer_.mean());
  ck.AddArray("standardizer.std", standardizer_.std());
  return ck;
}

MaskNet MaskNet::FromCheckpoint(const Checkpoint &ck) {
  if (ck.Header("kind") != "supervised")
    Fail(ErrorCode::kFormat, "checkpoint is not a supervised mask model");
  MaskNet m;
  m.net_ = ck.Net("mask");
  m.standardizer_ = Standardizer(ck.Array("standardizer.mean").col(0),
                                 ck.Array("standardizer.std").col(0));
  if (m.net_.output_dim() != m.bins())
    Fail(ErrorCode::kFormat, "mask checkpoint is inconsistent");
  return m;
}

LossAndGrad MsaLoss(const Eigen::MatrixXd &mask,
                    const Eigen::MatrixXd &mixture_mag,
                    const Eigen::MatrixXd &clean_mag) {
  if (mask.rows() != mixture_mag.rows() || mask.cols() != mixture_mag.cols() ||
      mask.rows() != clean_mag.rows() || mask.cols() != clean_mag.cols())
    Fail(ErrorCode::kInvalidArgument, "msa: shape mismatch");
  LossAndGrad out;
  const double inv_b = mask.cols() > 0 ? 1.0 / static_cast<double>(mask.cols()) : 0.0;
  const Eigen::ArrayXXd err =
      mask.array() * mixture_mag.array() - clean_mag.array();
  out.loss = err.square().sum() * inv_b;
  out.grad = (2.0 * inv_b * err * mixture_mag.array()).matrix();
  return out;
}

Spectrogram ApplyMask(const Spectrogram &mixture, const Eigen::MatrixXd &mask) {
  if (mask.rows() != mixture.frames() || mask.cols() != mixture.bins())
    Fail(ErrorCode::kInvalidArgument, "mask shape does not match mixture");
  Spectrogram out = mixture;
  out.data = mixture.data.cwiseProduct(mask.cast<std::complex<double>>());
  return out;
}

Spectrogram EnhanceSupervised(const MaskNet &model, const Spectrogram &mixture) {
  return ApplyMask(mixture, model.Mask(Power(mixture)));
}

namespace {

struct Flat {
  Eigen::MatrixXd features;  // F x T standardized
  Eigen::MatrixXd mix_mag;   // F x T
  Eigen::MatrixXd clean_mag; // F x T
};

Flat Flatten(const MaskTrainingSet &set, const Standardizer &s) {
  if (set.mixtures.size() != set.clean_magnitudes.size())
    Fail(ErrorCode::kInvalidArgument, "mixtures and targets differ in count");
  Eigen::Index total = 0;
  for (const Spectrogram &x : set.mixtures) total += x.frames();
  const Eigen::Index bins = s.mean().size();
  Flat f;
  f.features.resize(bins, total);
  f.mix_mag.resize(bins, total);
  f.clean_mag.resize(bins, total);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < set.mixtures.size(); ++i) {
    const Spectrogram &x = set.mixtures[i];
    const Eigen::Index n = x.frames();
    if (set.clean_magnitudes[i].rows() != n ||
        set.clean_magnitudes[i].cols() != bins)
      Fail(ErrorCode::kInvalidArgument, "target shape does not match mixture");
    f.features.middleCols(at, n) = s.Apply(Power(x)).transpose();
    f.mix_mag.middleCols(at, n) = Magnitude(x).transpose();
    f.clean_mag.middleCols(at, n) = set.clean_magnitudes[i].transpose();
    at += n;
  }
  return f;
}

}  // namespace

MaskNet TrainMaskNet(const MaskTrainingSet &train,
                     const MaskTrainingSet &valid, const TrainConfig &config,
                     TrainHistory *history,
                     std::function<void(const EpochRecord &)> on_epoch,
                     const std::vector<int> &hidden) {
  if (train.mixtures.empty() || valid.mixtures.empty())
    Fail(ErrorCode::kInvalidArgument, "empty training or validation set");
  const int bins = static_cast<int>(train.mixtures.front().bins());
  MaskNet model = MaskNet::Build(bins, config.seed, hidden);
  std::vector<PowerSpec> powers;
  for (const Spectrogram &x : train.mixtures) powers.push_back(Power(x));
  model.set_standardizer(Standardizer::Fit(powers));
  const Flat tr = Flatten(train, model.standardizer());
  const Flat va = Flatten(valid, model.standardizer());

  FeedForwardNet &net = model.net();
  TrainingProblem problem;
  problem.train_size = static_cast<std::size_t>(tr.features.cols());
  problem.batch_loss = [&](std::span<const std::size_t> batch,
                           std::vector<NetGrad> &grads, std::mt19937_64 &) {
    const Eigen::Index b = static_cast<Eigen::Index>(batch.size());
    Eigen::MatrixXd x(tr.features.rows(), b), mm(tr.features.rows(), b),
        cm(tr.features.rows(), b);
    for (Eigen::Index i = 0; i < b; ++i) {
      const auto c = static_cast<Eigen::Index>(batch[i]);
      x.col(i) = tr.features.col(c);
      mm.col(i) = tr.mix_mag.col(c);
      cm.col(i) = tr.clean_mag.col(c);
    }
    ForwardCache cache;
    const Eigen::MatrixXd mask = net.Forward(x, &cache);
    const LossAndGrad lg = MsaLoss(mask, mm, cm);
    net.Backward(cache, lg.grad, &grads[0]);
    return lg.loss;
  };
  problem.validation_loss = [&]() {
    return MsaLoss(net.Forward(va.features), va.mix_mag, va.clean_mag).loss;
  };
  problem.on_epoch = std::move(on_epoch);
  TrainHistory h = Train({&net}, problem, config);
  if (history != nullptr) *history = std::move(h);
  return model;
}

}  // namespace gvae
