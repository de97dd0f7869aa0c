// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace gvae {

const char *BackendName(ClassifierBackend b) {
  switch (b) {
    case ClassifierBackend::kNone: return "none";
    case ClassifierBackend::kDnnVad: return "dnn-vad";
    case ClassifierBackend::kDnnIbm: return "dnn-ibm";
    case ClassifierBackend::kSppIbm: return "spp-ibm";
    case ClassifierBackend::kOracle: return "oracle";
  }
  return "?";
}

ClassifierBackend ParseBackend(const std::string &name) {
  for (auto b : {ClassifierBackend::kNone, ClassifierBackend::kDnnVad,
                 ClassifierBackend::kDnnIbm, ClassifierBackend::kSppIbm,
                 ClassifierBackend::kOracle})
    if (name == BackendName(b)) return b;
  Fail(ErrorCode::kInvalidArgument, "unknown classifier backend '" + name +
                                        "' (dnn-vad|dnn-ibm|spp-ibm|oracle)");
}

ClassifierModel ClassifierModel::Build(LabelKind kind, int bins,
                                       std::uint64_t seed,
                                       const std::vector<int> &hidden) {
  std::vector<int> dims{bins};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(kind == LabelKind::kVad ? 1 : bins);
  std::vector<Activation> acts(hidden.size(), Activation::kRelu);
  acts.push_back(Activation::kSigmoid);
  ClassifierModel m;
  m.kind_ = kind;
  m.net_ = FeedForwardNet::Build(dims, acts, seed);
  return m;
}

Eigen::MatrixXd ClassifierModel::Probabilities(const PowerSpec &mixture) const {
  const Eigen::MatrixXd features = standardizer_.Apply(mixture);
  return net_.Forward(features.transpose()).transpose();
}

Checkpoint ClassifierModel::ToCheckpoint() const {
  if (!standardizer_.fitted())
    Fail(ErrorCode::kState, "standardizer not fitted");
  Checkpoint ck;
  ck.header["kind"] = "classifier";
  ck.header["labels"] = LabelKindName(kind_);
  ck.header["bins"] = std::to_string(bins());
  ck.AddNet("classifier", net_);
  ck.AddArray("standardizer.mean", standardizer_.mean());
  ck.AddArray("standardizer.std", standardizer_.std());
  return ck;
}

ClassifierModel ClassifierModel::FromCheckpoint(const Checkpoint &ck) {
  if (ck.Header("kind") != "classifier")
    Fail(ErrorCode::kFormat, "checkpoint is not a classifier");
  ClassifierModel m;
  m.kind_ = ck.Header("labels") == "IBM" ? LabelKind::kIbm : LabelKind::kVad;
  m.net_ = ck.Net("classifier");
  m.standardizer_ = Standardizer(ck.Array("standardizer.mean").col(0),
                                 ck.Array("standardizer.std").col(0));
  const int expected_out = m.kind_ == LabelKind::kVad ? 1 : m.bins();
  if (m.net_.output_dim() != expected_out ||
      m.standardizer_.mean().size() != m.bins())
    Fail(ErrorCode::kFormat, "classifier checkpoint is inconsistent");
  return m;
}

LabelSeq HardLabels(const Eigen::MatrixXd &probabilities, LabelKind kind) {
  LabelSeq out;
  out.kind = kind;
  out.values = (probabilities.array() > 0.5).cast<double>();
  return out;
}

Classification Classify(const ClassifierModel &model,
                        const PowerSpec &mixture) {
  Classification c;
  c.probabilities = model.Probabilities(mixture);
  c.labels = HardLabels(c.probabilities, model.kind());
  return c;
}

namespace {

void Flatten(const LabeledSet &set, const Standardizer &standardizer,
             Eigen::MatrixXd *features, Eigen::MatrixXd *targets) {
  if (set.mixtures.size() != set.labels.size())
    Fail(ErrorCode::kInvalidArgument, "mixtures and labels differ in count");
  Eigen::Index total = 0;
  for (const PowerSpec &p : set.mixtures) total += p.frames();
  const Eigen::Index bins = standardizer.mean().size();
  const Eigen::Index width = set.labels.empty() ? 0 : set.labels[0].dim();
  features->resize(bins, total);
  targets->resize(width, total);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < set.mixtures.size(); ++i) {
    const Eigen::Index n = set.mixtures[i].frames();
    if (set.labels[i].frames() != n || set.labels[i].dim() != width)
      Fail(ErrorCode::kInvalidArgument, "label shape does not match mixture");
    features->middleCols(at, n) =
        standardizer.Apply(set.mixtures[i]).transpose();
    targets->middleCols(at, n) = set.labels[i].values.transpose();
    at += n;
  }
}

}  // namespace

ClassifierModel TrainClassifier(
    LabelKind kind, const LabeledSet &train, const LabeledSet &valid,
    const TrainConfig &config, TrainHistory *history,
    std::function<void(const EpochRecord &)> on_epoch,
    const std::vector<int> &hidden) {
  if (train.mixtures.empty() || valid.mixtures.empty())
    Fail(ErrorCode::kInvalidArgument, "empty training or validation set");
  for (const LabelSeq &l : train.labels)
    if (l.kind != kind)
      Fail(ErrorCode::kInvalidArgument, "label kind does not match");
  const int bins = static_cast<int>(train.mixtures.front().bins());
  ClassifierModel model = ClassifierModel::Build(kind, bins, config.seed, hidden);
  model.set_standardizer(Standardizer::Fit(train.mixtures));

  Eigen::MatrixXd xt, yt, xv, yv;
  Flatten(train, model.standardizer(), &xt, &yt);
  Flatten(valid, model.standardizer(), &xv, &yv);
  if (yt.rows() != model.net().output_dim())
    Fail(ErrorCode::kInvalidArgument, "label width does not match classifier");

  FeedForwardNet &net = model.net();
  TrainingProblem problem;
  problem.train_size = static_cast<std::size_t>(xt.cols());
  problem.batch_loss = [&](std::span<const std::size_t> batch,
                           std::vector<NetGrad> &grads, std::mt19937_64 &) {
    const Eigen::Index b = static_cast<Eigen::Index>(batch.size());
    Eigen::MatrixXd x(xt.rows(), b), t(yt.rows(), b);
    for (Eigen::Index i = 0; i < b; ++i) {
      x.col(i) = xt.col(static_cast<Eigen::Index>(batch[i]));
      t.col(i) = yt.col(static_cast<Eigen::Index>(batch[i]));
    }
    ForwardCache cache;
    const Eigen::MatrixXd p = net.Forward(x, &cache);
    const double loss = BceLoss(p, t).loss;
    // Sigmoid and cross-entropy fused: d/d(pre) = (p - t) / count.
    const Eigen::MatrixXd dpre = (p - t) / static_cast<double>(p.size());
    net.Backward(cache, dpre, &grads[0], true);
    return loss;
  };
  problem.validation_loss = [&]() {
    return BceLoss(net.Forward(xv), yv).loss;
  };
  problem.on_epoch = std::move(on_epoch);
  TrainHistory h = Train({&net}, problem, config);
  if (history != nullptr) *history = std::move(h);
  return model;
}

SppResult SppIbm(const PowerSpec &mixture, const SppConfig &config) {
  const Eigen::Index frames = mixture.frames();
  const Eigen::Index bins = mixture.bins();
  if (frames < 1) Fail(ErrorCode::kInvalidArgument, "spp: empty input");
  const double xi = std::pow(10.0, config.prior_snr_db / 10.0);
  const double p1 = config.speech_prior;
  const double odds = (1.0 - p1) / p1 * (1.0 + xi);
  const double gain = xi / (1.0 + xi);
  const double alpha = config.psd_smoothing;

  SppResult out;
  out.presence.resize(frames, bins);
  Eigen::ArrayXd noise = Eigen::ArrayXd::Zero(bins);
  Eigen::ArrayXd running = Eigen::ArrayXd::Zero(bins);
  for (Eigen::Index n = 0; n < frames; ++n) {
    const Eigen::ArrayXd x = mixture.data.row(n).transpose().array();
    if (n < config.init_frames) {
      running += x;
      noise = (running / static_cast<double>(n + 1)).max(config.psd_floor);
    }
    const Eigen::ArrayXd spp =
        1.0 / (1.0 + odds * (-(x / noise) * gain).exp());
    out.presence.row(n) = spp.transpose().matrix();
    if (n >= config.init_frames) {
      noise = alpha * noise +
              (1.0 - alpha) * ((1.0 - spp) * x + spp * noise);
      noise = noise.max(config.psd_floor);
    }
  }
  out.labels = HardLabels(out.presence, LabelKind::kIbm);
  return out;
}

LabelSeq OracleLabels(LabelKind kind, const PowerSpec &clean,
                      const PowerSpec &noise, double vad_floor_db) {
  return kind == LabelKind::kVad ? VadLabels(clean, vad_floor_db)
                                 : IbmLabels(clean, noise);
}

}  // namespace gvae
