// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/error.hpp"

namespace gvae {

const char *ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kExp: return "exp";
  }
  return "?";
}

Activation ActivationFromId(std::uint8_t id) {
  if (id > static_cast<std::uint8_t>(Activation::kExp))
    Fail(ErrorCode::kFormat, "unknown activation id " + std::to_string(id));
  return static_cast<Activation>(id);
}

void ApplyActivation(Activation a, Eigen::MatrixXd &m) {
  switch (a) {
    case Activation::kIdentity: break;
    case Activation::kTanh: {
      // Eigen's double tanh is scalar; this form vectorizes and stays
      // within a few ulp of std::tanh.
      const Eigen::ArrayXXd e = (-2.0 * m.array().abs()).exp();
      m = (((1.0 - e) / (1.0 + e)) * m.array().sign()).matrix();
      break;
    }
    case Activation::kRelu: m = m.cwiseMax(0.0); break;
    case Activation::kSigmoid:
      m = (1.0 / (1.0 + (-m.array()).exp())).matrix();
      break;
    case Activation::kExp: m = m.array().exp().matrix(); break;
  }
}

namespace {

// Derivative of the activation expressed through its output y.
void ScaleByDerivative(Activation a, const Eigen::MatrixXd &y,
                       Eigen::MatrixXd &delta) {
  switch (a) {
    case Activation::kIdentity: break;
    case Activation::kTanh:
      delta.array() *= 1.0 - y.array().square();
      break;
    case Activation::kRelu:
      delta.array() *= (y.array() > 0.0).cast<double>();
      break;
    case Activation::kSigmoid:
      delta.array() *= y.array() * (1.0 - y.array());
      break;
    case Activation::kExp: delta.array() *= y.array(); break;
  }
}

}  // namespace

FeedForwardNet::FeedForwardNet(std::vector<DenseLayer> layers)
    : layers_(std::move(layers)) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const DenseLayer &l = layers_[i];
    if (l.bias.size() != l.weight.rows())
      Fail(ErrorCode::kInvalidArgument, "bias size does not match weights");
    if (i > 0 && l.weight.cols() != layers_[i - 1].weight.rows())
      Fail(ErrorCode::kInvalidArgument, "layer dimensions do not chain");
  }
}

FeedForwardNet FeedForwardNet::Build(std::span<const int> dims,
                                     std::span<const Activation> activations,
                                     std::uint64_t seed) {
  if (dims.size() != activations.size() + 1)
    Fail(ErrorCode::kInvalidArgument, "need one more dim than activations");
  std::mt19937_64 rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i < activations.size(); ++i) {
    const int in = dims[i];
    const int out = dims[i + 1];
    if (in < 1 || out < 1)
      Fail(ErrorCode::kInvalidArgument, "layer dimensions must be positive");
    const double limit = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> u(-limit, limit);
    DenseLayer l;
    l.weight.resize(out, in);
    for (Eigen::Index r = 0; r < out; ++r)
      for (Eigen::Index c = 0; c < in; ++c) l.weight(r, c) = u(rng);
    l.bias = Eigen::VectorXd::Zero(out);
    l.activation = activations[i];
    layers.push_back(std::move(l));
  }
  return FeedForwardNet(std::move(layers));
}

Eigen::MatrixXd FeedForwardNet::Forward(const Eigen::MatrixXd &x,
                                        ForwardCache *cache) const {
  if (layers_.empty()) return x;
  if (x.rows() != input_dim())
    Fail(ErrorCode::kInvalidArgument,
         "input dimension " + std::to_string(x.rows()) + " != " +
             std::to_string(input_dim()));
  if (cache != nullptr) {
    cache->inputs.clear();
    cache->outputs.clear();
  }
  Eigen::MatrixXd h = x;
  for (const DenseLayer &l : layers_) {
    Eigen::MatrixXd z = l.weight * h;
    z.colwise() += l.bias;
    ApplyActivation(l.activation, z);
    if (cache != nullptr) {
      cache->inputs.push_back(std::move(h));
      cache->outputs.push_back(z);
    }
    h = std::move(z);
  }
  return h;
}

Eigen::MatrixXd FeedForwardNet::Backward(const ForwardCache &cache,
                                         const Eigen::MatrixXd &grad_output,
                                         NetGrad *grads,
                                         bool grad_is_preactivation) const {
  if (cache.inputs.size() != layers_.size() ||
      cache.outputs.size() != layers_.size())
    Fail(ErrorCode::kState, "backward called without a forward cache");
  if (grads != nullptr && grads->size() != layers_.size())
    Fail(ErrorCode::kInvalidArgument, "gradient buffer has wrong layout");
  Eigen::MatrixXd delta = grad_output;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const DenseLayer &l = layers_[k];
    if (delta.rows() != l.weight.rows() ||
        delta.cols() != cache.outputs[k].cols())
      Fail(ErrorCode::kInvalidArgument, "upstream gradient shape mismatch");
    if (!(grad_is_preactivation && k + 1 == layers_.size()))
      ScaleByDerivative(l.activation, cache.outputs[k], delta);
    if (grads != nullptr) {
      (*grads)[k].weight.noalias() += delta * cache.inputs[k].transpose();
      (*grads)[k].bias += delta.rowwise().sum();
    }
    delta = l.weight.transpose() * delta;
  }
  return delta;
}

NetGrad FeedForwardNet::ZeroGrad() const {
  NetGrad g(layers_.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    g[i].weight = Eigen::MatrixXd::Zero(layers_[i].weight.rows(),
                                        layers_[i].weight.cols());
    g[i].bias = Eigen::VectorXd::Zero(layers_[i].bias.size());
  }
  return g;
}

std::size_t FeedForwardNet::ParameterCount() const {
  std::size_t n = 0;
  for (const DenseLayer &l : layers_)
    n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool FeedForwardNet::AllFinite() const {
  for (const DenseLayer &l : layers_)
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

int FeedForwardNet::input_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols());
}

int FeedForwardNet::output_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows());
}

AdamState::AdamState(const AdamConfig &config, const NetList &nets)
    : config_(config) {
  for (const FeedForwardNet *net : nets) {
    first_.push_back(net->ZeroGrad());
    second_.push_back(net->ZeroGrad());
  }
}

void AdamState::Step(const NetList &nets, std::span<const NetGrad> grads) {
  if (nets.size() != first_.size() || grads.size() != nets.size())
    Fail(ErrorCode::kInvalidArgument, "adam: network list changed");
  for (std::size_t n = 0; n < nets.size(); ++n) {
    if (grads[n].size() != nets[n]->layers().size())
      Fail(ErrorCode::kInvalidArgument, "adam: gradient layout mismatch");
    for (const LayerGrad &g : grads[n])
      if (!g.weight.allFinite() || !g.bias.allFinite())
        Fail(ErrorCode::kNumeric, "diverged");
  }
  ++step_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double lr = config_.lr;
  const double eps = config_.eps;
  auto update = [&](auto &param, auto &m, auto &v, const auto &g) {
    m.array() = b1 * m.array() + (1.0 - b1) * g.array();
    v.array() = b2 * v.array() + (1.0 - b2) * g.array().square();
    param.array() -=
        lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t n = 0; n < nets.size(); ++n) {
    auto &layers = nets[n]->mutable_layers();
    for (std::size_t k = 0; k < layers.size(); ++k) {
      if (layers[k].weight.rows() != grads[n][k].weight.rows() ||
          layers[k].weight.cols() != grads[n][k].weight.cols())
        Fail(ErrorCode::kInvalidArgument, "adam: gradient shape mismatch");
      update(layers[k].weight, first_[n][k].weight, second_[n][k].weight,
             grads[n][k].weight);
      update(layers[k].bias, first_[n][k].bias, second_[n][k].bias,
             grads[n][k].bias);
    }
  }
}

LossAndGrad BceLoss(const Eigen::MatrixXd &p, const Eigen::MatrixXd &t) {
  if (p.rows() != t.rows() || p.cols() != t.cols())
    Fail(ErrorCode::kInvalidArgument, "bce: shape mismatch");
  LossAndGrad out;
  out.grad.resize(p.rows(), p.cols());
  const double count = static_cast<double>(p.size());
  if (count == 0) return out;
  double acc = 0.0;
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      const double raw = p(r, c);
      const double q =
          std::clamp(raw, kProbabilityClamp, 1.0 - kProbabilityClamp);
      const double y = t(r, c);
      acc -= y * std::log(q) + (1.0 - y) * std::log(1.0 - q);
      const bool clamped = raw < kProbabilityClamp ||
                           raw > 1.0 - kProbabilityClamp;
      out.grad(r, c) = clamped ? 0.0 : (-y / q + (1.0 - y) / (1.0 - q)) / count;
    }
  }
  out.loss = acc / count;
  return out;
}

namespace {

std::vector<std::vector<DenseLayer>> Snapshot(const NetList &nets) {
  std::vector<std::vector<DenseLayer>> s;
  for (const FeedForwardNet *n : nets) s.push_back(n->layers());
  return s;
}

void Restore(const NetList &nets,
             const std::vector<std::vector<DenseLayer>> &s) {
  for (std::size_t i = 0; i < nets.size(); ++i)
    nets[i]->mutable_layers() = s[i];
}

}  // namespace

TrainHistory Train(const NetList &nets, const TrainingProblem &problem,
                   const TrainConfig &config) {
  if (config.batch_size < 1)
    Fail(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  if (config.patience < 1)
    Fail(ErrorCode::kInvalidArgument, "patience must be >= 1");
  if (problem.train_size == 0)
    Fail(ErrorCode::kInvalidArgument, "empty training set");
  if (!problem.batch_loss || !problem.validation_loss)
    Fail(ErrorCode::kInvalidArgument, "training problem is incomplete");

  AdamConfig adam_cfg;
  adam_cfg.lr = config.lr;
  AdamState adam(adam_cfg, nets);
  std::mt19937_64 rng(config.seed);

  std::vector<std::size_t> order(problem.train_size);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainHistory history;
  history.best_valid_loss = std::numeric_limits<double>::infinity();
  auto best = Snapshot(nets);
  int since_best = 0;
  std::vector<NetGrad> grads;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double train_acc = 0.0;
    std::size_t seen = 0;
    bool failed = false;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t stop =
          std::min(order.size(), start + config.batch_size);
      std::span<const std::size_t> batch(order.data() + start, stop - start);
      grads.clear();
      for (const FeedForwardNet *n : nets) grads.push_back(n->ZeroGrad());
      const double loss = problem.batch_loss(batch, grads, rng);
      if (!std::isfinite(loss)) {
        failed = true;
        break;
      }
      try {
        adam.Step(nets, grads);
      } catch (const Error &e) {
        if (e.code() != ErrorCode::kNumeric) throw;
        failed = true;
        break;
      }
      train_acc += loss * static_cast<double>(batch.size());
      seen += batch.size();
    }
    if (failed) {
      history.diverged = true;
      history.stop_reason = "non-finite loss";
      break;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = train_acc / static_cast<double>(seen);
    rec.valid_loss = problem.validation_loss();
    history.epochs.push_back(rec);
    if (problem.on_epoch) problem.on_epoch(rec);
    if (!std::isfinite(rec.valid_loss)) {
      history.diverged = true;
      history.stop_reason = "non-finite validation loss";
      break;
    }
    if (rec.valid_loss < history.best_valid_loss) {
      history.best_valid_loss = rec.valid_loss;
      history.best_epoch = epoch;
      best = Snapshot(nets);
      since_best = 0;
    } else if (++since_best >= config.patience) {
      history.stop_reason = "early stopping";
      break;
    }
  }
  if (history.stop_reason.empty()) history.stop_reason = "max epochs";
  Restore(nets, best);
  return history;
}

}  // namespace gvae
