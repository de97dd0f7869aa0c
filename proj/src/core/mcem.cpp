// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/mcem.hpp"

#include <cmath>
#include <numbers>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace gvae {
namespace {

const double kLogPi = std::log(std::numbers::pi);
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void CheckShapes(const NmfState &nmf, const Eigen::MatrixXd &power,
                 const std::vector<Eigen::MatrixXd> &speech_var) {
  if (speech_var.empty())
    Fail(ErrorCode::kInvalidArgument, "need at least one kept sample");
  if (nmf.H.rows() != power.rows() || nmf.W.cols() != power.cols() ||
      nmf.H.cols() != nmf.W.rows() || nmf.g.size() != power.rows())
    Fail(ErrorCode::kInvalidArgument, "NMF state does not match mixture");
  for (const Eigen::MatrixXd &v : speech_var)
    if (v.rows() != power.rows() || v.cols() != power.cols())
      Fail(ErrorCode::kInvalidArgument, "speech variance shape mismatch");
}

}  // namespace

void ValidateMcemConfig(const McemConfig &cfg) {
  if (cfg.n_iters < 1) Fail(ErrorCode::kInvalidArgument, "mcem iters must be >= 1");
  if (cfg.samples < 1) Fail(ErrorCode::kInvalidArgument, "mcem samples must be >= 1");
  if (cfg.burn_in < 0) Fail(ErrorCode::kInvalidArgument, "mcem burn-in must be >= 0");
  if (!(cfg.proposal_std > 0.0))
    Fail(ErrorCode::kInvalidArgument, "mcem proposal std must be > 0");
  if (cfg.rank < 1) Fail(ErrorCode::kInvalidArgument, "NMF rank must be >= 1");
}

double LatentChain::AcceptanceRate() const {
  if (moves == 0 || accepted.size() == 0) return 0.0;
  return accepted.sum() / (static_cast<double>(moves) * accepted.size());
}

FrameDecoder::FrameDecoder(const VaeModel &model, const LabelSeq *labels,
                           Eigen::Index frames)
    : model_(model) {
  const DenseLayer &first = model.decoder().layers().front();
  first_offset_ = first.bias.replicate(1, frames);
  if (labels != nullptr) {
    const Eigen::MatrixXd lt = labels->values.transpose();
    model.CheckLabels(&lt, frames);
    first_offset_.noalias() +=
        first.weight.rightCols(model.label_dim()) * lt;
  } else {
    model.CheckLabels(nullptr, frames);
  }
}

Eigen::MatrixXd FrameDecoder::Variances(const Eigen::MatrixXd &z) const {
  const auto &layers = model_.decoder().layers();
  const DenseLayer &first = layers.front();
  if (z.rows() != model_.latent_dim() || z.cols() != first_offset_.cols())
    Fail(ErrorCode::kInvalidArgument, "latent batch has wrong shape");
  Eigen::MatrixXd h = first_offset_;
  h.noalias() += first.weight.leftCols(model_.latent_dim()) * z;
  ApplyActivation(first.activation, h);
  for (std::size_t k = 1; k < layers.size(); ++k) {
    Eigen::MatrixXd next = layers[k].weight * h;
    next.colwise() += layers[k].bias;
    ApplyActivation(layers[k].activation, next);
    h = std::move(next);
  }
  return h.transpose();
}

double MixtureLogLik(const Eigen::VectorXd &z, const Eigen::VectorXd &power,
                     const VaeModel &model, const Eigen::VectorXd *label,
                     const NmfState &nmf, Eigen::Index frame) {
  if (frame < 0 || frame >= nmf.H.rows())
    Fail(ErrorCode::kInvalidArgument, "frame index out of range");
  const Eigen::VectorXd v = model.Decode(z, label);
  const Eigen::VectorXd hw = (nmf.H.row(frame) * nmf.W).transpose();
  const Eigen::ArrayXd lambda =
      (nmf.g(frame) * v.array() + hw.array()).max(kNmfFloor);
  const double like =
      -(kLogPi + lambda.log()).sum() - (power.array() / lambda).sum();
  const double prior =
      -0.5 * static_cast<double>(z.size()) * kLog2Pi - 0.5 * z.squaredNorm();
  const double total = like + prior;
  if (!std::isfinite(total))
    Fail(ErrorCode::kNumeric, "non-finite mixture log-likelihood");
  return total;
}

Eigen::VectorXd FrameLogLik(const Eigen::MatrixXd &z,
                            const Eigen::MatrixXd &speech_var,
                            const Eigen::MatrixXd &power,
                            const NmfState &nmf) {
  return FrameLogLik(z, speech_var, power, nmf.g, nmf.NoiseVariance());
}

Eigen::VectorXd FrameLogLik(const Eigen::MatrixXd &z,
                            const Eigen::MatrixXd &speech_var,
                            const Eigen::MatrixXd &power,
                            const Eigen::VectorXd &g,
                            const Eigen::MatrixXd &hw) {
  // Column sweep: contiguous and free of N x F temporaries.
  const Eigen::Index frames = power.rows();
  Eigen::ArrayXd like =
      Eigen::ArrayXd::Constant(frames, -kLogPi * static_cast<double>(power.cols()));
  Eigen::ArrayXd lam(frames);
  for (Eigen::Index f = 0; f < power.cols(); ++f) {
    lam = (g.array() * speech_var.col(f).array() + hw.col(f).array()).max(kNmfFloor);
    like -= lam.log() + power.col(f).array() / lam;
  }
  const Eigen::VectorXd prior =
      (-0.5 * z.colwise().squaredNorm().array() -
       0.5 * static_cast<double>(z.rows()) * kLog2Pi)
          .transpose();
  return like.matrix() + prior;
}

void MhEStep(LatentChain &chain, const Eigen::MatrixXd &power,
             const FrameDecoder &decoder, const NmfState &nmf,
             const McemConfig &cfg) {
  const Eigen::Index frames = chain.z.cols();
  const Eigen::Index d = chain.z.rows();
  if (static_cast<Eigen::Index>(chain.rngs.size()) != frames ||
      power.rows() != frames)
    Fail(ErrorCode::kState, "latent chain is not initialized");
  const Eigen::MatrixXd hw = nmf.NoiseVariance();
  Eigen::VectorXd current = FrameLogLik(chain.z, chain.v, power, nmf.g, hw);
  chain.accepted = Eigen::VectorXd::Zero(frames);
  chain.moves = cfg.burn_in + cfg.samples;
  chain.kept_z.clear();
  chain.kept_v.clear();

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Eigen::MatrixXd proposal(d, frames);
  Eigen::VectorXd log_u(frames);
  for (int move = 0; move < chain.moves; ++move) {
    for (Eigen::Index n = 0; n < frames; ++n) {
      std::mt19937_64 &rng = chain.rngs[static_cast<std::size_t>(n)];
      for (Eigen::Index k = 0; k < d; ++k)
        proposal(k, n) = chain.z(k, n) + cfg.proposal_std * normal(rng);
      log_u(n) = std::log(uniform(rng));
    }
    const Eigen::MatrixXd v_prop = decoder.Variances(proposal);
    const Eigen::VectorXd ll_prop =
        FrameLogLik(proposal, v_prop, power, nmf.g, hw);
    for (Eigen::Index n = 0; n < frames; ++n) {
      // Accept with probability min(1, exp(delta)).
      if (log_u(n) < ll_prop(n) - current(n)) {
        chain.z.col(n) = proposal.col(n);
        chain.v.row(n) = v_prop.row(n);
        current(n) = ll_prop(n);
        chain.accepted(n) += 1.0;
      }
    }
    if (move >= cfg.burn_in) {
      chain.kept_z.push_back(chain.z);
      chain.kept_v.push_back(chain.v);
    }
  }
}

double McemObjective(const NmfState &nmf, const Eigen::MatrixXd &power,
                     const std::vector<Eigen::MatrixXd> &speech_var) {
  CheckShapes(nmf, power, speech_var);
  const Eigen::MatrixXd hw = nmf.NoiseVariance();
  double q = 0.0;
  Eigen::ArrayXd lam(power.rows());
  for (const Eigen::MatrixXd &v : speech_var) {
    for (Eigen::Index f = 0; f < power.cols(); ++f) {
      lam = (nmf.g.array() * v.col(f).array() + hw.col(f).array()).max(kNmfFloor);
      q += (lam.log() + power.col(f).array() / lam).sum();
    }
  }
  return q / static_cast<double>(speech_var.size());
}

void MStepUpdate(NmfState &nmf, const Eigen::MatrixXd &power,
                 const std::vector<Eigen::MatrixXd> &speech_var) {
  CheckShapes(nmf, power, speech_var);
  const Eigen::Index frames = power.rows();
  const Eigen::Index bins = power.cols();
  Eigen::MatrixXd inv1(frames, bins), inv2(frames, bins);
  Eigen::ArrayXd inv(frames);
  auto accumulate = [&] {
    const Eigen::MatrixXd hw = nmf.NoiseVariance();
    inv1.setZero();
    inv2.setZero();
    for (Eigen::Index f = 0; f < bins; ++f) {
      for (const Eigen::MatrixXd &v : speech_var) {
        inv = (nmf.g.array() * v.col(f).array() + hw.col(f).array())
                  .max(kNmfFloor)
                  .inverse();
        inv1.col(f).array() += inv;
        inv2.col(f).array() += inv.square();
      }
    }
  };
  constexpr double kTiny = 1e-300;

  accumulate();
  {
    const Eigen::MatrixXd weighted = power.cwiseProduct(inv2);
    const Eigen::ArrayXXd num = (weighted * nmf.W.transpose()).array();
    const Eigen::ArrayXXd den = (inv1 * nmf.W.transpose()).array().max(kTiny);
    nmf.H = (nmf.H.array() * (num / den).sqrt()).max(kNmfFloor).matrix();
  }
  accumulate();
  {
    const Eigen::MatrixXd weighted = power.cwiseProduct(inv2);
    const Eigen::ArrayXXd num = (nmf.H.transpose() * weighted).array();
    const Eigen::ArrayXXd den = (nmf.H.transpose() * inv1).array().max(kTiny);
    nmf.W = (nmf.W.array() * (num / den).sqrt()).max(kNmfFloor).matrix();
  }
  {
    const Eigen::MatrixXd hw = nmf.NoiseVariance();
    Eigen::ArrayXd num = Eigen::ArrayXd::Zero(frames);
    Eigen::ArrayXd den = Eigen::ArrayXd::Zero(frames);
    for (Eigen::Index f = 0; f < bins; ++f) {
      for (const Eigen::MatrixXd &v : speech_var) {
        inv = (nmf.g.array() * v.col(f).array() + hw.col(f).array())
                  .max(kNmfFloor)
                  .inverse();
        num += power.col(f).array() * v.col(f).array() * inv.square();
        den += v.col(f).array() * inv;
      }
    }
    nmf.g = (nmf.g.array() * (num / den.max(kTiny)).sqrt())
                .max(kNmfFloor)
                .matrix();
  }
}

McemResult InitMcem(const Eigen::MatrixXd &power, const VaeModel &model,
                    const LabelSeq *labels, const FrameDecoder &decoder,
                    const McemConfig &cfg) {
  const Eigen::Index frames = power.rows();
  const Eigen::Index bins = power.cols();
  if (bins != model.bins())
    Fail(ErrorCode::kInvalidArgument, "mixture bins do not match model");
  McemResult r;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  r.nmf.H.resize(frames, cfg.rank);
  r.nmf.W.resize(cfg.rank, bins);
  for (Eigen::Index i = 0; i < frames; ++i)
    for (Eigen::Index k = 0; k < cfg.rank; ++k)
      r.nmf.H(i, k) = std::max(u(rng), kNmfFloor);
  for (Eigen::Index k = 0; k < cfg.rank; ++k)
    for (Eigen::Index f = 0; f < bins; ++f)
      r.nmf.W(k, f) = std::max(u(rng), kNmfFloor);
  r.nmf.g = Eigen::VectorXd::Ones(frames);

  Eigen::MatrixXd lt;
  if (labels != nullptr) lt = labels->values.transpose();
  r.chain.z =
      model.EncodeBatch(power.transpose(), labels != nullptr ? &lt : nullptr)
          .mean;
  r.chain.v = decoder.Variances(r.chain.z);
  r.chain.rngs.reserve(static_cast<std::size_t>(frames));
  for (Eigen::Index n = 0; n < frames; ++n)
    r.chain.rngs.emplace_back(
        SplitMix64(cfg.seed ^ SplitMix64(static_cast<std::uint64_t>(n) + 1)));
  return r;
}

McemResult RunMcem(const Eigen::MatrixXd &power, const VaeModel &model,
                   const LabelSeq *labels, const McemConfig &cfg,
                   const std::function<void(const McemTraceRow &)> &on_iter) {
  ValidateMcemConfig(cfg);
  if ((power.array() < 0.0).any() || !power.allFinite())
    Fail(ErrorCode::kInvalidArgument, "mixture power must be finite and >= 0");
  if (IsGuided(model.variant()) != (labels != nullptr))
    Fail(ErrorCode::kInvalidArgument,
         "labels must be given iff the model is guided");
  const FrameDecoder decoder(model, labels, power.rows());
  McemResult r = InitMcem(power, model, labels, decoder, cfg);

  double prev_q = 0.0;
  int stalled = 0;
  for (int it = 1; it <= cfg.n_iters; ++it) {
    MhEStep(r.chain, power, decoder, r.nmf, cfg);
    MStepUpdate(r.nmf, power, r.chain.kept_v);
    const double q = McemObjective(r.nmf, power, r.chain.kept_v);
    if (!std::isfinite(q)) Fail(ErrorCode::kNumeric, "non-finite MCEM objective");
    McemTraceRow row{it, q, r.chain.AcceptanceRate()};
    r.trace.push_back(row);
    if (on_iter) on_iter(row);
    if (it > 1 && cfg.tolerance > 0.0 &&
        std::abs(q - prev_q) < cfg.tolerance * std::abs(q)) {
      if (++stalled >= cfg.stall_iters) break;
    } else {
      stalled = 0;
    }
    prev_q = q;
  }
  return r;
}

Eigen::MatrixXd WienerGain(const NmfState &nmf, const LatentChain &chain) {
  if (chain.kept_v.empty())
    Fail(ErrorCode::kState, "latent chain holds no kept samples");
  const Eigen::MatrixXd hw = nmf.NoiseVariance();
  Eigen::ArrayXXd gain = Eigen::ArrayXXd::Zero(hw.rows(), hw.cols());
  for (const Eigen::MatrixXd &v : chain.kept_v) {
    const Eigen::ArrayXXd speech = v.array().colwise() * nmf.g.array();
    gain += speech / (speech + hw.array());
  }
  return (gain / static_cast<double>(chain.kept_v.size())).matrix();
}

Spectrogram WienerReconstruct(const Spectrogram &mixture, const NmfState &nmf,
                              const LatentChain &chain) {
  const Eigen::MatrixXd gain = WienerGain(nmf, chain);
  if (gain.rows() != mixture.frames() || gain.cols() != mixture.bins())
    Fail(ErrorCode::kInvalidArgument, "gain shape does not match mixture");
  Spectrogram out = mixture;
  out.data = mixture.data.cwiseProduct(gain.cast<std::complex<double>>());
  return out;
}

Spectrogram EnhanceMcem(const Spectrogram &mixture, const VaeModel &model,
                        const LabelSeq *labels, const McemConfig &cfg,
                        std::vector<McemTraceRow> *trace) {
  const Eigen::MatrixXd power = mixture.data.cwiseAbs2();
  McemResult r = RunMcem(power, model, labels, cfg);
  if (trace != nullptr) *trace = r.trace;
  return WienerReconstruct(mixture, r.nmf, r.chain);
}

}  // namespace gvae
