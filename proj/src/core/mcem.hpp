// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_MCEM_HPP_
#define GVAE_CORE_MCEM_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "core/labels.hpp"
#include "core/signal.hpp"
#include "core/vae.hpp"

namespace gvae {

inline constexpr double kNmfFloor = 1e-10;

/// Unsupervised parameters: noise variance H * W plus per-frame speech gain.
struct NmfState {
  Eigen::MatrixXd H;  // N x K activations
  Eigen::MatrixXd W;  // K x F spectral patterns
  Eigen::VectorXd g;  // N gains

  int rank() const { return static_cast<int>(W.rows()); }
  Eigen::MatrixXd NoiseVariance() const { return H * W; }
};

struct McemConfig {
  int n_iters = 200;
  int samples = 10;  // R, states kept per E-step
  int burn_in = 5;
  double proposal_std = 0.1;
  int rank = 10;  // K
  std::uint64_t seed = 0;
  // Stop once |dQ| < tolerance * |Q| for `stall_iters` consecutive
  // iterations. tolerance <= 0 disables early stopping.
  double tolerance = 1e-4;
  int stall_iters = 10;
};

void ValidateMcemConfig(const McemConfig &cfg);

/// Random-walk Metropolis state for every frame. Each frame owns its
/// generator so per-frame moves are reproducible regardless of batching.
struct LatentChain {
  Eigen::MatrixXd z;                     // D x N current states
  Eigen::MatrixXd v;                     // N x F speech variances at z
  std::vector<Eigen::MatrixXd> kept_z;   // R of D x N
  std::vector<Eigen::MatrixXd> kept_v;   // R of N x F
  std::vector<std::mt19937_64> rngs;     // one per frame
  Eigen::VectorXd accepted;              // per-frame accepts, last E-step
  int moves = 0;                         // per-frame moves, last E-step

  double AcceptanceRate() const;
};

/// Decoder evaluation with the label part of the first layer folded in
/// once per utterance. Returns N x F variances for D x N latents.
class FrameDecoder {
 public:
  FrameDecoder(const VaeModel &model, const LabelSeq *labels,
               Eigen::Index frames);
  Eigen::MatrixXd Variances(const Eigen::MatrixXd &z) const;

 private:
  const VaeModel &model_;
  Eigen::MatrixXd first_offset_;  // hidden x N: bias + label contribution
};

/// log p(x_n | z_n) + log N(z_n; 0, I) for one frame, with
/// lambda_f = g_n v_f(z) + (HW)_nf.
double MixtureLogLik(const Eigen::VectorXd &z, const Eigen::VectorXd &power,
                     const VaeModel &model, const Eigen::VectorXd *label,
                     const NmfState &nmf, Eigen::Index frame);

/// Per-frame version of MixtureLogLik given already-decoded variances
/// (N x F) for latents z (D x N).
Eigen::VectorXd FrameLogLik(const Eigen::MatrixXd &z,
                            const Eigen::MatrixXd &speech_var,
                            const Eigen::MatrixXd &power,
                            const NmfState &nmf);
// Same, with the gains and noise variance H * W already at hand.
Eigen::VectorXd FrameLogLik(const Eigen::MatrixXd &z,
                            const Eigen::MatrixXd &speech_var,
                            const Eigen::MatrixXd &power,
                            const Eigen::VectorXd &g,
                            const Eigen::MatrixXd &hw);

/// Runs burn_in + samples random-walk moves on every frame and keeps the
/// last `samples` states (and their decoded variances).
void MhEStep(LatentChain &chain, const Eigen::MatrixXd &power,
             const FrameDecoder &decoder, const NmfState &nmf,
             const McemConfig &cfg);

/// Monte-Carlo objective (to be minimized):
///   Q = 1/R sum_r sum_nf log lambda_r + |x|^2 / lambda_r
double McemObjective(const NmfState &nmf, const Eigen::MatrixXd &power,
                     const std::vector<Eigen::MatrixXd> &speech_var);

/// One majorize-minimize pass over H, then W, then g.
void MStepUpdate(NmfState &nmf, const Eigen::MatrixXd &power,
                 const std::vector<Eigen::MatrixXd> &speech_var);

struct McemTraceRow {
  int iter = 0;
  double q = 0.0;
  double acceptance = 0.0;
};

struct McemResult {
  NmfState nmf;
  LatentChain chain;
  std::vector<McemTraceRow> trace;
};

/// Initial state: z at the encoder mean of the mixture power (with labels
/// for guided models), H and W uniform in [0, 1], g = 1.
McemResult InitMcem(const Eigen::MatrixXd &power, const VaeModel &model,
                    const LabelSeq *labels, const FrameDecoder &decoder,
                    const McemConfig &cfg);

/// Alternates E- and M-steps on the mixture power (N x F).
McemResult RunMcem(const Eigen::MatrixXd &power, const VaeModel &model,
                   const LabelSeq *labels, const McemConfig &cfg,
                   const std::function<void(const McemTraceRow &)> &on_iter = {});

/// Posterior-mean Wiener gain over the kept samples, N x F, in (0, 1).
Eigen::MatrixXd WienerGain(const NmfState &nmf, const LatentChain &chain);

/// s_hat = gain .* x with the mixture phase kept.
Spectrogram WienerReconstruct(const Spectrogram &mixture, const NmfState &nmf,
                              const LatentChain &chain);

/// Full enhancement of one utterance.
Spectrogram EnhanceMcem(const Spectrogram &mixture, const VaeModel &model,
                        const LabelSeq *labels, const McemConfig &cfg,
                        std::vector<McemTraceRow> *trace = nullptr);

}  // namespace gvae

#endif  // GVAE_CORE_MCEM_HPP_
