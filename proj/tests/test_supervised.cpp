// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <random>

#include "core/metrics.hpp"
#include "core/supervised.hpp"
#include "doctest.h"
#include "gradcheck.hpp"
#include "test_util.hpp"

using namespace gvae;
using gvae::testing::CheckNetGradients;
using gvae::testing::CodeOf;
using gvae::testing::RandomizeBiases;
using gvae::testing::RandomMatrix;
using gvae::testing::RandomWave;
using gvae::testing::ReluPattern;

TEST_CASE("msa loss examples") {
  Eigen::MatrixXd half(1, 1), two(1, 1), zero(1, 1);
  half << 0.5;
  two << 2.0;
  zero << 0.0;
  CHECK(MsaLoss(half, two, zero).loss == 1.0);
  CHECK(MsaLoss(Eigen::MatrixXd::Constant(1, 1, 1e-12), two, zero).loss < 1e-20);
  std::mt19937_64 rng(1);
  Eigen::MatrixXd mask = RandomMatrix(5, 4, rng, 0.01, 0.99);
  Eigen::MatrixXd mag = RandomMatrix(5, 4, rng, 0.0, 2.0);
  CHECK(MsaLoss(mask, mag, mask.cwiseProduct(mag)).loss <= 1e-28);
}

TEST_CASE("msa loss averages over frames and matches its gradient") {
  std::mt19937_64 rng(2);
  Eigen::MatrixXd mask = RandomMatrix(5, 4, rng, 0.01, 0.99);
  Eigen::MatrixXd x = RandomMatrix(5, 4, rng, 0.0, 2.0);
  Eigen::MatrixXd s = RandomMatrix(5, 4, rng, 0.0, 2.0);
  LossAndGrad lg = MsaLoss(mask, x, s);
  CHECK(lg.loss == doctest::Approx((mask.cwiseProduct(x) - s).squaredNorm() / 4.0)
                       .epsilon(1e-14));
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    Eigen::MatrixXd up = mask, dn = mask;
    up(i) += h;
    dn(i) -= h;
    const double fd = (MsaLoss(up, x, s).loss - MsaLoss(dn, x, s).loss) / (2 * h);
    CHECK(lg.grad(i) == doctest::Approx(fd).epsilon(1e-6));
  }
  CHECK(CodeOf([&] { MsaLoss(mask, x.leftCols(3), s); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("mask network gradients match central differences") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    MaskNet m = MaskNet::Build(6, rng(), {5, 5, 4});
    RandomizeBiases(m.net(), rng);
    Eigen::MatrixXd in = RandomMatrix(6, 7, rng);
    Eigen::MatrixXd x = RandomMatrix(6, 7, rng, 0.0, 2.0);
    Eigen::MatrixXd s = RandomMatrix(6, 7, rng, 0.0, 2.0);
    ForwardCache c;
    Eigen::MatrixXd mask = m.net().Forward(in, &c);
    NetGrad g = m.net().ZeroGrad();
    m.net().Backward(c, MsaLoss(mask, x, s).grad, &g);
    auto r = CheckNetGradients(
        {&m.net()}, {g}, [&] { return MsaLoss(m.net().Forward(in), x, s).loss; },
        [&] { return ReluPattern(m.net(), in); });
    CHECK(r.max_rel <= 1e-4);
    CHECK(r.checked > 0);
  }
}

TEST_CASE("parameter count and architecture") {
  MaskNet m = MaskNet::Build(513, 0);
  CHECK(m.ParameterCount() == 198017);
  REQUIRE(m.net().layers().size() == 6);
  for (int k = 0; k < 5; ++k) CHECK(m.net().layers()[k].activation == Activation::kRelu);
  CHECK(m.net().layers()[5].activation == Activation::kSigmoid);
}

TEST_CASE("constant masks") {
  std::mt19937_64 rng(4);
  Spectrogram x = Stft(RandomWave(4000, 4), 1024, 256);
  CHECK(ApplyMask(x, Eigen::MatrixXd::Ones(x.frames(), x.bins())).data == x.data);
  CHECK(ApplyMask(x, Eigen::MatrixXd::Zero(x.frames(), x.bins())).data.cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(CodeOf([&] { ApplyMask(x, Eigen::MatrixXd::Ones(2, 2)); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("a clamped oracle magnitude mask improves SI-SDR") {
  Waveform s = RandomWave(16000, 5);
  // Low-pass the "speech" so the mask has structure to exploit.
  for (std::size_t i = s.samples.size() - 1; i > 0; --i)
    s.samples[i] = 0.5 * (s.samples[i] + s.samples[i - 1]);
  Waveform n = RandomWave(16000, 6);
  Mixture mix = MixAtSnr(s, n, 0.0, 1);
  Spectrogram X = Stft(mix.mixture, 1024, 256);
  Spectrogram S = Stft(s, 1024, 256);
  Eigen::MatrixXd mask =
      (S.data.cwiseAbs().array() / X.data.cwiseAbs().array().max(1e-12))
          .min(1.0 - 1e-6)
          .max(1e-6);
  Waveform est = Istft(ApplyMask(X, mask));
  CHECK(SiSdr(est, s) > SiSdr(mix.mixture, s));
}

TEST_CASE("enhancement keeps |s| <= |x| and needs a fitted standardizer") {
  std::mt19937_64 rng(7);
  MaskNet m = MaskNet::Build(513, 1, {8});
  Spectrogram x = Stft(RandomWave(8000, 7), 1024, 256);
  CHECK(CodeOf([&] { EnhanceSupervised(m, x); }) == ErrorCode::kState);
  PowerSpec p = Power(x);
  m.set_standardizer(Standardizer::Fit(std::span<const PowerSpec>(&p, 1)));
  Spectrogram y = EnhanceSupervised(m, x);
  CHECK((y.data.cwiseAbs().array() <= x.data.cwiseAbs().array()).all());
  MaskNet back = MaskNet::FromCheckpoint(
      Checkpoint::Deserialize(m.ToCheckpoint().Serialize()));
  CHECK((back.Mask(p) - m.Mask(p)).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("training lowers the validation loss") {
  MaskTrainingSet train, valid;
  for (int i = 0; i < 6; ++i) {
    Waveform s = RandomWave(8000, 100 + i, 0.3);
    for (std::size_t k = s.samples.size() - 1; k > 0; --k)
      s.samples[k] = 0.7 * s.samples[k - 1] + 0.3 * s.samples[k];
    Mixture mix = MixAtSnr(s, RandomWave(8000, 200 + i), 0.0, i);
    MaskTrainingSet &dst = i < 5 ? train : valid;
    dst.mixtures.push_back(Stft(mix.mixture, 1024, 256));
    dst.clean_magnitudes.push_back(Magnitude(Stft(s, 1024, 256)));
  }
  TrainConfig cfg;
  cfg.max_epochs = 15;
  cfg.batch_size = 16;
  TrainHistory h;
  TrainMaskNet(train, valid, cfg, &h, {}, {32, 32});
  REQUIRE(h.epochs.size() >= 2);
  CHECK(h.best_valid_loss < h.epochs.front().valid_loss);
  CHECK_FALSE(h.diverged);
}
