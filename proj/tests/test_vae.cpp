// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <random>

#include "core/vae.hpp"
#include "doctest.h"
#include "gradcheck.hpp"
#include "test_util.hpp"

using namespace gvae;
using gvae::testing::CheckNetGradients;
using gvae::testing::CodeOf;
using gvae::testing::LoopForward;
using gvae::testing::RandomizeBiases;
using gvae::testing::RandomMatrix;

namespace {

void ZeroNet(FeedForwardNet &net) {
  for (auto &l : net.mutable_layers()) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

// Encoder emitting (mu, log var) for every input, decoder emitting v.
VaeModel ConstantModel(int bins, int d, double mu, double log_var,
                       double log_v) {
  VaeModel m = VaeModel::Build(VaeVariant::kM1, bins, d, 1);
  for (FeedForwardNet *n : m.Params()) ZeroNet(*n);
  m.mean_head().mutable_layers().back().bias.setConstant(mu);
  m.logvar_head().mutable_layers().back().bias.setConstant(log_var);
  m.decoder().mutable_layers().back().bias.setConstant(log_v);
  return m;
}

// Count formula for the 2x128 architecture.
std::size_t CountOracle(int f, int d, int c) {
  const std::size_t h = 128;
  const std::size_t enc = (f + c) * h + h + h * h + h + 2 * (h * d + d);
  const std::size_t dec = (d + c) * h + h + h * h + h + h * f + f;
  return enc + dec;
}

}  // namespace

TEST_CASE("parameter counts") {
  CHECK(VaeModel::Build(VaeVariant::kM1).ParameterCount() == 171297);
  CHECK(VaeModel::Build(VaeVariant::kM2Ibm).ParameterCount() == 302625);
  // Not a published figure; the count follows from D = 16, c = 1.
  CHECK(VaeModel::Build(VaeVariant::kM2Vad).ParameterCount() ==
        CountOracle(513, 16, 1));
  CHECK(CountOracle(513, 16, 0) == 171297);
  CHECK(CountOracle(513, 16, 1) == 171553);
}

TEST_CASE("guided input dimensions") {
  VaeModel m = VaeModel::Build(VaeVariant::kM2Ibm);
  CHECK(m.trunk().input_dim() == 1026);
  CHECK(m.decoder().input_dim() == 16 + 513);
  CHECK(m.decoder().output_dim() == 513);
  CHECK(m.decoder().layers().back().activation == Activation::kExp);
  CHECK(m.mean_head().output_dim() == 16);
  CHECK(m.mean_head().layers().back().activation == Activation::kIdentity);
  VaeModel v = VaeModel::Build(VaeVariant::kM2Vad);
  CHECK(v.trunk().input_dim() == 514);
  CHECK(v.decoder().input_dim() == 17);
  CHECK(v.label_dim() == 1);
  CHECK(VaeModel::Build(VaeVariant::kM1).label_dim() == 0);
}

TEST_CASE("zero encoder gives the prior; zero decoder gives unit variance") {
  VaeModel m = ConstantModel(8, 3, 0.0, 0.0, 0.0);
  std::mt19937_64 rng(1);
  GaussianPosterior post = m.Encode(RandomMatrix(8, 1, rng, 0, 2), nullptr);
  CHECK(post.mean.isZero(0.0));
  CHECK(post.variance().isOnes(0.0));
  Eigen::VectorXd v = m.Decode(RandomMatrix(3, 1, rng), nullptr);
  CHECK(v.isOnes(0.0));
}

TEST_CASE("random M1 encoder matches the loop oracle") {
  VaeModel m = VaeModel::Build(VaeVariant::kM1, 513, 16, 5);
  std::mt19937_64 rng(2);
  for (FeedForwardNet *n : m.Params()) RandomizeBiases(*n, rng);
  Eigen::VectorXd x = RandomMatrix(513, 1, rng, 0.0, 3.0);
  GaussianPosterior post = m.Encode(x, nullptr);
  Eigen::VectorXd h = LoopForward(m.trunk(), x);
  Eigen::VectorXd mu = LoopForward(m.mean_head(), h);
  Eigen::VectorXd lv = LoopForward(m.logvar_head(), h);
  CHECK((post.mean - mu).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((post.log_var - lv).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::VectorXd z = RandomMatrix(16, 1, rng);
  CHECK((m.Decode(z, nullptr) - LoopForward(m.decoder(), z))
            .cwiseAbs()
            .maxCoeff() <= 1e-12 * 10.0);
}

TEST_CASE("guided decode concatenates the label after z") {
  VaeModel m = VaeModel::Build(VaeVariant::kM2Ibm, 6, 3, 7);
  std::mt19937_64 rng(3);
  Eigen::VectorXd z = RandomMatrix(3, 1, rng);
  Eigen::VectorXd y = (RandomMatrix(6, 1, rng).array() > 0).cast<double>();
  Eigen::VectorXd zy(9);
  zy << z, y;
  CHECK((m.Decode(z, &y) - LoopForward(m.decoder(), zy)).cwiseAbs().maxCoeff() <=
        1e-12);
  Eigen::VectorXd x = RandomMatrix(6, 1, rng, 0, 1);
  Eigen::VectorXd xy(12);
  xy << x, y;
  CHECK((m.Encode(x, &y).mean -
         LoopForward(m.mean_head(), LoopForward(m.trunk(), xy)))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
}

TEST_CASE("label presence must match the variant") {
  VaeModel m1 = VaeModel::Build(VaeVariant::kM1, 6, 3, 1);
  VaeModel m2 = VaeModel::Build(VaeVariant::kM2Vad, 6, 3, 1);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(6), y = Eigen::VectorXd::Ones(1);
  CHECK(CodeOf([&] { m1.Encode(x, &y); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { m2.Encode(x, nullptr); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { m2.Decode(Eigen::VectorXd::Zero(3), nullptr); }) ==
        ErrorCode::kInvalidArgument);
  Eigen::VectorXd wrong = Eigen::VectorXd::Ones(2);
  CHECK(CodeOf([&] { m2.Encode(x, &wrong); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("decoder output is positive for any finite latent") {
  VaeModel m = VaeModel::Build(VaeVariant::kM1, 32, 4, 9);
  std::mt19937_64 rng(4);
  for (double scale : {1.0, 10.0, 1e3, 1e6}) {
    Eigen::MatrixXd v = m.DecodeBatch(scale * RandomMatrix(4, 50, rng), nullptr);
    CHECK(v.minCoeff() > 0.0);
    CHECK(v.allFinite());
  }
}

TEST_CASE("sample latent: zero-variance limit returns the mean") {
  GaussianPosterior p{Eigen::VectorXd::LinSpaced(16, -2, 2),
                      Eigen::VectorXd::Constant(16, -50.0)};
  std::mt19937_64 rng(5);
  Eigen::VectorXd z = SampleLatent(p, rng);
  CHECK((z - p.mean).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("sample latent: moments of 1e5 standard draws at D=16") {
  GaussianPosterior p{Eigen::VectorXd::Zero(16), Eigen::VectorXd::Zero(16)};
  std::mt19937_64 rng(6);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(16), sq = sum;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd z = SampleLatent(p, rng);
    sum += z;
    sq += z.cwiseProduct(z);
  }
  Eigen::VectorXd mean = sum / n;
  Eigen::VectorXd var = sq / n - mean.cwiseProduct(mean);
  CHECK(mean.cwiseAbs().maxCoeff() < 0.02);
  CHECK(var.minCoeff() >= 0.97);
  CHECK(var.maxCoeff() <= 1.03);
}

TEST_CASE("sample latent: with fixed noise dz/dmean is the identity") {
  GaussianPosterior p{Eigen::VectorXd::Constant(4, 0.3),
                      Eigen::VectorXd::Constant(4, -0.2)};
  for (int i = 0; i < 4; ++i) {
    GaussianPosterior q = p;
    q.mean(i) += 1e-3;
    std::mt19937_64 a(7), b(7);
    Eigen::VectorXd d = (SampleLatent(q, b) - SampleLatent(p, a)) / 1e-3;
    for (int j = 0; j < 4; ++j)
      CHECK(d(j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
  }
}

TEST_CASE("closed-form loss terms") {
  std::mt19937_64 rng(8);
  const int f = 10, d = 16;
  Eigen::MatrixXd eps = StandardNormal(d, 3, rng);
  Eigen::MatrixXd power = RandomMatrix(f, 3, rng, 0.1, 2.0);

  ElboTerms prior = ElboLoss(ConstantModel(f, d, 0.0, 0.0, 0.0), power,
                             nullptr, eps, nullptr);
  CHECK(std::abs(prior.kl) <= 1e-9);

  ElboTerms shifted = ElboLoss(ConstantModel(f, d, 1.0, 0.0, 0.0), power,
                               nullptr, eps, nullptr);
  CHECK(std::abs(shifted.kl - 8.0) <= 1e-9);

  const double log_v = 0.37;
  Eigen::MatrixXd at_v = Eigen::MatrixXd::Constant(f, 3, std::exp(log_v));
  ElboTerms is = ElboLoss(ConstantModel(f, d, 0.0, 0.0, log_v), at_v, nullptr,
                          eps, nullptr);
  CHECK(std::abs(is.recon - f * (log_v + 1.0)) <= 1e-9);
  CHECK(std::abs(is.loss - is.recon - is.kl) <= 1e-12);
}

TEST_CASE("kl is never negative") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    VaeModel m = VaeModel::Build(VaeVariant::kM1, 12, 5, rng());
    for (FeedForwardNet *n : m.Params()) RandomizeBiases(*n, rng, 2.0);
    ElboTerms t = ElboLoss(m, RandomMatrix(12, 4, rng, 0, 5), nullptr,
                           StandardNormal(5, 4, rng), nullptr);
    CHECK(t.kl >= -1e-12);
  }
}

TEST_CASE("elbo rejects negative power") {
  VaeModel m = VaeModel::Build(VaeVariant::kM1, 4, 2, 1);
  Eigen::MatrixXd p = Eigen::MatrixXd::Ones(4, 1);
  p(2, 0) = -1e-3;
  std::mt19937_64 rng(1);
  CHECK(CodeOf([&] {
          ElboLoss(m, p, nullptr, StandardNormal(2, 1, rng), nullptr);
        }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("elbo gradients match central differences for each variant") {
  std::mt19937_64 rng(10);
  for (VaeVariant v : {VaeVariant::kM1, VaeVariant::kM2Vad, VaeVariant::kM2Ibm}) {
    VaeArchitecture arch;
    arch.variant = v;
    arch.bins = 6;
    arch.latent_dim = 3;
    arch.hidden = {5, 4};
    VaeModel m = VaeModel::Build(arch, rng());
    for (FeedForwardNet *n : m.Params()) RandomizeBiases(*n, rng, 0.3);
    Eigen::MatrixXd power = RandomMatrix(6, 4, rng, 0.05, 3.0);
    Eigen::MatrixXd labels =
        (RandomMatrix(m.label_dim(), 4, rng).array() > 0).cast<double>();
    const Eigen::MatrixXd *lp = IsGuided(v) ? &labels : nullptr;
    Eigen::MatrixXd eps = StandardNormal(3, 4, rng);
    std::vector<NetGrad> grads;
    for (FeedForwardNet *n : m.Params()) grads.push_back(n->ZeroGrad());
    ElboLoss(m, power, lp, eps, &grads);
    auto r = CheckNetGradients(
        m.Params(), grads, [&] { return ElboLoss(m, power, lp, eps, nullptr).loss; });
    CAPTURE(VariantName(v));
    CHECK(r.max_rel <= 1e-4);
    CHECK(r.checked == m.ParameterCount());
  }
}

TEST_CASE("checkpoint round trip keeps architecture and weights") {
  VaeModel m = VaeModel::Build(VaeVariant::kM2Vad, 20, 4, 3);
  VaeModel back = VaeModel::FromCheckpoint(
      Checkpoint::Deserialize(m.ToCheckpoint().Serialize()));
  CHECK(back.variant() == VaeVariant::kM2Vad);
  CHECK(back.bins() == 20);
  CHECK(back.latent_dim() == 4);
  CHECK(back.ParameterCount() == m.ParameterCount());
  CHECK(back.decoder().layers()[0].weight ==
        m.decoder().layers()[0].weight.cast<float>().cast<double>());
}

TEST_CASE("variant names parse") {
  CHECK(ParseVariant("m2+ibm") == VaeVariant::kM2Ibm);
  CHECK(ParseVariant("M2-VAD") == VaeVariant::kM2Vad);
  CHECK(ParseVariant("M1") == VaeVariant::kM1);
  CHECK(CodeOf([] { ParseVariant("M3"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("training on template frames cuts validation loss by 20 percent") {
  const int f = 24, templates = 4;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> logv(std::log(0.5), std::log(50.0));
  Eigen::MatrixXd v(f, templates);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::exp(logv(rng));
  // |CN(0, v)|^2 is exponential with mean v.
  auto draw = [&](int n) {
    FrameSet s;
    s.power.resize(f, n);
    std::exponential_distribution<double> ex(1.0);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < f; ++r) s.power(r, c) = v(r, c % templates) * ex(rng);
    return s;
  };
  FrameSet train = draw(1600), valid = draw(400);
  VaeArchitecture arch;
  arch.bins = f;
  arch.latent_dim = 4;
  arch.hidden = {32, 32};
  VaeModel m = VaeModel::Build(arch, 12);
  std::mt19937_64 erng(13);
  Eigen::MatrixXd eps = StandardNormal(4, 400, erng);
  const double before = ElboLoss(m, valid.power, nullptr, eps, nullptr).loss;
  TrainConfig cfg;
  cfg.max_epochs = 40;
  cfg.seed = 3;
  TrainHistory h = TrainVae(m, train, valid, cfg);
  const double after = ElboLoss(m, valid.power, nullptr, eps, nullptr).loss;
  CHECK(before > 0.0);
  CHECK(after <= 0.8 * before);
  CHECK(h.best_epoch >= 1);
}
