// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <random>

#include "core/labels.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace gvae;
using gvae::testing::CodeOf;
using gvae::testing::MessageOf;

namespace {

PowerSpec Rows(std::initializer_list<std::initializer_list<double>> rows) {
  PowerSpec p;
  p.data.resize(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (auto r : rows) {
    Eigen::Index j = 0;
    for (double v : r) p.data(i, j++) = v;
    ++i;
  }
  return p;
}

}  // namespace

TEST_CASE("vad: loudest frame is speech, zero frame is not") {
  LabelSeq l = VadLabels(Rows({{0.5, 0.5}, {0.0, 0.0}, {0.2, 0.1}}));
  CHECK(l.kind == LabelKind::kVad);
  CHECK(l.frames() == 3);
  CHECK(l.dim() == 1);
  CHECK(l.values(0, 0) == 1.0);
  CHECK(l.values(1, 0) == 0.0);
  CHECK(l.values(2, 0) == 1.0);
}

TEST_CASE("vad: two frames (1, 1e-5) at -40 dB give (1, 0)") {
  LabelSeq l = VadLabels(Rows({{1.0}, {1e-5}}), -40.0);
  CHECK(l.values(0, 0) == 1.0);
  CHECK(l.values(1, 0) == 0.0);
  // The threshold itself is inclusive: 1e-4 of the peak.
  const double thr = 1.0 * std::pow(10.0, -40.0 / 10.0);
  CHECK(VadLabels(Rows({{1.0}, {thr}}), -40.0).values(1, 0) == 1.0);
  CHECK(VadLabels(Rows({{1.0}, {thr * 0.999}}), -40.0).values(1, 0) == 0.0);
}

TEST_CASE("vad: silent utterance and bad floor") {
  CHECK(MessageOf([] { VadLabels(Rows({{0.0, 0.0}, {0.0, 0.0}})); }) ==
        "silent utterance");
  CHECK(CodeOf([] { VadLabels(Rows({{1.0}}), 3.0); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("ibm examples") {
  LabelSeq l = IbmLabels(Rows({{4.0, 1.0}}), Rows({{1.0, 4.0}}));
  CHECK(l.kind == LabelKind::kIbm);
  CHECK(l.values(0, 0) == 1.0);
  CHECK(l.values(0, 1) == 0.0);

  std::mt19937_64 rng(3);
  Eigen::MatrixXd clean = gvae::testing::RandomMatrix(6, 5, rng, 0.1, 2.0);
  LabelSeq ones = IbmLabels(PowerSpec{clean},
                            PowerSpec{Eigen::MatrixXd::Zero(6, 5)});
  CHECK(ones.values.minCoeff() == 1.0);
  LabelSeq ties = IbmLabels(PowerSpec{clean}, PowerSpec{clean});
  CHECK(ties.values.maxCoeff() == 0.0);
  // Silent speech against any noise: all zeros.
  LabelSeq zeros = IbmLabels(PowerSpec{Eigen::MatrixXd::Zero(6, 5)},
                             PowerSpec{clean});
  CHECK(zeros.values.maxCoeff() == 0.0);
}

TEST_CASE("ibm shape mismatch") {
  CHECK(CodeOf([] { IbmLabels(Rows({{1.0, 2.0}}), Rows({{1.0}})); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("labels are reproducible") {
  std::mt19937_64 rng(4);
  PowerSpec c{gvae::testing::RandomMatrix(20, 9, rng, 0.0, 1.0)};
  PowerSpec n{gvae::testing::RandomMatrix(20, 9, rng, 0.0, 1.0)};
  CHECK(IbmLabels(c, n).values == IbmLabels(c, n).values);
  CHECK(VadLabels(c).values == VadLabels(c).values);
}

TEST_CASE("standardizer on its own training set gives zero mean, unit std") {
  std::mt19937_64 rng(5);
  std::vector<PowerSpec> train;
  for (int i = 0; i < 3; ++i)
    train.push_back(PowerSpec{
        gvae::testing::RandomMatrix(40 + i, 7, rng, 1e-3, 10.0)});
  Standardizer s = Standardizer::Fit(train);
  Eigen::MatrixXd all(0, 7);
  for (const auto &p : train) {
    Eigen::MatrixXd z = s.Apply(p);
    Eigen::MatrixXd grown(all.rows() + z.rows(), 7);
    grown << all, z;
    all = grown;
  }
  for (Eigen::Index f = 0; f < 7; ++f) {
    const double mean = all.col(f).mean();
    const double var = (all.col(f).array() - mean).square().mean();
    CHECK(std::abs(mean) <= 1e-6);
    CHECK(std::abs(std::sqrt(var) - 1.0) <= 1e-6);
  }
  CHECK(s.clamped_bins().empty());
}

TEST_CASE("standardizer statistics match a direct log-power oracle") {
  std::mt19937_64 rng(6);
  PowerSpec p{gvae::testing::RandomMatrix(30, 4, rng, 0.0, 3.0)};
  Standardizer s = Standardizer::Fit(std::span<const PowerSpec>(&p, 1));
  for (Eigen::Index f = 0; f < 4; ++f) {
    double m = 0.0;
    for (Eigen::Index n = 0; n < 30; ++n) m += std::log(p.data(n, f) + 1e-10);
    m /= 30.0;
    double v = 0.0;
    for (Eigen::Index n = 0; n < 30; ++n)
      v += std::pow(std::log(p.data(n, f) + 1e-10) - m, 2);
    CHECK(s.mean()(f) == doctest::Approx(m).epsilon(1e-12));
    CHECK(s.std()(f) == doctest::Approx(std::sqrt(v / 30.0)).epsilon(1e-12));
  }
}

TEST_CASE("constant bin is clamped, flagged and maps to zero") {
  std::mt19937_64 rng(7);
  PowerSpec p{gvae::testing::RandomMatrix(10, 3, rng, 0.5, 2.0)};
  p.data.col(1).setConstant(0.25);
  Standardizer s = Standardizer::Fit(std::span<const PowerSpec>(&p, 1));
  CHECK(s.std()(1) == kMinStd);
  REQUIRE(s.clamped_bins().size() == 1);
  CHECK(s.clamped_bins()[0] == 1);
  Eigen::MatrixXd z = s.Apply(p);
  for (Eigen::Index n = 0; n < 10; ++n) CHECK(z(n, 1) == 0.0);
}

TEST_CASE("zero power frame stays finite thanks to the log floor") {
  PowerSpec p{Eigen::MatrixXd::Zero(1, 4)};
  Standardizer s = Standardizer::Fit(std::span<const PowerSpec>(&p, 1));
  Eigen::MatrixXd z = s.Apply(p);
  CHECK(z.allFinite());
  CHECK(s.Apply(PowerSpec{Eigen::MatrixXd::Zero(3, 4)}).allFinite());
}

TEST_CASE("standardizer errors") {
  std::vector<PowerSpec> none;
  CHECK(CodeOf([&] { Standardizer::Fit(none); }) ==
        ErrorCode::kInvalidArgument);
  Standardizer unfit;
  CHECK(CodeOf([&] { unfit.Apply(PowerSpec{Eigen::MatrixXd::Ones(1, 2)}); }) ==
        ErrorCode::kState);
}
