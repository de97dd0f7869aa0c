// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "core/signal.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace gvae;
using gvae::testing::CodeOf;
using gvae::testing::MessageOf;
using gvae::testing::RandomWave;

namespace {

// Plain O(n^2) DFT of one windowed frame, bin k only.
std::complex<double> DirectDft(const std::vector<double> &frame, int k) {
  const int n = static_cast<int>(frame.size());
  std::complex<double> acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ang = -2.0 * std::numbers::pi * k * i / n;
    acc += frame[i] * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return acc;
}

double SnrDb(const std::vector<double> &s, const std::vector<double> &b) {
  return 10.0 * std::log10(MeanPower(s) / MeanPower(b));
}

}  // namespace

TEST_CASE("1024/256 framing gives a 16 ms frame period and 513 bins") {
  Waveform w = RandomWave(16000, 1);
  Spectrogram s = Stft(w, 1024, 256);
  CHECK(s.bins() == 513);
  CHECK(1000.0 * s.hop / w.sample_rate == doctest::Approx(16.0));
}

TEST_CASE("frame count follows the zero-padded tail rule") {
  CHECK(FrameCount(1024, 1024, 256) == 1);
  CHECK(FrameCount(1025, 1024, 256) == 2);
  CHECK(FrameCount(1280, 1024, 256) == 2);
  CHECK(FrameCount(1281, 1024, 256) == 3);
  // ceil(14976 / 256) + 1: the half frame at the tail is kept.
  CHECK(FrameCount(16000, 1024, 256) == 60);
}

TEST_CASE("all-zero second gives an all-zero 60x513 spectrogram") {
  Waveform w{std::vector<double>(16000, 0.0), 16000};
  Spectrogram s = Stft(w, 1024, 256);
  CHECK(s.frames() == 60);
  CHECK(s.bins() == 513);
  CHECK(s.data.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("periodic hann window") {
  auto w = HannWindow(8);
  CHECK(w[0] == 0.0);
  CHECK(w[4] == doctest::Approx(1.0));
  CHECK(w[2] == doctest::Approx(0.5));
  CHECK(w[6] == doctest::Approx(0.5));
}

TEST_CASE("cosine at a bin centre peaks at that bin and matches a direct DFT") {
  const int n_fft = 1024;
  const int k = 37;
  std::vector<double> x(4096);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::cos(2.0 * std::numbers::pi * k * i / n_fft);
  Spectrogram s = Stft(Waveform{x, 16000}, n_fft, 256);
  auto window = HannWindow(n_fft);
  for (Eigen::Index t = 0; t < s.frames(); ++t) {
    Eigen::VectorXd mag = s.data.row(t).cwiseAbs();
    Eigen::Index arg;
    mag.maxCoeff(&arg);
    CHECK(arg == k);
    for (Eigen::Index f = 0; f < s.bins(); ++f)
      if (std::abs(f - k) >= 3) CHECK(mag(k) >= 100.0 * mag(f));
  }
  // Frame 2 against the definition.
  std::vector<double> frame(n_fft);
  for (int i = 0; i < n_fft; ++i) frame[i] = x[512 + i] * window[i];
  for (int f : {0, k - 1, k, k + 1, 200, 512}) {
    std::complex<double> ref = DirectDft(frame, f);
    CHECK(std::abs(s.data(2, f) - ref) < 1e-9 * (1.0 + std::abs(ref)));
  }
}

TEST_CASE("stft rejects short and non-finite signals") {
  Waveform shortw = RandomWave(1000, 2);
  CHECK(MessageOf([&] { Stft(shortw, 1024, 256); }) == "signal too short");
  Waveform bad = RandomWave(2048, 3);
  bad.samples[100] = std::numeric_limits<double>::quiet_NaN();
  CHECK(CodeOf([&] { Stft(bad, 1024, 256); }) == ErrorCode::kNumeric);
  CHECK(CodeOf([&] { Stft(RandomWave(2048, 4), 1024, 300); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("round trip reproduces the interior") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Waveform w = RandomWave(16000, seed);
    Waveform y = Istft(Stft(w, 1024, 256));
    REQUIRE(y.samples.size() == w.samples.size());
    double err = 0.0;
    for (std::size_t i = 1024; i + 1024 < w.samples.size(); ++i)
      err = std::max(err, std::abs(y.samples[i] - w.samples[i]));
    CHECK(err <= 1e-6);
  }
}

TEST_CASE("round trip also holds at other framings") {
  Waveform w = RandomWave(5000, 9);
  Waveform y = Istft(Stft(w, 256, 64));
  double err = 0.0;
  for (std::size_t i = 256; i + 256 < w.samples.size(); ++i)
    err = std::max(err, std::abs(y.samples[i] - w.samples[i]));
  CHECK(err <= 1e-9);
}

TEST_CASE("all-zero spectrogram inverts to silence") {
  Spectrogram s;
  s.data = ComplexMatrix::Zero(10, 513);
  Waveform y = Istft(s);
  CHECK(y.samples.size() == 9 * 256 + 1024);
  for (double v : y.samples) CHECK(v == 0.0);
}

TEST_CASE("single frame of a windowed cosine overlap-adds to a closed form") {
  const int n_fft = 1024, hop = 256;
  auto w = HannWindow(n_fft);
  double sumsq = 0.0;
  for (double v : w) sumsq += v * v;
  const double cola = sumsq / hop;
  std::vector<double> c(n_fft);
  for (int i = 0; i < n_fft; ++i)
    c[i] = std::cos(2.0 * std::numbers::pi * 11.0 * i / n_fft + 0.3);
  // Analysis of exactly one frame.
  Spectrogram s = Stft(Waveform{c, 16000}, n_fft, hop);
  REQUIRE(s.frames() == 1);
  Waveform y = Istft(s);
  for (int i = 0; i < n_fft; ++i)
    CHECK(y.samples[i] == doctest::Approx(w[i] * w[i] * c[i] / cola).epsilon(1e-12));
}

TEST_CASE("istft rejects framing that disagrees with the metadata") {
  Spectrogram s = Stft(RandomWave(4096, 5), 1024, 256);
  CHECK(CodeOf([&] { Istft(s, 512, 128); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { Istft(s, 1024, 128); }) == ErrorCode::kInvalidArgument);
  Spectrogram bad = s;
  bad.n_fft = 512;
  CHECK(CodeOf([&] { Istft(bad); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("parseval: weighted spectral energy tracks time energy") {
  const int n_fft = 1024, hop = 256;
  auto win = HannWindow(n_fft);
  double sumsq = 0.0;
  for (double v : win) sumsq += v * v;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    // Silent margins so every active sample is fully overlapped.
    Waveform w = RandomWave(16000, 100 + seed);
    w.samples.insert(w.samples.begin(), n_fft, 0.0);
    w.samples.insert(w.samples.end(), n_fft, 0.0);
    Spectrogram s = Stft(w, n_fft, hop);
    double spec = 0.0;
    for (Eigen::Index t = 0; t < s.frames(); ++t)
      for (Eigen::Index f = 0; f < s.bins(); ++f) {
        const double p = std::norm(s.data(t, f));
        spec += (f == 0 || f == s.bins() - 1) ? p : 2.0 * p;
      }
    spec /= n_fft * sumsq / hop;
    double energy = 0.0;
    for (double v : w.samples) energy += v * v;
    CHECK(std::abs(spec - energy) <= 0.01 * energy);
  }
}

TEST_CASE("mix at snr: closed-form scales") {
  Waveform s{{1.0, -1.0, 1.0, -1.0}, 16000};
  Waveform b{{1.0, 1.0, -1.0, -1.0}, 16000};
  Mixture m = MixAtSnrWithOffset(s, b, 0.0, 0);
  CHECK(m.noise_scale == doctest::Approx(1.0).epsilon(1e-15));
  Waveform s2{{2.0, -2.0, 2.0, -2.0}, 16000};
  CHECK(MixAtSnrWithOffset(s2, b, 0.0, 0).noise_scale ==
        doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("mix at snr hits the -5/0/+5 grid and is an exact sum") {
  Waveform s = RandomWave(8000, 11);
  Waveform b = RandomWave(20000, 12, 0.1);
  for (double snr : {-5.0, 0.0, 5.0}) {
    Mixture m = MixAtSnr(s, b, snr, 77);
    CHECK(std::abs(SnrDb(s.samples, m.scaled_noise.samples) - snr) <= 1e-9);
    for (std::size_t i = 0; i < s.samples.size(); ++i)
      CHECK(m.mixture.samples[i] == s.samples[i] + m.scaled_noise.samples[i]);
    const std::size_t off = m.noise_offset;
    for (std::size_t i = 0; i < s.samples.size(); i += 500)
      CHECK(m.scaled_noise.samples[i] ==
            m.noise_scale * b.samples[off + i]);
  }
  // The offset is a function of the seed.
  CHECK(MixAtSnr(s, b, 0.0, 5).noise_offset ==
        MixAtSnr(s, b, 0.0, 5).noise_offset);
}

TEST_CASE("mix at snr errors") {
  Waveform s = RandomWave(100, 1);
  Waveform silent{std::vector<double>(200, 0.0), 16000};
  CHECK(MessageOf([&] { MixAtSnr(s, silent, 0.0, 1); }) == "degenerate noise");
  CHECK(CodeOf([&] {
          MixAtSnr(Waveform{std::vector<double>(100, 0.0), 16000},
                   RandomWave(200, 2), 0.0, 1);
        }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { MixAtSnr(s, RandomWave(50, 3), 0.0, 1); }) ==
        ErrorCode::kInvalidArgument);
  Waveform other = RandomWave(200, 4);
  other.sample_rate = 8000;
  CHECK(CodeOf([&] { MixAtSnr(s, other, 0.0, 1); }) ==
        ErrorCode::kInvalidArgument);
}
