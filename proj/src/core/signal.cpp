// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/signal.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include <fftw3.h>

#include "core/error.hpp"

namespace gvae {
namespace {

// fftw planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per size and kept for the process lifetime.
struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

const FftPlans &PlansFor(int n) {
  static std::mutex mu;
  static std::map<int, FftPlans> plans;
  std::lock_guard<std::mutex> lock(mu);
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  double *in = fftw_alloc_real(n);
  fftw_complex *out = fftw_alloc_complex(n / 2 + 1);
  FftPlans p;
  p.forward = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_c2r_1d(n, out, in, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  if (p.forward == nullptr || p.inverse == nullptr)
    Fail(ErrorCode::kInternal, "fftw plan creation failed");
  return plans.emplace(n, p).first->second;
}

struct FftwDeleter {
  void operator()(void *p) const { fftw_free(p); }
};

void CheckFraming(int n_fft, int hop) {
  if (n_fft < 2 || n_fft % 2 != 0)
    Fail(ErrorCode::kInvalidArgument, "n_fft must be even and >= 2");
  if (hop < 1 || n_fft % hop != 0)
    Fail(ErrorCode::kInvalidArgument, "hop must divide n_fft");
}

}  // namespace

std::vector<double> HannWindow(int length) {
  std::vector<double> w(length);
  for (int i = 0; i < length; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / length);
  return w;
}

Eigen::Index FrameCount(std::size_t length, int n_fft, int hop) {
  const std::size_t n = static_cast<std::size_t>(n_fft);
  const std::size_t excess = length > n ? length - n : 0;
  return static_cast<Eigen::Index>((excess + hop - 1) / hop + 1);
}

Spectrogram Stft(const Waveform &w, int n_fft, int hop) {
  CheckFraming(n_fft, hop);
  if (w.samples.size() < static_cast<std::size_t>(n_fft))
    Fail(ErrorCode::kInvalidArgument, "signal too short");
  for (double x : w.samples)
    if (!std::isfinite(x))
      Fail(ErrorCode::kNumeric, "non-finite sample in waveform");

  const Eigen::Index frames = FrameCount(w.samples.size(), n_fft, hop);
  const int bins = n_fft / 2 + 1;
  const std::vector<double> window = HannWindow(n_fft);
  const FftPlans &plans = PlansFor(n_fft);

  std::unique_ptr<double, FftwDeleter> buf(fftw_alloc_real(n_fft));
  std::unique_ptr<fftw_complex, FftwDeleter> spec(fftw_alloc_complex(bins));

  Spectrogram out;
  out.n_fft = n_fft;
  out.hop = hop;
  out.sample_rate = w.sample_rate;
  out.signal_length = w.samples.size();
  out.data.resize(frames, bins);
  const std::size_t len = w.samples.size();
  for (Eigen::Index t = 0; t < frames; ++t) {
    const std::size_t offset = static_cast<std::size_t>(t) * hop;
    for (int i = 0; i < n_fft; ++i) {
      const std::size_t k = offset + i;
      buf.get()[i] = k < len ? w.samples[k] * window[i] : 0.0;
    }
    fftw_execute_dft_r2c(plans.forward, buf.get(), spec.get());
    for (int f = 0; f < bins; ++f)
      out.data(t, f) = {spec.get()[f][0], spec.get()[f][1]};
  }
  return out;
}

Waveform Istft(const Spectrogram &s) {
  CheckFraming(s.n_fft, s.hop);
  const int n_fft = s.n_fft;
  const int bins = n_fft / 2 + 1;
  if (s.bins() != bins)
    Fail(ErrorCode::kInvalidArgument, "spectrogram bins do not match n_fft");
  if (s.frames() < 1) Fail(ErrorCode::kInvalidArgument, "empty spectrogram");

  const std::vector<double> window = HannWindow(n_fft);
  double cola = 0.0;
  for (double v : window) cola += v * v;
  cola /= s.hop;

  const FftPlans &plans = PlansFor(n_fft);
  std::unique_ptr<double, FftwDeleter> buf(fftw_alloc_real(n_fft));
  std::unique_ptr<fftw_complex, FftwDeleter> spec(fftw_alloc_complex(bins));

  const std::size_t full =
      static_cast<std::size_t>(s.frames() - 1) * s.hop + n_fft;
  std::vector<double> y(full, 0.0);
  const double scale = 1.0 / (n_fft * cola);
  for (Eigen::Index t = 0; t < s.frames(); ++t) {
    for (int f = 0; f < bins; ++f) {
      spec.get()[f][0] = s.data(t, f).real();
      spec.get()[f][1] = s.data(t, f).imag();
    }
    // The DC and Nyquist bins of a real signal's spectrum are real.
    spec.get()[0][1] = 0.0;
    spec.get()[bins - 1][1] = 0.0;
    fftw_execute_dft_c2r(plans.inverse, spec.get(), buf.get());
    const std::size_t offset = static_cast<std::size_t>(t) * s.hop;
    for (int i = 0; i < n_fft; ++i)
      y[offset + i] += buf.get()[i] * window[i] * scale;
  }
  if (s.signal_length > 0 && s.signal_length < y.size())
    y.resize(s.signal_length);
  Waveform out;
  out.samples = std::move(y);
  out.sample_rate = s.sample_rate;
  return out;
}

Waveform Istft(const Spectrogram &s, int n_fft, int hop) {
  if (s.n_fft != n_fft || s.hop != hop)
    Fail(ErrorCode::kInvalidArgument,
         "spectrogram framing does not match requested n_fft/hop");
  return Istft(s);
}

PowerSpec Power(const Spectrogram &s) {
  return PowerSpec{s.data.cwiseAbs2()};
}

Eigen::MatrixXd Magnitude(const Spectrogram &s) { return s.data.cwiseAbs(); }

double MeanPower(const std::vector<double> &x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

Mixture MixAtSnrWithOffset(const Waveform &speech, const Waveform &noise,
                           double snr_db, std::size_t noise_offset) {
  if (speech.sample_rate != noise.sample_rate)
    Fail(ErrorCode::kInvalidArgument, "sample rate mismatch");
  const std::size_t len = speech.samples.size();
  if (noise.samples.size() < len)
    Fail(ErrorCode::kInvalidArgument, "noise shorter than speech");
  if (noise_offset > noise.samples.size() - len)
    Fail(ErrorCode::kInvalidArgument, "noise offset out of range");
  if (!std::isfinite(snr_db))
    Fail(ErrorCode::kInvalidArgument, "non-finite snr");

  std::vector<double> segment(noise.samples.begin() + noise_offset,
                              noise.samples.begin() + noise_offset + len);
  const double ps = MeanPower(speech.samples);
  const double pb = MeanPower(segment);
  if (ps == 0.0) Fail(ErrorCode::kInvalidArgument, "silent speech");
  if (pb == 0.0) Fail(ErrorCode::kInvalidArgument, "degenerate noise");

  const double alpha = std::sqrt(ps / (pb * std::pow(10.0, snr_db / 10.0)));
  Mixture m;
  m.noise_scale = alpha;
  m.noise_offset = noise_offset;
  m.mixture.sample_rate = speech.sample_rate;
  m.scaled_noise.sample_rate = speech.sample_rate;
  m.mixture.samples.resize(len);
  m.scaled_noise.samples.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    m.scaled_noise.samples[i] = alpha * segment[i];
    m.mixture.samples[i] = speech.samples[i] + m.scaled_noise.samples[i];
  }
  return m;
}

Mixture MixAtSnr(const Waveform &speech, const Waveform &noise, double snr_db,
                 std::uint64_t rng_seed) {
  if (noise.samples.size() < speech.samples.size())
    Fail(ErrorCode::kInvalidArgument, "noise shorter than speech");
  std::mt19937_64 rng(rng_seed);
  const std::size_t span = noise.samples.size() - speech.samples.size();
  std::uniform_int_distribution<std::size_t> pick(0, span);
  return MixAtSnrWithOffset(speech, noise, snr_db, pick(rng));
}

}  // namespace gvae
