// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_SIGNAL_HPP_
#define GVAE_CORE_SIGNAL_HPP_

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace gvae {

using ComplexMatrix = Eigen::MatrixXcd;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;
};

/// Complex one-sided STFT, frames along rows (N x F), F = n_fft / 2 + 1.
struct Spectrogram {
  ComplexMatrix data;
  int n_fft = 1024;
  int hop = 256;
  int sample_rate = 16000;
  // Length of the analysed signal; istft trims its output to this when > 0.
  std::size_t signal_length = 0;

  Eigen::Index frames() const { return data.rows(); }
  Eigen::Index bins() const { return data.cols(); }
};

/// Per-bin power |X|^2, N x F, all entries non-negative.
struct PowerSpec {
  Eigen::MatrixXd data;

  Eigen::Index frames() const { return data.rows(); }
  Eigen::Index bins() const { return data.cols(); }
};

struct StftConfig {
  int n_fft = 1024;
  int hop = 256;
};

/// Periodic Hann window of the given length.
std::vector<double> HannWindow(int length);

/// Number of frames produced for a signal of `length` samples.
Eigen::Index FrameCount(std::size_t length, int n_fft, int hop);

Spectrogram Stft(const Waveform &w, int n_fft, int hop);
inline Spectrogram Stft(const Waveform &w, const StftConfig &cfg) {
  return Stft(w, cfg.n_fft, cfg.hop);
}

/// Weighted overlap-add inverse. The overlap-added signal is divided by the
/// constant COLA weight sum(w^2) / hop, so reconstruction is exact on the
/// fully overlapped interior and tapers at both edges.
Waveform Istft(const Spectrogram &s);

/// Istft that checks the stored framing against the caller's expectation.
Waveform Istft(const Spectrogram &s, int n_fft, int hop);

PowerSpec Power(const Spectrogram &s);
Eigen::MatrixXd Magnitude(const Spectrogram &s);

double MeanPower(const std::vector<double> &x);

struct Mixture {
  Waveform mixture;
  Waveform scaled_noise;
  double noise_scale = 0.0;
  std::size_t noise_offset = 0;
};

/// Scales a speech-length noise segment so that the full-utterance power
/// ratio equals `snr_db` and adds it to the speech. The segment offset is
/// drawn uniformly from the seeded generator.
Mixture MixAtSnr(const Waveform &speech, const Waveform &noise, double snr_db,
                 std::uint64_t rng_seed);

/// Same as above with an explicit noise offset.
Mixture MixAtSnrWithOffset(const Waveform &speech, const Waveform &noise,
                           double snr_db, std::size_t noise_offset);

}  // namespace gvae

#endif  // GVAE_CORE_SIGNAL_HPP_
