// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_WAV_HPP_
#define GVAE_CORE_WAV_HPP_

#include <string>

#include "core/error.hpp"
#include "core/signal.hpp"

namespace gvae {

enum class WavErrorKind {
  kMissingFile,
  kMalformed,
  kUnsupportedEncoding,
  kMultichannel,
  kWriteFailed,
};

class WavError : public Error {
 public:
  WavError(WavErrorKind kind, const std::string &what);
  WavErrorKind kind() const { return kind_; }

 private:
  WavErrorKind kind_;
};

/// Reads a RIFF/WAVE file holding mono 16-bit signed PCM. Samples are
/// scaled by 1/32768. The stored sample rate is returned as is.
Waveform ReadWav(const std::string &path);

/// Writes mono 16-bit PCM. Samples are clipped to [-1, 1] and rounded to the
/// nearest step, +1.0 saturating at 32767.
void WriteWav(const std::string &path, const Waveform &w);

}  // namespace gvae

#endif  // GVAE_CORE_WAV_HPP_
