// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

namespace gvae {
namespace {

ErrorCode CodeFor(WavErrorKind kind) {
  switch (kind) {
    case WavErrorKind::kMissingFile:
    case WavErrorKind::kWriteFailed: return ErrorCode::kIo;
    case WavErrorKind::kMalformed: return ErrorCode::kFormat;
    case WavErrorKind::kUnsupportedEncoding:
    case WavErrorKind::kMultichannel: return ErrorCode::kUnsupported;
  }
  return ErrorCode::kInternal;
}

std::uint32_t Le32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t Le16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void Put32(std::vector<unsigned char> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
}

void Put16(std::vector<unsigned char> &out, std::uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

}  // namespace

WavError::WavError(WavErrorKind kind, const std::string &what)
    : Error(CodeFor(kind), what), kind_(kind) {}

Waveform ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError(WavErrorKind::kMissingFile, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw WavError(WavErrorKind::kMalformed, "not a RIFF/WAVE file: " + path);

  bool have_fmt = false;
  int sample_rate = 0;
  const unsigned char *data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    const std::size_t size = Le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > avail)
        throw WavError(WavErrorKind::kMalformed, "bad fmt chunk: " + path);
      const unsigned char *f = bytes.data() + body;
      std::uint16_t format = Le16(f);
      const std::uint16_t channels = Le16(f + 2);
      sample_rate = static_cast<int>(Le32(f + 4));
      const std::uint16_t bits = Le16(f + 14);
      // WAVE_FORMAT_EXTENSIBLE carries the real tag in the sub-format GUID.
      if (format == 0xfffe && size >= 26) format = Le16(f + 24);
      if (format != 1 || bits != 16)
        throw WavError(WavErrorKind::kUnsupportedEncoding,
                       "only 16-bit PCM is supported: " + path);
      if (channels != 1)
        throw WavError(WavErrorKind::kMultichannel,
                       "only mono audio is supported: " + path);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = std::min(size, avail);
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt || data == nullptr)
    throw WavError(WavErrorKind::kMalformed, "missing fmt or data: " + path);
  if (sample_rate <= 0)
    throw WavError(WavErrorKind::kMalformed, "bad sample rate: " + path);

  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(data_size / 2);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const auto v = static_cast<std::int16_t>(Le16(data + 2 * i));
    w.samples[i] = v / 32768.0;
  }
  return w;
}

void WriteWav(const std::string &path, const Waveform &w) {
  if (w.sample_rate <= 0)
    Fail(ErrorCode::kInvalidArgument, "sample rate must be positive");
  const std::size_t n = w.samples.size();
  std::vector<unsigned char> out;
  out.reserve(44 + 2 * n);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  Put32(out, static_cast<std::uint32_t>(36 + 2 * n));
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  Put32(out, 16);
  Put16(out, 1);
  Put16(out, 1);
  Put32(out, static_cast<std::uint32_t>(w.sample_rate));
  Put32(out, static_cast<std::uint32_t>(w.sample_rate * 2));
  Put16(out, 2);
  Put16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  Put32(out, static_cast<std::uint32_t>(2 * n));
  for (double x : w.samples) {
    if (!std::isfinite(x)) Fail(ErrorCode::kNumeric, "non-finite sample");
    const double c = std::clamp(x, -1.0, 1.0);
    const long q = std::clamp(std::lround(c * 32768.0), -32768L, 32767L);
    Put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw WavError(WavErrorKind::kWriteFailed, "cannot write " + path);
  f.write(reinterpret_cast<const char *>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw WavError(WavErrorKind::kWriteFailed, "write failed: " + path);
}

}  // namespace gvae
