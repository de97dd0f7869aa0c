// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_TESTS_FIXTURES_HPP_
#define GVAE_TESTS_FIXTURES_HPP_

#include <string>

#include "core/corpus.hpp"
#include "core/wav.hpp"
#include "test_util.hpp"

namespace gvae::testing {

// Test-split corpus of random "speech" against independent white noise,
// `per_snr` utterances at each of -5, 0 and +5 dB.
inline CorpusIndex WhiteNoiseCorpus(const TempDir &dir, int per_snr,
                                    double seconds = 3.0) {
  const auto n = static_cast<std::size_t>(seconds * 16000);
  DatasetManifest m;
  std::uint64_t seed = 1;
  for (int i = 0; i < 3 * per_snr; ++i) {
    const std::string clean = dir / ("clean" + std::to_string(i) + ".wav");
    const std::string noise = dir / ("noise" + std::to_string(i) + ".wav");
    WriteWav(clean, RandomWave(n, 1000 + i, 0.3));
    WriteWav(noise, RandomWave(n, 2000 + i, 0.3));
    m.records.push_back(ManifestRecord{clean, noise, 0, -5.0 + 5.0 * (i % 3),
                                       Split::kTest, seed++});
  }
  return SynthesizeDataset(m, dir / "corpus", {});
}

}  // namespace gvae::testing

#endif  // GVAE_TESTS_FIXTURES_HPP_
