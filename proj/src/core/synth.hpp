// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Procedural source material: a formant speech synthesizer and a handful of
// noise families. Used to build self-contained corpora when no recorded
// speech is at hand.

#ifndef GVAE_CORE_SYNTH_HPP_
#define GVAE_CORE_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "core/corpus.hpp"
#include "core/signal.hpp"

namespace gvae {

struct SpeakerProfile {
  double f0 = 120.0;            // Hz
  double formant_scale = 1.0;   // vocal tract length factor
  double rate = 1.0;            // syllables per second multiplier
  double breathiness = 0.05;
  double tilt = 0.9;            // one-pole source lowpass coefficient
};

SpeakerProfile DrawSpeaker(std::uint64_t seed);

/// One utterance of babble-free synthetic speech, roughly `seconds` long,
/// with leading and trailing silence. Active-speech RMS is about -26 dBFS.
Waveform SynthesizeSpeech(const SpeakerProfile &speaker, double seconds,
                          std::uint64_t seed, int sample_rate = 16000);

enum class NoiseFamily { kPink, kHum, kBabble, kTraffic, kClatter, kWind };

const char *NoiseFamilyName(NoiseFamily f);
NoiseFamily ParseNoiseFamily(const std::string &name);
std::vector<NoiseFamily> AllNoiseFamilies();

Waveform SynthesizeNoise(NoiseFamily family, double seconds, std::uint64_t seed,
                         int sample_rate = 16000);

struct SourceOptions {
  double train_minutes = 30.0;   // speech minutes in the train split
  double valid_minutes = 4.0;
  int test_utterances = 30;
  int speakers_train = 24;
  int speakers_valid = 4;
  int speakers_test = 6;
  double min_seconds = 2.5;
  double max_seconds = 5.0;
  double noise_seconds = 60.0;   // per noise instance
  int noise_instances = 2;       // per family and split
  std::vector<double> snrs{-5.0, 0.0, 5.0};
  // Noise types seen in train/valid and the disjoint set used for test.
  std::vector<NoiseFamily> train_noise{NoiseFamily::kPink, NoiseFamily::kHum,
                                       NoiseFamily::kTraffic, NoiseFamily::kWind};
  std::vector<NoiseFamily> test_noise{NoiseFamily::kBabble, NoiseFamily::kClatter};
  std::uint64_t seed = 1;
  int sample_rate = 16000;
  int jobs = 1;
};

/// Writes speech/ and noise/ WAVs under `out_dir` plus `sources.tsv`, a
/// dataset manifest. Speakers are disjoint across splits, noise instances
/// too; test noise types are disjoint from train/valid types. Test SNRs
/// cycle through `snrs` so buckets are balanced.
DatasetManifest GenerateSources(const std::string &out_dir,
                                const SourceOptions &options);

}  // namespace gvae

#endif  // GVAE_CORE_SYNTH_HPP_
