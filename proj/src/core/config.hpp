// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_CONFIG_HPP_
#define GVAE_CORE_CONFIG_HPP_

#include <string>
#include <vector>

#include "core/classifier.hpp"
#include "core/mcem.hpp"
#include "core/nn.hpp"
#include "core/signal.hpp"
#include "core/vae.hpp"

namespace gvae {

struct PathConfig {
  std::string manifest;    // dataset manifest for synth-data
  std::string corpus;      // materialized corpus directory
  std::string vae;         // VAE checkpoint
  std::string classifier;  // classifier checkpoint (dnn backends)
  std::string supervised;  // mask network checkpoint
  std::string output;      // output directory
};

/// Everything a command needs. Defaults follow the published
/// hyperparameters where given.
struct RunConfig {
  StftConfig stft;
  VaeVariant variant = VaeVariant::kM1;
  int latent_dim = 16;
  std::vector<int> vae_hidden{128, 128};
  TrainConfig train;
  McemConfig mcem;
  PathConfig paths;
  ClassifierBackend backend = ClassifierBackend::kNone;
  std::vector<int> classifier_hidden{128, 128};
  std::vector<int> supervised_hidden{128, 128, 128, 128, 128};
  double vad_floor_db = kDefaultVadFloorDb;
  int jobs = 1;

  int bins() const { return stft.n_fft / 2 + 1; }
};

/// Keys are "section.name". Every key in the document is listed by
/// ConfigKeys() together with its default.
std::vector<std::string> ConfigKeys();

/// Parses INI text ("[section]" headers, "key = value" lines, '#' or ';'
/// comments) on top of the defaults. All unknown keys and bad values are
/// collected into a single kConfig error.
RunConfig ParseConfig(const std::string &text);
RunConfig LoadConfig(const std::string &path);

/// Explicit path if non-empty, else $GVAE_CONFIG, else "" (defaults).
std::string ResolveConfigPath(const std::string &explicit_path);

/// Sets one key from its textual value (the flag override path).
void SetConfigValue(RunConfig &cfg, const std::string &key,
                    const std::string &value);
std::string GetConfigValue(const RunConfig &cfg, const std::string &key);

/// Range and consistency checks; lists every offending key.
void ValidateConfig(const RunConfig &cfg);

/// Canonical INI rendering with every key.
std::string FormatConfig(const RunConfig &cfg);

/// FNV-1a 64-bit of FormatConfig with run.jobs at 1, as 16 hex digits.
std::string ConfigHash(const RunConfig &cfg);
std::uint64_t Fnv1a64(const std::string &data);

}  // namespace gvae

#endif  // GVAE_CORE_CONFIG_HPP_
