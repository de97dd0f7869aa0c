// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_CORPUS_HPP_
#define GVAE_CORE_CORPUS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "core/labels.hpp"
#include "core/signal.hpp"

namespace gvae {

enum class Split { kTrain, kValid, kTest };

const char *SplitName(Split s);
Split ParseSplit(const std::string &s);

/// One line of a dataset manifest. A negative noise_offset means "draw the
/// offset from rng_seed".
struct ManifestRecord {
  std::string clean_path;
  std::string noise_path;
  long long noise_offset = -1;
  double snr_db = 0.0;
  Split split = Split::kTrain;
  std::uint64_t rng_seed = 0;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;
};

/// Tab-separated, one record per line in field order
/// clean, noise, offset, snr_db, split, seed. '#' starts a comment line.
/// Relative paths are resolved against `base_dir`.
DatasetManifest ParseManifest(const std::string &text,
                              const std::string &base_dir = "");
DatasetManifest ReadManifest(const std::string &path);
std::string FormatManifest(const DatasetManifest &m);
void WriteManifest(const std::string &path, const DatasetManifest &m);

struct CorpusEntry {
  std::string id;
  Split split = Split::kTrain;
  double snr_db = 0.0;
  std::string mixture_path;
  std::string clean_path;
  std::string noise_path;
  std::string labels_path;
};

struct CorpusIndex {
  std::string root;
  std::vector<CorpusEntry> entries;

  std::vector<const CorpusEntry *> Select(Split split) const;
};

struct SynthesisOptions {
  StftConfig stft;
  double vad_floor_db = kDefaultVadFloorDb;
  int jobs = 1;
};

/// Materializes every manifest record under `out_dir`: mixture, clean and
/// scaled-noise WAVs plus a label container with VAD (N x 1) and IBM (N x F)
/// arrays, and a corpus.tsv index. Deterministic given the manifest seeds.
CorpusIndex SynthesizeDataset(const DatasetManifest &manifest,
                              const std::string &out_dir,
                              const SynthesisOptions &options);

CorpusIndex ReadCorpusIndex(const std::string &dir);

struct Utterance {
  std::string id;
  Waveform clean;
  Waveform noise;
  Waveform mixture;
  LabelSeq vad;
  LabelSeq ibm;
};

Utterance LoadUtterance(const CorpusIndex &index, const CorpusEntry &entry);

void SaveLabels(const std::string &path, const LabelSeq &vad,
                const LabelSeq &ibm);
void LoadLabels(const std::string &path, LabelSeq *vad, LabelSeq *ibm);

}  // namespace gvae

#endif  // GVAE_CORE_CORPUS_HPP_
