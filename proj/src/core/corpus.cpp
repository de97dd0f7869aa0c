// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/checkpoint.hpp"
#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/textio.hpp"
#include "core/wav.hpp"

namespace fs = std::filesystem;

namespace gvae {
namespace {

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, '\t')) out.push_back(cur);
  return out;
}

std::string Resolve(const std::string &base, const std::string &p) {
  if (base.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).string();
}

}  // namespace

const char *SplitName(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "?";
}

Split ParseSplit(const std::string &s) {
  if (s == "train") return Split::kTrain;
  if (s == "valid") return Split::kValid;
  if (s == "test") return Split::kTest;
  Fail(ErrorCode::kFormat, "unknown split '" + s + "'");
}

DatasetManifest ParseManifest(const std::string &text,
                              const std::string &base_dir) {
  DatasetManifest m;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 6)
      Fail(ErrorCode::kFormat, "manifest line " + std::to_string(line_no) +
                                   ": expected 6 tab-separated fields");
    ManifestRecord r;
    try {
      r.clean_path = Resolve(base_dir, fields[0]);
      r.noise_path = Resolve(base_dir, fields[1]);
      r.noise_offset = std::stoll(fields[2]);
      r.snr_db = std::stod(fields[3]);
      r.split = ParseSplit(fields[4]);
      r.rng_seed = std::stoull(fields[5]);
    } catch (const std::logic_error &) {
      Fail(ErrorCode::kFormat,
           "manifest line " + std::to_string(line_no) + ": bad number");
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

DatasetManifest ReadManifest(const std::string &path) {
  return ParseManifest(ReadText(path), fs::path(path).parent_path().string());
}

std::string FormatManifest(const DatasetManifest &m) {
  std::ostringstream out;
  out << "# clean\tnoise\tnoise_offset\tsnr_db\tsplit\tseed\n";
  for (const ManifestRecord &r : m.records) {
    char snr[32];
    std::snprintf(snr, sizeof snr, "%.17g", r.snr_db);
    out << r.clean_path << '\t' << r.noise_path << '\t' << r.noise_offset
        << '\t' << snr << '\t' << SplitName(r.split) << '\t' << r.rng_seed
        << '\n';
  }
  return out.str();
}

void WriteManifest(const std::string &path, const DatasetManifest &m) {
  WriteText(path, FormatManifest(m));
}

std::vector<const CorpusEntry *> CorpusIndex::Select(Split split) const {
  std::vector<const CorpusEntry *> out;
  for (const CorpusEntry &e : entries)
    if (e.split == split) out.push_back(&e);
  return out;
}

void SaveLabels(const std::string &path, const LabelSeq &vad,
                const LabelSeq &ibm) {
  Checkpoint ck;
  ck.header["kind"] = "labels";
  ck.AddArray("vad", vad.values);
  ck.AddArray("ibm", ibm.values);
  ck.Save(path);
}

void LoadLabels(const std::string &path, LabelSeq *vad, LabelSeq *ibm) {
  const Checkpoint ck = Checkpoint::Load(path);
  if (vad != nullptr) *vad = LabelSeq{LabelKind::kVad, ck.Array("vad")};
  if (ibm != nullptr) *ibm = LabelSeq{LabelKind::kIbm, ck.Array("ibm")};
}

CorpusIndex SynthesizeDataset(const DatasetManifest &manifest,
                              const std::string &out_dir,
                              const SynthesisOptions &options) {
  for (const char *sub : {"mix", "clean", "noise", "labels"})
    fs::create_directories(fs::path(out_dir) / sub);

  CorpusIndex index;
  index.root = out_dir;
  index.entries.resize(manifest.records.size());
  ParallelFor(manifest.records.size(), options.jobs, [&](std::size_t i) {
    const ManifestRecord &r = manifest.records[i];
    try {
      const Waveform speech = ReadWav(r.clean_path);
      const Waveform noise = ReadWav(r.noise_path);
      Mixture m = r.noise_offset >= 0
                      ? MixAtSnrWithOffset(speech, noise, r.snr_db,
                                           static_cast<std::size_t>(r.noise_offset))
                      : MixAtSnr(speech, noise, r.snr_db, r.rng_seed);
      Waveform clean = speech;
      // Keep the mixture inside the 16-bit range while preserving
      // mixture = clean + noise.
      double peak = 0.0;
      for (double v : m.mixture.samples) peak = std::max(peak, std::abs(v));
      if (peak > 0.99) {
        const double k = 0.99 / peak;
        for (auto *w : {&clean, &m.mixture, &m.scaled_noise})
          for (double &v : w->samples) v *= k;
      }
      char id[32];
      std::snprintf(id, sizeof id, "utt%05zu", i);
      CorpusEntry e;
      e.id = id;
      e.split = r.split;
      e.snr_db = r.snr_db;
      e.mixture_path = std::string("mix/") + id + ".wav";
      e.clean_path = std::string("clean/") + id + ".wav";
      e.noise_path = std::string("noise/") + id + ".wav";
      e.labels_path = std::string("labels/") + id + ".gvl";
      const fs::path root(out_dir);
      WriteWav((root / e.mixture_path).string(), m.mixture);
      WriteWav((root / e.clean_path).string(), clean);
      WriteWav((root / e.noise_path).string(), m.scaled_noise);

      const PowerSpec cp = Power(Stft(clean, options.stft));
      const PowerSpec np = Power(Stft(m.scaled_noise, options.stft));
      SaveLabels((root / e.labels_path).string(),
                 VadLabels(cp, options.vad_floor_db), IbmLabels(cp, np));
      index.entries[i] = std::move(e);
    } catch (const Error &err) {
      throw Error(err.code(),
                  "record " + std::to_string(i) + ": " + err.what());
    }
  });

  std::ostringstream tsv;
  tsv << "# id\tsplit\tsnr_db\tmixture\tclean\tnoise\tlabels\n";
  for (const CorpusEntry &e : index.entries) {
    char snr[32];
    std::snprintf(snr, sizeof snr, "%.17g", e.snr_db);
    tsv << e.id << '\t' << SplitName(e.split) << '\t' << snr << '\t'
        << e.mixture_path << '\t' << e.clean_path << '\t' << e.noise_path
        << '\t' << e.labels_path << '\n';
  }
  WriteText((fs::path(out_dir) / "corpus.tsv").string(), tsv.str());
  return index;
}

CorpusIndex ReadCorpusIndex(const std::string &dir) {
  const std::string text = ReadText((fs::path(dir) / "corpus.tsv").string());
  CorpusIndex index;
  index.root = dir;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = SplitTabs(line);
    if (f.size() != 7) Fail(ErrorCode::kFormat, "bad corpus.tsv line");
    CorpusEntry e;
    e.id = f[0];
    e.split = ParseSplit(f[1]);
    try {
      e.snr_db = std::stod(f[2]);
    } catch (const std::logic_error &) {
      Fail(ErrorCode::kFormat, "bad snr in corpus.tsv");
    }
    e.mixture_path = f[3];
    e.clean_path = f[4];
    e.noise_path = f[5];
    e.labels_path = f[6];
    index.entries.push_back(std::move(e));
  }
  return index;
}

Utterance LoadUtterance(const CorpusIndex &index, const CorpusEntry &entry) {
  const fs::path root(index.root);
  Utterance u;
  u.id = entry.id;
  u.mixture = ReadWav((root / entry.mixture_path).string());
  u.clean = ReadWav((root / entry.clean_path).string());
  u.noise = ReadWav((root / entry.noise_path).string());
  LoadLabels((root / entry.labels_path).string(), &u.vad, &u.ibm);
  return u;
}

}  // namespace gvae
