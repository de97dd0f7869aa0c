// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <filesystem>

#include "core/corpus.hpp"
#include "core/wav.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace gvae;
using gvae::testing::CodeOf;
using gvae::testing::MessageOf;
using gvae::testing::RandomWave;
using gvae::testing::Slurp;
using gvae::testing::TempDir;

namespace {

// Three clean files and one noise file; manifest over the SNR grid.
DatasetManifest SmallManifest(const TempDir &dir, long long offset = -1) {
  for (int i = 0; i < 3; ++i) {
    Waveform w = RandomWave(4000 + 500 * i, 10 + i, 0.3);
    // Silent lead-in so VAD has something to reject.
    for (int k = 0; k < 1500; ++k) w.samples[k] = 0.0;
    WriteWav(dir / ("clean" + std::to_string(i) + ".wav"), w);
  }
  WriteWav(dir / "noise.wav", RandomWave(12000, 20, 0.2));
  DatasetManifest m;
  std::uint64_t seed = 1;
  for (int i = 0; i < 3; ++i)
    for (double snr : {-5.0, 0.0, 5.0})
      m.records.push_back(ManifestRecord{
          dir / ("clean" + std::to_string(i) + ".wav"), dir / "noise.wav",
          offset, snr, i == 2 ? Split::kTest : Split::kTrain, seed++});
  return m;
}

}  // namespace

TEST_CASE("manifest text round trip") {
  DatasetManifest m;
  m.records.push_back({"a.wav", "n.wav", 12, -5.0, Split::kTrain, 3});
  m.records.push_back({"b.wav", "n.wav", -1, 2.5, Split::kTest, 99});
  DatasetManifest back = ParseManifest(FormatManifest(m));
  REQUIRE(back.records.size() == 2);
  CHECK(back.records[1].clean_path == "b.wav");
  CHECK(back.records[1].noise_offset == -1);
  CHECK(back.records[1].snr_db == 2.5);
  CHECK(back.records[1].split == Split::kTest);
  CHECK(back.records[1].rng_seed == 99);
  CHECK(FormatManifest(back) == FormatManifest(m));
}

TEST_CASE("manifest relative paths resolve against the base dir") {
  DatasetManifest m =
      ParseManifest("a.wav\t/abs/n.wav\t0\t0\tvalid\t1\n", "/data/set");
  CHECK(m.records[0].clean_path == "/data/set/a.wav");
  CHECK(m.records[0].noise_path == "/abs/n.wav");
  CHECK(m.records[0].split == Split::kValid);
}

TEST_CASE("manifest errors carry the line number") {
  CHECK(CodeOf([] { ParseManifest("a\tb\t0\n"); }) == ErrorCode::kFormat);
  CHECK(MessageOf([] { ParseManifest("# c\na\tb\tx\t0\ttrain\t1\n"); })
            .find("line 2") != std::string::npos);
  CHECK(CodeOf([] { ParseManifest("a\tb\t0\t0\tdev\t1\n"); }) ==
        ErrorCode::kFormat);
}

TEST_CASE("three clean files over the SNR grid give nine mixtures") {
  TempDir dir("corpus");
  CorpusIndex idx = SynthesizeDataset(SmallManifest(dir), dir / "out", {});
  CHECK(idx.entries.size() == 9);
  CorpusIndex reread = ReadCorpusIndex(dir / "out");
  REQUIRE(reread.entries.size() == 9);
  CHECK(reread.entries[4].snr_db == 0.0);
  CHECK(reread.Select(Split::kTest).size() == 3);
  CHECK(reread.Select(Split::kTrain).size() == 6);
  for (const CorpusEntry &e : reread.entries) {
    Utterance u = LoadUtterance(reread, e);
    CHECK(u.id == e.id);
    CHECK(u.mixture.samples.size() == u.clean.samples.size());
    const Eigen::Index frames =
        FrameCount(u.clean.samples.size(), 1024, 256);
    CHECK(u.vad.frames() == frames);
    CHECK(u.ibm.frames() == frames);
    CHECK(u.ibm.dim() == 513);
    CHECK(u.vad.values(0, 0) == 0.0);  // silent lead-in
    CHECK(u.vad.values.maxCoeff() == 1.0);
  }
}

TEST_CASE("stored mixture is clean plus noise at the target SNR") {
  TempDir dir("corpus");
  CorpusIndex idx = SynthesizeDataset(SmallManifest(dir), dir / "out", {});
  for (const CorpusEntry &e : idx.entries) {
    Utterance u = LoadUtterance(idx, e);
    const double snr = 10.0 * std::log10(MeanPower(u.clean.samples) /
                                         MeanPower(u.noise.samples));
    CHECK(std::abs(snr - e.snr_db) < 0.01);  // 16-bit quantization
    for (std::size_t i = 0; i < u.mixture.samples.size(); i += 97)
      CHECK(std::abs(u.mixture.samples[i] -
                     (u.clean.samples[i] + u.noise.samples[i])) <= 1.6 / 32768);
  }
}

TEST_CASE("equal-power sources at 0 dB keep the noise at unit scale") {
  TempDir dir("corpus");
  std::vector<double> s(3000), n(3000);
  for (int i = 0; i < 3000; ++i) {
    s[i] = (i % 2 ? 0.25 : -0.25);
    n[i] = (i % 3 ? 0.25 : -0.25);
  }
  WriteWav(dir / "s.wav", Waveform{s, 16000});
  WriteWav(dir / "n.wav", Waveform{n, 16000});
  DatasetManifest m;
  m.records.push_back({dir / "s.wav", dir / "n.wav", 0, 0.0, Split::kTrain, 1});
  CorpusIndex idx = SynthesizeDataset(m, dir / "out", {});
  Utterance u = LoadUtterance(idx, idx.entries[0]);
  CHECK(u.noise.samples == ReadWav(dir / "n.wav").samples);
}

TEST_CASE("same manifest twice gives byte-identical corpora, any job count") {
  TempDir dir("corpus");
  DatasetManifest m = SmallManifest(dir);
  SynthesizeDataset(m, dir / "a", {});
  SynthesisOptions par;
  par.jobs = 4;
  SynthesizeDataset(m, dir / "b", par);
  for (const auto &entry :
       std::filesystem::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), dir / "a");
    CHECK(Slurp(entry.path().string()) ==
          Slurp((std::filesystem::path(dir / "b") / rel).string()));
  }
}

TEST_CASE("explicit and seeded noise offsets") {
  TempDir dir("corpus");
  CorpusIndex a = SynthesizeDataset(SmallManifest(dir, 0), dir / "a", {});
  Utterance u = LoadUtterance(a, a.entries[0]);
  // With offset 0 the noise track is a scaled prefix of the noise file.
  Waveform raw = ReadWav(dir / "noise.wav");
  const double k = u.noise.samples[10] / raw.samples[10];
  for (std::size_t i = 0; i < 200; ++i)
    CHECK(std::abs(u.noise.samples[i] - k * raw.samples[i]) <= 2.0 / 32768);
}

TEST_CASE("synthesis errors name the record") {
  TempDir dir("corpus");
  DatasetManifest m = SmallManifest(dir);
  m.records[4].noise_path = dir / "missing.wav";
  std::string msg = MessageOf([&] { SynthesizeDataset(m, dir / "out", {}); });
  CHECK(msg.find("record 4") != std::string::npos);
  CHECK(CodeOf([&] { SynthesizeDataset(m, dir / "out", {}); }) ==
        ErrorCode::kIo);
}

TEST_CASE("label container round trip") {
  TempDir dir("corpus");
  LabelSeq vad{LabelKind::kVad, Eigen::MatrixXd::Ones(4, 1)};
  LabelSeq ibm{LabelKind::kIbm, Eigen::MatrixXd::Zero(4, 3)};
  ibm.values(2, 1) = 1.0;
  SaveLabels(dir / "l.gvl", vad, ibm);
  LabelSeq v2, i2;
  LoadLabels(dir / "l.gvl", &v2, &i2);
  CHECK(v2.values == vad.values);
  CHECK(i2.values == ibm.values);
  CHECK(i2.kind == LabelKind::kIbm);
}
