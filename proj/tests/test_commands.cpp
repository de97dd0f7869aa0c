// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <filesystem>
#include <sstream>

#include "core/commands.hpp"
#include "core/rng.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace gvae;
using gvae::testing::CodeOf;
using gvae::testing::Slurp;
using gvae::testing::TempDir;

namespace fs = std::filesystem;

namespace {

SourceOptions Tiny() {
  SourceOptions o;
  o.train_minutes = 0.3;
  o.valid_minutes = 0.1;
  o.test_utterances = 3;
  o.speakers_train = 2;
  o.speakers_valid = 1;
  o.speakers_test = 1;
  o.min_seconds = 1.0;
  o.max_seconds = 1.5;
  o.noise_seconds = 3.0;
  o.noise_instances = 1;
  return o;
}

// Sources, corpus and a briefly trained small M1 under dir.
RunConfig SmallPipeline(const TempDir &dir) {
  RunConfig cfg;
  cfg.vae_hidden = {16};
  cfg.latent_dim = 4;
  cfg.train.max_epochs = 2;
  cfg.train.batch_size = 64;
  cfg.mcem.n_iters = 4;
  cfg.mcem.samples = 3;
  cfg.mcem.burn_in = 1;
  cfg.mcem.rank = 2;
  cfg.paths.manifest = dir / "src/sources.tsv";
  cfg.paths.corpus = dir / "corpus";
  cfg.paths.vae = dir / "m1.gvae";
  GenSources(cfg, Tiny(), dir / "src");
  SynthData(cfg);
  TrainVaeCommand(cfg, nullptr);
  return cfg;
}

}  // namespace

TEST_CASE("build-vae writes checkpoints with the documented sizes") {
  TempDir dir("build");
  RunConfig cfg;
  const std::pair<VaeVariant, const char *> cases[] = {
      {VaeVariant::kM1, "params=171297\n"},
      {VaeVariant::kM2Vad, "params=171553\n"},
      {VaeVariant::kM2Ibm, "params=302625\n"}};
  for (const auto &[variant, head] : cases) {
    cfg.variant = variant;
    cfg.paths.vae = dir / (std::string(VariantName(variant)) + ".gvae");
    BuildVae(cfg);
    CHECK(InspectCheckpoint(cfg.paths.vae).rfind(head, 0) == 0);
    CHECK(fs::exists(cfg.paths.vae + ".stamp"));
  }
  cfg.paths.vae.clear();
  CHECK(CodeOf([&] { BuildVae(cfg); }) == ErrorCode::kConfig);
}

TEST_CASE("a stamp parses back as the config it records") {
  RunConfig cfg;
  cfg.variant = VaeVariant::kM2Ibm;
  cfg.mcem.seed = 99;
  cfg.paths.corpus = "c";
  const std::string stamp = StampText("evaluate", cfg);
  CHECK(stamp.find("# command=evaluate\n") != std::string::npos);
  CHECK(stamp.find("# config_hash=" + ConfigHash(cfg) + "\n") != std::string::npos);
  CHECK(stamp.find("# mcem_seed=99\n") != std::string::npos);
  const RunConfig back = ParseConfig(stamp);
  CHECK(FormatConfig(back) == FormatConfig(cfg));
}

TEST_CASE("system specs") {
  SystemSpec s = ParseSystemSpec("mixture");
  CHECK(s.kind == "mixture");
  s = ParseSystemSpec("supervised=a.gvae");
  CHECK(s.kind == "supervised");
  CHECK(s.checkpoint == "a.gvae");
  s = ParseSystemSpec("vae=m2.gvae,dnn-ibm,clf.gvae");
  CHECK(s.kind == "vae");
  CHECK(s.checkpoint == "m2.gvae");
  CHECK(s.backend == ClassifierBackend::kDnnIbm);
  CHECK(s.classifier_checkpoint == "clf.gvae");
  CHECK(ParseSystemSpec("vae=m1.gvae").backend == ClassifierBackend::kNone);
  for (const char *bad : {"mixture=x", "supervised", "supervised=a,b", "vae",
                          "vae=a,b,c,d", "wiener=x"})
    CHECK(CodeOf([&] { ParseSystemSpec(bad); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { ParseSystemSpec("vae=a,telepathy"); }) != static_cast<ErrorCode>(0));

  RunConfig cfg;
  CHECK(DefaultSystems(cfg).size() == 1);
  cfg.paths.vae = "m.gvae";
  cfg.paths.supervised = "s.gvae";
  const auto all = DefaultSystems(cfg);
  REQUIRE(all.size() == 3);
  CHECK(all[1].kind == "supervised");
  CHECK(all[2].kind == "vae");
}

TEST_CASE("utterance seeds depend on the id and the base only") {
  CHECK(UtteranceSeed(0, "test_0001") == UtteranceSeed(0, "test_0001"));
  CHECK(UtteranceSeed(0, "test_0001") != UtteranceSeed(0, "test_0002"));
  CHECK(UtteranceSeed(0, "test_0001") != UtteranceSeed(1, "test_0001"));
  CHECK(UtteranceSeed(5, "x") == DeriveSeed(5, Fnv1a64("x")));
}

TEST_CASE("a guided model without a classifier backend is a config error") {
  TempDir dir("m2none");
  RunConfig cfg;
  cfg.variant = VaeVariant::kM2Ibm;
  cfg.paths.vae = dir / "m2.gvae";
  BuildVae(cfg);
  EnhanceRequest req;
  req.input_wav = dir / "in.wav";
  req.output_wav = dir / "out.wav";
  CHECK(CodeOf([&] { EnhanceCommand(cfg, req, nullptr); }) == ErrorCode::kConfig);
  cfg.backend = ClassifierBackend::kDnnVad;
  CHECK(CodeOf([&] { EnhanceCommand(cfg, req, nullptr); }) == ErrorCode::kConfig);
}

TEST_CASE("pipeline: train, enhance and evaluate; workers do not change results") {
  TempDir dir("pipeline");
  RunConfig cfg = SmallPipeline(dir);
  CHECK(fs::exists(cfg.paths.vae));
  CHECK(fs::exists(cfg.paths.vae + ".history.tsv"));
  CHECK(InspectCheckpoint(cfg.paths.vae).find("variant=M1") != std::string::npos);

  // Mixture only: a single row, written next to a stamp.
  cfg.paths.output = dir / "eval_mix";
  EvalReport mix = EvaluateCommand(cfg, {ParseSystemSpec("mixture")}, Split::kTest, nullptr);
  CHECK(mix.rows.size() == 1);
  CHECK(fs::exists(dir / "eval_mix/report.tsv"));
  CHECK(fs::exists(dir / "eval_mix/scores.tsv"));
  CHECK(ParseConfig(Slurp(dir / "eval_mix/report.stamp")).paths.output == cfg.paths.output);

  const std::vector<SystemSpec> systems{ParseSystemSpec("mixture"),
                                        ParseSystemSpec("vae=" + cfg.paths.vae)};
  cfg.jobs = 1;
  cfg.paths.output = dir / "eval1";
  EvalReport a = EvaluateCommand(cfg, systems, Split::kTest, nullptr);
  cfg.jobs = 3;
  cfg.paths.output = dir / "eval3";
  EvaluateCommand(cfg, systems, Split::kTest, nullptr);
  CHECK(a.rows.size() == 2);
  CHECK(a.rows[1].model == "M1");
  CHECK(Slurp(dir / "eval1/report.tsv") == Slurp(dir / "eval3/report.tsv"));
  CHECK(Slurp(dir / "eval1/scores.tsv") == Slurp(dir / "eval3/scores.tsv"));

  cfg.jobs = 1;
  cfg.paths.output = dir / "enh1";
  EnhanceCommand(cfg, EnhanceRequest{}, nullptr);
  cfg.jobs = 3;
  cfg.paths.output = dir / "enh3";
  std::ostringstream log;
  EnhanceCommand(cfg, EnhanceRequest{}, &log);
  CHECK(log.str().find("3 utterances") != std::string::npos);
  int files = 0;
  for (const auto &e : fs::directory_iterator(dir / "enh1/enhanced")) {
    const std::string name = e.path().filename().string();
    CHECK(Slurp(e.path().string()) == Slurp(dir / ("enh3/enhanced/" + name)));
    ++files;
  }
  CHECK(files == 3);

  // Single-file mode with a trace.
  EnhanceRequest one;
  one.input_wav = (fs::directory_iterator(dir / "enh1/enhanced"))->path().string();
  one.output_wav = dir / "single/out.wav";
  one.trace_path = dir / "single/trace.tsv";
  EnhanceCommand(cfg, one, nullptr);
  CHECK(fs::exists(one.output_wav));
  CHECK(Slurp(one.trace_path).rfind("iter\tQ\tacceptance\n", 0) == 0);
}

TEST_CASE("evaluate needs a corpus with the requested split") {
  TempDir dir("noeval");
  RunConfig cfg;
  CHECK(CodeOf([&] { EvaluateCommand(cfg, {}, Split::kTest, nullptr); }) ==
        ErrorCode::kConfig);
}
