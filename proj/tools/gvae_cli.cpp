// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Command-line front end. Talks to the library only through gvae.h.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gvae/gvae.h"

namespace {

struct Status {
  gvae_status code = GVAE_OK;
};

// Thrown after a failed library call; main prints it as one line.
struct CallFailed {
  gvae_status code;
  std::string message;
};

void Check(gvae_status s) {
  if (s != GVAE_OK) throw CallFailed{s, gvae_last_error()};
}

void PrintLog(const char *line, void *) { std::fprintf(stderr, "%s\n", line); }

std::string TakeString(char *s) {
  std::string out = s != nullptr ? s : "";
  gvae_string_free(s);
  return out;
}

// Flag values that land in the config, applied after the config file.
struct Overrides {
  std::vector<std::pair<std::string, std::string>> values;

  void Add(CLI::App *app, const std::string &flag, const std::string &key,
           const std::string &help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string &v) { values.emplace_back(key, v); },
        help + " (" + key + ")");
  }
};

gvae_split ParseSplit(const std::string &s) {
  if (s == "train") return GVAE_SPLIT_TRAIN;
  if (s == "valid") return GVAE_SPLIT_VALID;
  if (s == "test") return GVAE_SPLIT_TEST;
  throw CallFailed{GVAE_ERR_INVALID_ARGUMENT, "unknown split: " + s};
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"gvae: guided VAE speech enhancement"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gvae_version()));

  std::string config_path;
  std::vector<std::string> sets;
  bool quiet = false;
  Overrides ov;
  app.add_option("--config", config_path, "INI config (default: $GVAE_CONFIG)");
  app.add_option("--set", sets, "override, section.key=value (repeatable)");
  app.add_flag("-q,--quiet", quiet, "no progress output");
  ov.Add(&app, "--jobs", "run.jobs", "utterance-level worker threads");
  ov.Add(&app, "--seed", "train.seed", "training seed");
  ov.Add(&app, "--mcem-seed", "mcem.seed", "MCEM seed");

  // gen-sources
  auto *gen = app.add_subcommand("gen-sources", "write procedural speech/noise sources and a manifest");
  std::string gen_out;
  gvae_source_options src;
  gvae_source_options_default(&src);
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--train-minutes", src.train_minutes, "train speech minutes");
  gen->add_option("--valid-minutes", src.valid_minutes, "valid speech minutes");
  gen->add_option("--test-utterances", src.test_utterances, "test utterances");
  gen->add_option("--min-seconds", src.min_seconds, "shortest utterance");
  gen->add_option("--max-seconds", src.max_seconds, "longest utterance");
  gen->add_option("--source-seed", src.seed, "generator seed");

  auto *synth = app.add_subcommand("synth-data", "mix sources into a labeled corpus");
  ov.Add(synth, "--manifest", "paths.manifest", "dataset manifest");
  ov.Add(synth, "--corpus", "paths.corpus", "corpus output directory");

  auto *build = app.add_subcommand("build-vae", "write an untrained VAE checkpoint");
  ov.Add(build, "--variant", "model.variant", "M1, M2-VAD or M2-IBM");
  ov.Add(build, "--out", "paths.vae", "checkpoint path");

  auto *tvae = app.add_subcommand("train-vae", "train an M1/M2 speech prior");
  ov.Add(tvae, "--variant", "model.variant", "M1, M2-VAD or M2-IBM");
  ov.Add(tvae, "--corpus", "paths.corpus", "corpus directory");
  ov.Add(tvae, "--out", "paths.vae", "checkpoint path");

  auto *tclf = app.add_subcommand("train-classifier", "train a VAD or IBM classifier");
  std::string kind = "ibm";
  tclf->add_option("--kind", kind, "vad or ibm")->check(CLI::IsMember({"vad", "ibm"}));
  ov.Add(tclf, "--corpus", "paths.corpus", "corpus directory");
  ov.Add(tclf, "--out", "paths.classifier", "checkpoint path");

  auto *tsup = app.add_subcommand("train-supervised", "train the mask baseline");
  ov.Add(tsup, "--corpus", "paths.corpus", "corpus directory");
  ov.Add(tsup, "--out", "paths.supervised", "checkpoint path");

  auto *enh = app.add_subcommand("enhance", "enhance one file or a corpus split");
  std::string in_wav, out_wav, trace, enh_split = "test";
  enh->add_option("--input", in_wav, "noisy WAV (single-file mode)");
  enh->add_option("--output", out_wav, "enhanced WAV (single-file mode)");
  enh->add_option("--trace", trace, "MCEM trace TSV (single-file mode)");
  enh->add_option("--split", enh_split, "corpus split (corpus mode)");
  ov.Add(enh, "--model", "paths.vae", "VAE checkpoint");
  ov.Add(enh, "--classifier", "classifier.backend", "none|dnn-vad|dnn-ibm|spp-ibm|oracle");
  ov.Add(enh, "--classifier-model", "paths.classifier", "classifier checkpoint");
  ov.Add(enh, "--corpus", "paths.corpus", "corpus directory (corpus mode)");
  ov.Add(enh, "--out-dir", "paths.output", "output directory (corpus mode)");
  ov.Add(enh, "--iters", "mcem.n_iters", "MCEM iterations");

  auto *eval = app.add_subcommand("evaluate", "SI-SDR/F1 table over a corpus split");
  std::vector<std::string> systems;
  std::string eval_split = "test";
  eval->add_option("--system", systems,
                   "mixture | supervised=CKPT | vae=CKPT[,BACKEND[,CLF_CKPT]]");
  eval->add_option("--split", eval_split, "corpus split");
  ov.Add(eval, "--corpus", "paths.corpus", "corpus directory");
  ov.Add(eval, "--out-dir", "paths.output", "report directory");
  ov.Add(eval, "--iters", "mcem.n_iters", "MCEM iterations");

  auto *insp = app.add_subcommand("inspect", "print parameter count and checkpoint header");
  std::string ckpt;
  insp->add_option("checkpoint", ckpt, "checkpoint file")->required();

  auto *show = app.add_subcommand("show-config", "print the effective config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  gvae_config *cfg = nullptr;
  int rc = 0;
  try {
    if (!quiet) gvae_set_log(PrintLog, nullptr);
    Check(gvae_config_load(config_path.c_str(), &cfg));
    // Apply every override before reporting, so all bad keys show up at once.
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const std::string &s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos)
        throw CallFailed{GVAE_ERR_CONFIG, "--set expects section.key=value: " + s};
      pairs.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    pairs.insert(pairs.end(), ov.values.begin(), ov.values.end());
    std::string problems;
    for (const auto &[key, value] : pairs) {
      if (gvae_config_set(cfg, key.c_str(), value.c_str()) == GVAE_OK) continue;
      std::string msg = gvae_last_error();
      const std::string prefix = "invalid config: ";
      if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
      problems += (problems.empty() ? "" : "; ") + msg;
    }
    if (!problems.empty())
      throw CallFailed{GVAE_ERR_CONFIG, "invalid config: " + problems};

    if (*gen) {
      Check(gvae_gen_sources(cfg, &src, gen_out.c_str()));
    } else if (*synth) {
      Check(gvae_synth_data(cfg));
    } else if (*build) {
      Check(gvae_build_vae(cfg));
    } else if (*tvae) {
      Check(gvae_train_vae(cfg));
    } else if (*tclf) {
      Check(gvae_train_classifier(cfg, kind == "vad" ? GVAE_LABEL_VAD : GVAE_LABEL_IBM));
    } else if (*tsup) {
      Check(gvae_train_supervised(cfg));
    } else if (*enh) {
      if (!in_wav.empty()) {
        Check(gvae_enhance_file(cfg, in_wav.c_str(), out_wav.c_str(),
                                trace.empty() ? nullptr : trace.c_str()));
      } else {
        Check(gvae_enhance_corpus(cfg, ParseSplit(enh_split)));
      }
    } else if (*eval) {
      std::vector<const char *> ptrs;
      for (const std::string &s : systems) ptrs.push_back(s.c_str());
      char *text = nullptr;
      gvae_set_log(nullptr, nullptr);
      Check(gvae_evaluate(cfg, ptrs.data(), ptrs.size(), ParseSplit(eval_split),
                          nullptr, &text));
      std::fputs(TakeString(text).c_str(), stdout);
    } else if (*insp) {
      gvae_model *m = nullptr;
      Check(gvae_model_load(ckpt.c_str(), &m));
      char *text = nullptr;
      const gvae_status s = gvae_model_describe(m, &text);
      gvae_model_destroy(m);
      Check(s);
      std::fputs(TakeString(text).c_str(), stdout);
    } else if (*show) {
      char *text = nullptr;
      Check(gvae_config_format(cfg, &text));
      std::fputs(TakeString(text).c_str(), stdout);
    }
  } catch (const CallFailed &f) {
    std::fprintf(stderr, "error\t%s\t%s\n", gvae_status_name(f.code), f.message.c_str());
    rc = static_cast<int>(f.code);
  }
  gvae_config_destroy(cfg);
  return rc;
}
