// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gvae/gvae.h"

#include <cstdlib>
#include <cstring>
#include <mutex>
#include <new>
#include <ostream>
#include <streambuf>
#include <string>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/commands.hpp"
#include "core/config.hpp"
#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/wav.hpp"

struct gvae_config {
  gvae::RunConfig cfg;
};

struct gvae_model {
  gvae::Checkpoint ck;
};

namespace {

thread_local std::string g_last_error;

std::mutex g_log_mu;
gvae_log_fn g_log_fn = nullptr;
void *g_log_user = nullptr;

// Forwards complete lines to the registered callback.
class LineBuf : public std::streambuf {
 protected:
  int overflow(int ch) override {
    if (ch == traits_type::eof()) return 0;
    if (ch == '\n') {
      Emit();
    } else {
      line_.push_back(static_cast<char>(ch));
    }
    return ch;
  }
  int sync() override { return 0; }

 public:
  ~LineBuf() override {
    if (!line_.empty()) Emit();
  }

 private:
  void Emit() {
    std::lock_guard<std::mutex> lock(g_log_mu);
    if (g_log_fn != nullptr) g_log_fn(line_.c_str(), g_log_user);
    line_.clear();
  }
  std::string line_;
};

gvae_status Fail(gvae_status s, const std::string &msg) {
  g_last_error = msg;
  return s;
}

template <typename Fn>
gvae_status Guard(Fn &&fn) {
  try {
    fn();
    g_last_error.clear();
    return GVAE_OK;
  } catch (const gvae::Error &e) {
    return Fail(static_cast<gvae_status>(e.code()), e.what());
  } catch (const std::bad_alloc &) {
    return Fail(GVAE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return Fail(GVAE_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(GVAE_ERR_INTERNAL, "unknown error");
  }
}

char *Dup(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void NotNull(const void *p, const char *what) {
  if (p == nullptr)
    gvae::Fail(gvae::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

gvae::Split ToSplit(gvae_split s) {
  switch (s) {
    case GVAE_SPLIT_TRAIN: return gvae::Split::kTrain;
    case GVAE_SPLIT_VALID: return gvae::Split::kValid;
    case GVAE_SPLIT_TEST: return gvae::Split::kTest;
  }
  gvae::Fail(gvae::ErrorCode::kInvalidArgument, "bad split");
}

// Runs a command with a log stream bound to the callback.
template <typename Fn>
gvae_status Command(const gvae_config *cfg, Fn &&fn) {
  return Guard([&] {
    NotNull(cfg, "config");
    LineBuf buf;
    std::ostream log(&buf);
    bool enabled;
    {
      std::lock_guard<std::mutex> lock(g_log_mu);
      enabled = g_log_fn != nullptr;
    }
    fn(cfg->cfg, enabled ? &log : nullptr);
  });
}

}  // namespace

extern "C" {

const char *gvae_version(void) { return gvae::LibraryVersion(); }

const char *gvae_status_name(gvae_status status) {
  if (status == GVAE_OK) return "ok";
  if (status < GVAE_ERR_INVALID_ARGUMENT || status > GVAE_ERR_INTERNAL)
    return "unknown";
  return gvae::ErrorCodeName(static_cast<gvae::ErrorCode>(status));
}

const char *gvae_last_error(void) { return g_last_error.c_str(); }

void gvae_set_log(gvae_log_fn fn, void *user) {
  std::lock_guard<std::mutex> lock(g_log_mu);
  g_log_fn = fn;
  g_log_user = user;
}

void gvae_string_free(char *s) { std::free(s); }
void gvae_samples_free(double *samples) { std::free(samples); }

gvae_status gvae_config_create(gvae_config **out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new gvae_config{};
  });
}

gvae_status gvae_config_load(const char *path, gvae_config **out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = nullptr;
    const std::string p = gvae::ResolveConfigPath(path == nullptr ? "" : path);
    auto *c = new gvae_config{};
    try {
      if (!p.empty()) c->cfg = gvae::LoadConfig(p);
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
  });
}

gvae_status gvae_config_set(gvae_config *cfg, const char *key,
                            const char *value) {
  return Guard([&] {
    NotNull(cfg, "config");
    NotNull(key, "key");
    NotNull(value, "value");
    gvae::SetConfigValue(cfg->cfg, key, value);
  });
}

gvae_status gvae_config_get(const gvae_config *cfg, const char *key,
                            char **value) {
  return Guard([&] {
    NotNull(cfg, "config");
    NotNull(key, "key");
    NotNull(value, "value");
    *value = Dup(gvae::GetConfigValue(cfg->cfg, key));
  });
}

gvae_status gvae_config_validate(const gvae_config *cfg) {
  return Guard([&] {
    NotNull(cfg, "config");
    gvae::ValidateConfig(cfg->cfg);
  });
}

gvae_status gvae_config_format(const gvae_config *cfg, char **text) {
  return Guard([&] {
    NotNull(cfg, "config");
    NotNull(text, "text");
    *text = Dup(gvae::FormatConfig(cfg->cfg));
  });
}

gvae_status gvae_config_hash(const gvae_config *cfg, char out[17]) {
  return Guard([&] {
    NotNull(cfg, "config");
    NotNull(out, "out");
    const std::string h = gvae::ConfigHash(cfg->cfg);
    std::memcpy(out, h.c_str(), 17);
  });
}

void gvae_config_destroy(gvae_config *cfg) { delete cfg; }

void gvae_source_options_default(gvae_source_options *opts) {
  if (opts == nullptr) return;
  const gvae::SourceOptions d;
  opts->train_minutes = d.train_minutes;
  opts->valid_minutes = d.valid_minutes;
  opts->test_utterances = d.test_utterances;
  opts->speakers_train = d.speakers_train;
  opts->speakers_valid = d.speakers_valid;
  opts->speakers_test = d.speakers_test;
  opts->min_seconds = d.min_seconds;
  opts->max_seconds = d.max_seconds;
  opts->noise_seconds = d.noise_seconds;
  opts->noise_instances = d.noise_instances;
  opts->seed = d.seed;
}

gvae_status gvae_gen_sources(const gvae_config *cfg,
                             const gvae_source_options *opts,
                             const char *out_dir) {
  return Command(cfg, [&](const gvae::RunConfig &c, std::ostream *) {
    NotNull(opts, "options");
    NotNull(out_dir, "out_dir");
    gvae::SourceOptions o;
    o.train_minutes = opts->train_minutes;
    o.valid_minutes = opts->valid_minutes;
    o.test_utterances = opts->test_utterances;
    o.speakers_train = opts->speakers_train;
    o.speakers_valid = opts->speakers_valid;
    o.speakers_test = opts->speakers_test;
    o.min_seconds = opts->min_seconds;
    o.max_seconds = opts->max_seconds;
    o.noise_seconds = opts->noise_seconds;
    o.noise_instances = opts->noise_instances;
    o.seed = opts->seed;
    o.sample_rate = 16000;
    gvae::GenSources(c, o, out_dir);
  });
}

gvae_status gvae_synth_data(const gvae_config *cfg) {
  return Command(cfg, [](const gvae::RunConfig &c, std::ostream *) {
    gvae::SynthData(c);
  });
}

gvae_status gvae_build_vae(const gvae_config *cfg) {
  return Command(cfg, [](const gvae::RunConfig &c, std::ostream *) {
    gvae::BuildVae(c);
  });
}

gvae_status gvae_train_vae(const gvae_config *cfg) {
  return Command(cfg, [](const gvae::RunConfig &c, std::ostream *log) {
    gvae::TrainVaeCommand(c, log);
  });
}

gvae_status gvae_train_classifier(const gvae_config *cfg,
                                  gvae_label_kind kind) {
  return Command(cfg, [&](const gvae::RunConfig &c, std::ostream *log) {
    if (kind != GVAE_LABEL_VAD && kind != GVAE_LABEL_IBM)
      gvae::Fail(gvae::ErrorCode::kInvalidArgument, "bad label kind");
    gvae::TrainClassifierCommand(
        c, kind == GVAE_LABEL_VAD ? gvae::LabelKind::kVad : gvae::LabelKind::kIbm,
        log);
  });
}

gvae_status gvae_train_supervised(const gvae_config *cfg) {
  return Command(cfg, [](const gvae::RunConfig &c, std::ostream *log) {
    gvae::TrainSupervisedCommand(c, log);
  });
}

gvae_status gvae_enhance_file(const gvae_config *cfg, const char *input_wav,
                              const char *output_wav, const char *trace_path) {
  return Command(cfg, [&](const gvae::RunConfig &c, std::ostream *log) {
    NotNull(input_wav, "input_wav");
    NotNull(output_wav, "output_wav");
    gvae::EnhanceRequest req;
    req.input_wav = input_wav;
    req.output_wav = output_wav;
    if (trace_path != nullptr) req.trace_path = trace_path;
    gvae::EnhanceCommand(c, req, log);
  });
}

gvae_status gvae_enhance_corpus(const gvae_config *cfg, gvae_split split) {
  return Command(cfg, [&](const gvae::RunConfig &c, std::ostream *log) {
    gvae::EnhanceRequest req;
    req.split = ToSplit(split);
    gvae::EnhanceCommand(c, req, log);
  });
}

gvae_status gvae_evaluate(const gvae_config *cfg, const char *const *systems,
                          size_t n_systems, gvae_split split,
                          char **report_tsv, char **report_text) {
  return Command(cfg, [&](const gvae::RunConfig &c, std::ostream *log) {
    std::vector<gvae::SystemSpec> specs;
    if (n_systems > 0) NotNull(systems, "systems");
    for (size_t i = 0; i < n_systems; ++i) {
      NotNull(systems[i], "system");
      specs.push_back(gvae::ParseSystemSpec(systems[i]));
    }
    if (specs.empty()) specs = gvae::DefaultSystems(c);
    const gvae::EvalReport r = gvae::EvaluateCommand(c, specs, ToSplit(split), log);
    char *tsv = report_tsv != nullptr ? Dup(r.ToTsv()) : nullptr;
    if (report_text != nullptr) {
      try {
        *report_text = Dup(r.ToText());
      } catch (...) {
        std::free(tsv);
        throw;
      }
    }
    if (report_tsv != nullptr) *report_tsv = tsv;
  });
}

gvae_status gvae_model_load(const char *path, gvae_model **out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new gvae_model{gvae::Checkpoint::Load(path)};
  });
}

gvae_status gvae_model_parameter_count(const gvae_model *model,
                                       uint64_t *count) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(count, "count");
    *count = model->ck.ParameterCount();
  });
}

gvae_status gvae_model_describe(const gvae_model *model, char **text) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(text, "text");
    *text = Dup(gvae::DescribeCheckpoint(model->ck));
  });
}

void gvae_model_destroy(gvae_model *model) { delete model; }

gvae_status gvae_si_sdr(const double *estimate, const double *reference,
                        size_t n, double *out_db) {
  return Guard([&] {
    NotNull(out_db, "out_db");
    if (n > 0) {
      NotNull(estimate, "estimate");
      NotNull(reference, "reference");
    }
    *out_db = gvae::SiSdr(std::span<const double>(estimate, n),
                          std::span<const double>(reference, n));
  });
}

gvae_status gvae_wav_read(const char *path, double **samples, size_t *n,
                          int *sample_rate) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(samples, "samples");
    NotNull(n, "n");
    const gvae::Waveform w = gvae::ReadWav(path);
    auto *buf = static_cast<double *>(
        std::malloc(std::max<size_t>(1, w.samples.size()) * sizeof(double)));
    if (buf == nullptr) throw std::bad_alloc();
    std::memcpy(buf, w.samples.data(), w.samples.size() * sizeof(double));
    *samples = buf;
    *n = w.samples.size();
    if (sample_rate != nullptr) *sample_rate = w.sample_rate;
  });
}

gvae_status gvae_wav_write(const char *path, const double *samples, size_t n,
                           int sample_rate) {
  return Guard([&] {
    NotNull(path, "path");
    if (n > 0) NotNull(samples, "samples");
    gvae::Waveform w{std::vector<double>(samples, samples + n), sample_rate};
    gvae::WriteWav(path, w);
  });
}

}  // extern "C"
