// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "core/error.hpp"
#include "core/textio.hpp"

namespace pt = boost::property_tree;

namespace gvae {
namespace {

std::string Trim(const std::string &s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Parse helpers throw std::invalid_argument with a short reason.
long long ParseInt(const std::string &v) {
  std::size_t used = 0;
  const long long x = std::stoll(v, &used);
  if (used != v.size()) throw std::invalid_argument("not an integer");
  return x;
}

double ParseDouble(const std::string &v) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("not a number");
  return x;
}

std::uint64_t ParseU64(const std::string &v) {
  if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative seed");
  std::size_t used = 0;
  const unsigned long long x = std::stoull(v, &used);
  if (used != v.size()) throw std::invalid_argument("not an integer");
  return x;
}

std::vector<int> ParseIntList(const std::string &v) {
  std::vector<int> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');)
    out.push_back(static_cast<int>(ParseInt(Trim(item))));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::string FormatDouble(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string FormatIntList(const std::vector<int> &v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

struct KeySpec {
  const char *key;
  std::function<void(RunConfig &, const std::string &)> set;
  std::function<std::string(const RunConfig &)> get;
};

#define GVAE_INT(name, field)                                                 \
  KeySpec {                                                                   \
    name,                                                                     \
        [](RunConfig &c, const std::string &v) {                              \
          c.field = static_cast<decltype(c.field)>(ParseInt(v));              \
        },                                                                    \
        [](const RunConfig &c) { return std::to_string(c.field); }            \
  }
#define GVAE_DOUBLE(name, field)                                              \
  KeySpec {                                                                   \
    name, [](RunConfig &c, const std::string &v) { c.field = ParseDouble(v); }, \
        [](const RunConfig &c) { return FormatDouble(c.field); }              \
  }
#define GVAE_SEED(name, field)                                                \
  KeySpec {                                                                   \
    name, [](RunConfig &c, const std::string &v) { c.field = ParseU64(v); },  \
        [](const RunConfig &c) { return std::to_string(c.field); }            \
  }
#define GVAE_STRING(name, field)                                              \
  KeySpec {                                                                   \
    name, [](RunConfig &c, const std::string &v) { c.field = v; },            \
        [](const RunConfig &c) { return c.field; }                            \
  }
#define GVAE_LIST(name, field)                                                \
  KeySpec {                                                                   \
    name,                                                                     \
        [](RunConfig &c, const std::string &v) { c.field = ParseIntList(v); }, \
        [](const RunConfig &c) { return FormatIntList(c.field); }             \
  }

const std::vector<KeySpec> &Specs() {
  static const std::vector<KeySpec> specs = {
      GVAE_INT("stft.n_fft", stft.n_fft),
      GVAE_INT("stft.hop", stft.hop),
      KeySpec{"model.variant",
              [](RunConfig &c, const std::string &v) { c.variant = ParseVariant(v); },
              [](const RunConfig &c) { return std::string(VariantName(c.variant)); }},
      GVAE_INT("model.latent_dim", latent_dim),
      GVAE_LIST("model.hidden", vae_hidden),
      GVAE_DOUBLE("train.lr", train.lr),
      GVAE_INT("train.batch_size", train.batch_size),
      GVAE_INT("train.patience", train.patience),
      GVAE_INT("train.max_epochs", train.max_epochs),
      GVAE_SEED("train.seed", train.seed),
      GVAE_INT("mcem.n_iters", mcem.n_iters),
      GVAE_INT("mcem.samples", mcem.samples),
      GVAE_INT("mcem.burn_in", mcem.burn_in),
      GVAE_DOUBLE("mcem.proposal_std", mcem.proposal_std),
      GVAE_INT("mcem.rank", mcem.rank),
      GVAE_SEED("mcem.seed", mcem.seed),
      GVAE_DOUBLE("mcem.tolerance", mcem.tolerance),
      GVAE_INT("mcem.stall_iters", mcem.stall_iters),
      GVAE_STRING("paths.manifest", paths.manifest),
      GVAE_STRING("paths.corpus", paths.corpus),
      GVAE_STRING("paths.vae", paths.vae),
      GVAE_STRING("paths.classifier", paths.classifier),
      GVAE_STRING("paths.supervised", paths.supervised),
      GVAE_STRING("paths.output", paths.output),
      KeySpec{"classifier.backend",
              [](RunConfig &c, const std::string &v) { c.backend = ParseBackend(v); },
              [](const RunConfig &c) { return std::string(BackendName(c.backend)); }},
      GVAE_LIST("classifier.hidden", classifier_hidden),
      GVAE_LIST("supervised.hidden", supervised_hidden),
      GVAE_DOUBLE("labels.vad_floor_db", vad_floor_db),
      GVAE_INT("run.jobs", jobs),
  };
  return specs;
}

#undef GVAE_INT
#undef GVAE_DOUBLE
#undef GVAE_SEED
#undef GVAE_STRING
#undef GVAE_LIST

const KeySpec *Find(const std::string &key) {
  for (const KeySpec &s : Specs())
    if (key == s.key) return &s;
  return nullptr;
}

// Applies one key, returning an error string instead of throwing.
std::string TrySet(RunConfig &cfg, const std::string &key,
                   const std::string &value) {
  const KeySpec *spec = Find(key);
  if (spec == nullptr) return key + ": unknown key";
  try {
    spec->set(cfg, Trim(value));
  } catch (const Error &e) {
    return key + ": " + e.what();
  } catch (const std::exception &e) {
    return key + ": bad value '" + Trim(value) + "'";
  }
  return "";
}

[[noreturn]] void FailList(const std::string &what,
                           const std::vector<std::string> &problems) {
  std::string msg = what;
  for (std::size_t i = 0; i < problems.size(); ++i)
    msg += (i ? "; " : ": ") + problems[i];
  Fail(ErrorCode::kConfig, msg);
}

}  // namespace

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> keys;
  for (const KeySpec &s : Specs()) keys.push_back(s.key);
  return keys;
}

RunConfig ParseConfig(const std::string &text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    Fail(ErrorCode::kConfig, std::string("config syntax: ") + e.message() +
                                 " at line " + std::to_string(e.line()));
  }
  RunConfig cfg;
  std::vector<std::string> problems;
  for (const auto &[section, body] : tree) {
    if (body.empty()) {
      problems.push_back(section + ": key outside any section");
      continue;
    }
    for (const auto &[name, leaf] : body) {
      const std::string err =
          TrySet(cfg, section + "." + name, leaf.get_value<std::string>());
      if (!err.empty()) problems.push_back(err);
    }
  }
  if (!problems.empty()) FailList("invalid config", problems);
  return cfg;
}

RunConfig LoadConfig(const std::string &path) {
  std::string text;
  try {
    text = ReadText(path);
  } catch (const Error &) {
    Fail(ErrorCode::kConfig, "cannot read config " + path);
  }
  return ParseConfig(text);
}

std::string ResolveConfigPath(const std::string &explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  const char *env = std::getenv("GVAE_CONFIG");
  return env != nullptr ? env : "";
}

void SetConfigValue(RunConfig &cfg, const std::string &key,
                    const std::string &value) {
  const std::string err = TrySet(cfg, key, value);
  if (!err.empty()) Fail(ErrorCode::kConfig, "invalid config: " + err);
}

std::string GetConfigValue(const RunConfig &cfg, const std::string &key) {
  const KeySpec *spec = Find(key);
  if (spec == nullptr) Fail(ErrorCode::kConfig, "invalid config: " + key + ": unknown key");
  return spec->get(cfg);
}

void ValidateConfig(const RunConfig &c) {
  std::vector<std::string> p;
  auto check = [&p](bool ok, const char *key, const char *why) {
    if (!ok) p.push_back(std::string(key) + ": " + why);
  };
  auto positive_list = [](const std::vector<int> &v) {
    if (v.empty()) return false;
    for (int x : v)
      if (x < 1) return false;
    return true;
  };
  check(c.stft.n_fft >= 2 && c.stft.n_fft % 2 == 0, "stft.n_fft", "must be even and >= 2");
  check(c.stft.hop >= 1 && c.stft.hop <= c.stft.n_fft, "stft.hop", "must be in [1, n_fft]");
  check(c.latent_dim >= 1, "model.latent_dim", "must be >= 1");
  check(positive_list(c.vae_hidden), "model.hidden", "sizes must be >= 1");
  check(c.train.lr > 0.0, "train.lr", "must be > 0");
  check(c.train.batch_size >= 1, "train.batch_size", "must be >= 1");
  check(c.train.patience >= 1, "train.patience", "must be >= 1");
  check(c.train.max_epochs >= 1, "train.max_epochs", "must be >= 1");
  check(c.mcem.n_iters >= 1, "mcem.n_iters", "must be >= 1");
  check(c.mcem.samples >= 1, "mcem.samples", "must be >= 1");
  check(c.mcem.burn_in >= 0, "mcem.burn_in", "must be >= 0");
  check(c.mcem.proposal_std > 0.0, "mcem.proposal_std", "must be > 0");
  check(c.mcem.rank >= 1, "mcem.rank", "must be >= 1");
  check(c.mcem.stall_iters >= 1, "mcem.stall_iters", "must be >= 1");
  check(positive_list(c.classifier_hidden), "classifier.hidden", "sizes must be >= 1");
  check(positive_list(c.supervised_hidden), "supervised.hidden", "sizes must be >= 1");
  check(c.vad_floor_db < 0.0, "labels.vad_floor_db", "must be < 0");
  check(c.jobs >= 1, "run.jobs", "must be >= 1");
  if (!p.empty()) FailList("invalid config", p);
}

std::string FormatConfig(const RunConfig &cfg) {
  std::ostringstream out;
  std::string section;
  for (const KeySpec &s : Specs()) {
    const std::string key = s.key;
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << '[' << sec << "]\n";
      section = sec;
    }
    out << key.substr(dot + 1) << " = " << s.get(cfg) << '\n';
  }
  return out.str();
}

std::uint64_t Fnv1a64(const std::string &data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ConfigHash(const RunConfig &cfg) {
  RunConfig c = cfg;
  c.jobs = 1;  // the worker count never changes results
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(Fnv1a64(FormatConfig(c))));
  return buf;
}

}  // namespace gvae
