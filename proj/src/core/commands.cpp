// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>

#include <Eigen/Core>
#include <fftw3.h>

#include "core/classifier.hpp"
#include "core/error.hpp"
#include "core/mcem.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/supervised.hpp"
#include "core/textio.hpp"
#include "core/vae.hpp"
#include "core/wav.hpp"

namespace fs = std::filesystem;

namespace gvae {
namespace {

constexpr double kTrainPowerFloor = 1e-10;

void Log(std::ostream *log, const std::string &line) {
  if (log != nullptr) *log << line << '\n' << std::flush;
}

void RequirePath(const std::string &value, const char *key) {
  if (value.empty())
    Fail(ErrorCode::kConfig, std::string("invalid config: ") + key +
                                 ": required by this command");
}

void EnsureParent(const std::string &path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::string ModelRowName(VaeVariant v) {
  switch (v) {
    case VaeVariant::kM1: return "M1";
    case VaeVariant::kM2Vad: return "M2+VAD";
    case VaeVariant::kM2Ibm: return "M2+IBM";
  }
  return "?";
}

std::function<void(const EpochRecord &)> EpochLogger(std::ostream *log,
                                                     const std::string &what) {
  if (log == nullptr) return {};
  return [log, what](const EpochRecord &r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s epoch %d train=%.6g valid=%.6g",
                  what.c_str(), r.epoch, r.train_loss, r.valid_loss);
    Log(log, buf);
  };
}

void WriteHistory(const std::string &path, const TrainHistory &h) {
  std::ostringstream out;
  out << "epoch\ttrain_loss\tvalid_loss\n";
  for (const EpochRecord &r : h.epochs) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d\t%.17g\t%.17g\n", r.epoch, r.train_loss,
                  r.valid_loss);
    out << buf;
  }
  out << "# best_epoch=" << h.best_epoch << " stop=" << h.stop_reason
      << (h.diverged ? " diverged" : "") << '\n';
  WriteText(path, out.str());
}

std::pair<std::vector<const CorpusEntry *>, std::vector<const CorpusEntry *>>
TrainValid(const CorpusIndex &index) {
  auto train = index.Select(Split::kTrain);
  auto valid = index.Select(Split::kValid);
  if (train.empty()) Fail(ErrorCode::kInvalidArgument, "corpus has no train split");
  if (valid.empty()) Fail(ErrorCode::kInvalidArgument, "corpus has no valid split");
  return {train, valid};
}

void CheckStft(const RunConfig &cfg, const Spectrogram &s) {
  if (s.n_fft != cfg.stft.n_fft) Fail(ErrorCode::kInternal, "stft mismatch");
}

// Clean power and ground-truth labels, frames in columns.
FrameSet LoadFrames(const CorpusIndex &index,
                    const std::vector<const CorpusEntry *> &entries,
                    const RunConfig &cfg) {
  const int bins = cfg.bins();
  const int c = LabelDim(cfg.variant, bins);
  std::vector<Eigen::MatrixXd> power(entries.size()), labels(entries.size());
  ParallelFor(entries.size(), cfg.jobs, [&](std::size_t i) {
    const Utterance u = LoadUtterance(index, *entries[i]);
    const Spectrogram s = Stft(u.clean, cfg.stft);
    CheckStft(cfg, s);
    power[i] = Power(s).data.transpose().cwiseMax(kTrainPowerFloor);
    if (cfg.variant == VaeVariant::kM2Vad) labels[i] = u.vad.values.transpose();
    if (cfg.variant == VaeVariant::kM2Ibm) labels[i] = u.ibm.values.transpose();
    if (c > 0 && labels[i].cols() != power[i].cols())
      Fail(ErrorCode::kFormat, entries[i]->id + ": label/frame count mismatch");
  });
  Eigen::Index total = 0;
  for (const auto &p : power) total += p.cols();
  FrameSet set;
  set.power.resize(bins, total);
  set.labels.resize(c, total);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Eigen::Index n = power[i].cols();
    set.power.middleCols(at, n) = power[i];
    if (c > 0) set.labels.middleCols(at, n) = labels[i];
    power[i].resize(0, 0);
    labels[i].resize(0, 0);
    at += n;
  }
  return set;
}

LabeledSet LoadLabeled(const CorpusIndex &index,
                       const std::vector<const CorpusEntry *> &entries,
                       LabelKind kind, const RunConfig &cfg) {
  LabeledSet set;
  set.mixtures.resize(entries.size());
  set.labels.resize(entries.size());
  ParallelFor(entries.size(), cfg.jobs, [&](std::size_t i) {
    const Utterance u = LoadUtterance(index, *entries[i]);
    set.mixtures[i] = Power(Stft(u.mixture, cfg.stft));
    set.labels[i] = kind == LabelKind::kVad ? u.vad : u.ibm;
  });
  return set;
}

MaskTrainingSet LoadMaskSet(const CorpusIndex &index,
                            const std::vector<const CorpusEntry *> &entries,
                            const RunConfig &cfg) {
  MaskTrainingSet set;
  set.mixtures.resize(entries.size());
  set.clean_magnitudes.resize(entries.size());
  ParallelFor(entries.size(), cfg.jobs, [&](std::size_t i) {
    const Utterance u = LoadUtterance(index, *entries[i]);
    set.mixtures[i] = Stft(u.mixture, cfg.stft);
    set.clean_magnitudes[i] = Magnitude(Stft(u.clean, cfg.stft));
  });
  return set;
}

LabelKind KindFor(VaeVariant v) {
  return v == VaeVariant::kM2Vad ? LabelKind::kVad : LabelKind::kIbm;
}

// A loaded system ready to process mixtures.
class Enhancer {
 public:
  static std::shared_ptr<const Enhancer> Create(const RunConfig &cfg,
                                                const SystemSpec &spec) {
    auto e = std::make_shared<Enhancer>();
    e->cfg_ = cfg;
    e->kind_ = spec.kind;
    if (spec.kind == "mixture") {
      e->model_name_ = "Mixture";
      e->classifier_name_ = "--";
    } else if (spec.kind == "supervised") {
      RequirePath(spec.checkpoint, "paths.supervised");
      e->mask_ = MaskNet::FromCheckpoint(Checkpoint::Load(spec.checkpoint));
      if (e->mask_->bins() != cfg.bins())
        Fail(ErrorCode::kConfig, "supervised checkpoint bins do not match stft.n_fft");
      e->model_name_ = "Supervised";
      e->classifier_name_ = "--";
    } else if (spec.kind == "vae") {
      RequirePath(spec.checkpoint, "paths.vae");
      e->vae_ = VaeModel::FromCheckpoint(Checkpoint::Load(spec.checkpoint));
      if (e->vae_->bins() != cfg.bins())
        Fail(ErrorCode::kConfig, "vae checkpoint bins do not match stft.n_fft");
      const VaeVariant v = e->vae_->variant();
      e->model_name_ = ModelRowName(v);
      e->backend_ = IsGuided(v) ? spec.backend : ClassifierBackend::kNone;
      e->classifier_name_ =
          e->backend_ == ClassifierBackend::kNone ? "--" : BackendName(e->backend_);
      if (IsGuided(v)) e->CheckBackend(spec);
      ValidateMcemConfig(cfg.mcem);
    } else {
      Fail(ErrorCode::kInvalidArgument, "unknown system kind: " + spec.kind);
    }
    return e;
  }

  const std::string &model_name() const { return model_name_; }
  const std::string &classifier_name() const { return classifier_name_; }
  bool needs_truth() const { return backend_ == ClassifierBackend::kOracle; }

  SystemOutput Run(const Waveform &mixture, const Utterance *truth,
                   const std::string &id,
                   std::vector<McemTraceRow> *trace) const {
    if (kind_ == "mixture") return SystemOutput{mixture, std::nullopt};
    const Spectrogram x = Stft(mixture, cfg_.stft);
    if (kind_ == "supervised")
      return SystemOutput{Istft(EnhanceSupervised(*mask_, x)), std::nullopt};

    std::optional<LabelSeq> labels;
    if (IsGuided(vae_->variant())) labels = Labels(x, truth);
    McemConfig mc = cfg_.mcem;
    mc.seed = UtteranceSeed(cfg_.mcem.seed, id);
    const Spectrogram s =
        EnhanceMcem(x, *vae_, labels ? &*labels : nullptr, mc, trace);
    return SystemOutput{Istft(s), labels};
  }

 private:
  void CheckBackend(const SystemSpec &spec) {
    const LabelKind need = KindFor(vae_->variant());
    switch (backend_) {
      case ClassifierBackend::kNone:
        Fail(ErrorCode::kConfig,
             std::string("invalid config: classifier.backend: variant ") +
                 VariantName(vae_->variant()) + " needs a classifier backend");
      case ClassifierBackend::kDnnVad:
      case ClassifierBackend::kDnnIbm: {
        const LabelKind kind = backend_ == ClassifierBackend::kDnnVad
                                   ? LabelKind::kVad
                                   : LabelKind::kIbm;
        if (kind != need)
          Fail(ErrorCode::kConfig, std::string("invalid config: classifier.backend: ") +
                                       BackendName(backend_) + " does not fit " +
                                       VariantName(vae_->variant()));
        RequirePath(spec.classifier_checkpoint, "paths.classifier");
        clf_ = ClassifierModel::FromCheckpoint(Checkpoint::Load(spec.classifier_checkpoint));
        if (clf_->kind() != kind)
          Fail(ErrorCode::kConfig, "classifier checkpoint has the wrong label kind");
        if (clf_->bins() != cfg_.bins())
          Fail(ErrorCode::kConfig, "classifier checkpoint bins do not match stft.n_fft");
        break;
      }
      case ClassifierBackend::kSppIbm:
        if (need != LabelKind::kIbm)
          Fail(ErrorCode::kConfig,
               "invalid config: classifier.backend: spp-ibm yields IBM labels only");
        break;
      case ClassifierBackend::kOracle:
        break;
    }
  }

  LabelSeq Labels(const Spectrogram &x, const Utterance *truth) const {
    switch (backend_) {
      case ClassifierBackend::kDnnVad:
      case ClassifierBackend::kDnnIbm:
        return Classify(*clf_, Power(x)).labels;
      case ClassifierBackend::kSppIbm:
        return SppIbm(Power(x)).labels;
      case ClassifierBackend::kOracle:
        if (truth == nullptr)
          Fail(ErrorCode::kConfig,
               "oracle labels need a corpus utterance (clean and noise)");
        return KindFor(vae_->variant()) == LabelKind::kVad ? truth->vad : truth->ibm;
      case ClassifierBackend::kNone:
        break;
    }
    Fail(ErrorCode::kInternal, "no classifier backend");
  }

  RunConfig cfg_;
  std::string kind_;
  std::string model_name_, classifier_name_;
  ClassifierBackend backend_ = ClassifierBackend::kNone;
  std::optional<VaeModel> vae_;
  std::optional<ClassifierModel> clf_;
  std::optional<MaskNet> mask_;
};

std::string TraceTsv(const std::vector<McemTraceRow> &trace) {
  std::ostringstream out;
  out << "iter\tQ\tacceptance\n";
  for (const McemTraceRow &r : trace) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d\t%.17g\t%.17g\n", r.iter, r.q, r.acceptance);
    out << buf;
  }
  return out.str();
}

SystemSpec ConfiguredVae(const RunConfig &cfg) {
  SystemSpec s;
  s.kind = "vae";
  s.checkpoint = cfg.paths.vae;
  s.backend = cfg.backend;
  s.classifier_checkpoint = cfg.paths.classifier;
  return s;
}

}  // namespace

const char *LibraryVersion() { return "0.1.0"; }

std::string StampText(const std::string &command, const RunConfig &cfg) {
  std::ostringstream out;
  out << "# gvae reproducibility stamp\n"
      << "# command=" << command << '\n'
      << "# version=" << LibraryVersion() << '\n'
      << "# config_hash=" << ConfigHash(cfg) << '\n'
      << "# train_seed=" << cfg.train.seed << '\n'
      << "# mcem_seed=" << cfg.mcem.seed << '\n'
      << "# eigen=" << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
      << EIGEN_MINOR_VERSION << '\n'
      << "# fftw=" << fftw_version << '\n'
#if defined(__VERSION__)
      << "# compiler=" << __VERSION__ << '\n'
#endif
      << FormatConfig(cfg);
  return out.str();
}

void WriteStamp(const std::string &artifact, const std::string &command,
                const RunConfig &cfg) {
  EnsureParent(artifact);
  WriteText(artifact + ".stamp", StampText(command, cfg));
}

std::uint64_t UtteranceSeed(std::uint64_t base, const std::string &id) {
  return DeriveSeed(base, Fnv1a64(id));
}

DatasetManifest GenSources(const RunConfig &cfg, SourceOptions options,
                           const std::string &out_dir) {
  ValidateConfig(cfg);
  options.jobs = cfg.jobs;
  DatasetManifest m = GenerateSources(out_dir, options);
  WriteStamp((fs::path(out_dir) / "sources").string(), "gen-sources", cfg);
  return m;
}

CorpusIndex SynthData(const RunConfig &cfg) {
  ValidateConfig(cfg);
  RequirePath(cfg.paths.manifest, "paths.manifest");
  RequirePath(cfg.paths.corpus, "paths.corpus");
  SynthesisOptions o;
  o.stft = cfg.stft;
  o.vad_floor_db = cfg.vad_floor_db;
  o.jobs = cfg.jobs;
  CorpusIndex index = SynthesizeDataset(ReadManifest(cfg.paths.manifest),
                                        cfg.paths.corpus, o);
  WriteStamp((fs::path(cfg.paths.corpus) / "corpus").string(), "synth-data", cfg);
  return index;
}

void BuildVae(const RunConfig &cfg) {
  ValidateConfig(cfg);
  RequirePath(cfg.paths.vae, "paths.vae");
  VaeArchitecture arch{cfg.variant, cfg.bins(), cfg.latent_dim, cfg.vae_hidden};
  const VaeModel model = VaeModel::Build(arch, cfg.train.seed);
  EnsureParent(cfg.paths.vae);
  model.ToCheckpoint().Save(cfg.paths.vae);
  WriteStamp(cfg.paths.vae, "build-vae", cfg);
}

TrainHistory TrainVaeCommand(const RunConfig &cfg, std::ostream *log) {
  ValidateConfig(cfg);
  RequirePath(cfg.paths.corpus, "paths.corpus");
  RequirePath(cfg.paths.vae, "paths.vae");
  const CorpusIndex index = ReadCorpusIndex(cfg.paths.corpus);
  const auto [train_e, valid_e] = TrainValid(index);
  const FrameSet train = LoadFrames(index, train_e, cfg);
  const FrameSet valid = LoadFrames(index, valid_e, cfg);
  Log(log, "train-vae: " + std::to_string(train.size()) + " train frames, " +
               std::to_string(valid.size()) + " valid frames");

  VaeArchitecture arch{cfg.variant, cfg.bins(), cfg.latent_dim, cfg.vae_hidden};
  VaeModel model = VaeModel::Build(arch, cfg.train.seed);
  const TrainHistory h =
      TrainVae(model, train, valid, cfg.train, EpochLogger(log, VariantName(cfg.variant)));
  Checkpoint ck = model.ToCheckpoint();
  ck.header["config_hash"] = ConfigHash(cfg);
  ck.header["best_epoch"] = std::to_string(h.best_epoch);
  EnsureParent(cfg.paths.vae);
  ck.Save(cfg.paths.vae);
  WriteHistory(cfg.paths.vae + ".history.tsv", h);
  WriteStamp(cfg.paths.vae, "train-vae", cfg);
  return h;
}

TrainHistory TrainClassifierCommand(const RunConfig &cfg, LabelKind kind,
                                    std::ostream *log) {
  ValidateConfig(cfg);
  RequirePath(cfg.paths.corpus, "paths.corpus");
  RequirePath(cfg.paths.classifier, "paths.classifier");
  const CorpusIndex index = ReadCorpusIndex(cfg.paths.corpus);
  const auto [train_e, valid_e] = TrainValid(index);
  const LabeledSet train = LoadLabeled(index, train_e, kind, cfg);
  const LabeledSet valid = LoadLabeled(index, valid_e, kind, cfg);
  TrainHistory h;
  const ClassifierModel model =
      TrainClassifier(kind, train, valid, cfg.train, &h,
                      EpochLogger(log, std::string("classifier-") + LabelKindName(kind)),
                      cfg.classifier_hidden);
  Checkpoint ck = model.ToCheckpoint();
  ck.header["config_hash"] = ConfigHash(cfg);
  ck.header["best_epoch"] = std::to_string(h.best_epoch);
  EnsureParent(cfg.paths.classifier);
  ck.Save(cfg.paths.classifier);
  WriteHistory(cfg.paths.classifier + ".history.tsv", h);
  WriteStamp(cfg.paths.classifier, "train-classifier", cfg);
  return h;
}

TrainHistory TrainSupervisedCommand(const RunConfig &cfg, std::ostream *log) {
  ValidateConfig(cfg);
  RequirePath(cfg.paths.corpus, "paths.corpus");
  RequirePath(cfg.paths.supervised, "paths.supervised");
  const CorpusIndex index = ReadCorpusIndex(cfg.paths.corpus);
  const auto [train_e, valid_e] = TrainValid(index);
  const MaskTrainingSet train = LoadMaskSet(index, train_e, cfg);
  const MaskTrainingSet valid = LoadMaskSet(index, valid_e, cfg);
  TrainHistory h;
  const MaskNet model = TrainMaskNet(train, valid, cfg.train, &h,
                                     EpochLogger(log, "supervised"),
                                     cfg.supervised_hidden);
  Checkpoint ck = model.ToCheckpoint();
  ck.header["config_hash"] = ConfigHash(cfg);
  ck.header["best_epoch"] = std::to_string(h.best_epoch);
  EnsureParent(cfg.paths.supervised);
  ck.Save(cfg.paths.supervised);
  WriteHistory(cfg.paths.supervised + ".history.tsv", h);
  WriteStamp(cfg.paths.supervised, "train-supervised", cfg);
  return h;
}

void EnhanceCommand(const RunConfig &cfg, const EnhanceRequest &req,
                    std::ostream *log) {
  ValidateConfig(cfg);
  const auto enhancer = Enhancer::Create(cfg, ConfiguredVae(cfg));

  if (!req.input_wav.empty()) {
    if (req.output_wav.empty())
      Fail(ErrorCode::kInvalidArgument, "enhance: output path required");
    const Waveform x = ReadWav(req.input_wav);
    std::vector<McemTraceRow> trace;
    const std::string id = fs::path(req.input_wav).stem().string();
    const SystemOutput out = enhancer->Run(x, nullptr, id, &trace);
    EnsureParent(req.output_wav);
    WriteWav(req.output_wav, out.estimate);
    if (!req.trace_path.empty()) {
      EnsureParent(req.trace_path);
      WriteText(req.trace_path, TraceTsv(trace));
    }
    WriteStamp(req.output_wav, "enhance", cfg);
    Log(log, "enhance: wrote " + req.output_wav);
    return;
  }

  RequirePath(cfg.paths.corpus, "paths.corpus");
  RequirePath(cfg.paths.output, "paths.output");
  const CorpusIndex index = ReadCorpusIndex(cfg.paths.corpus);
  const auto entries = index.Select(req.split);
  const fs::path out_dir(cfg.paths.output);
  fs::create_directories(out_dir / "enhanced");
  fs::create_directories(out_dir / "traces");
  ParallelFor(entries.size(), cfg.jobs, [&](std::size_t i) {
    const Utterance u = LoadUtterance(index, *entries[i]);
    std::vector<McemTraceRow> trace;
    const SystemOutput out = enhancer->Run(u.mixture, &u, entries[i]->id, &trace);
    WriteWav((out_dir / "enhanced" / (entries[i]->id + ".wav")).string(), out.estimate);
    if (!trace.empty())
      WriteText((out_dir / "traces" / (entries[i]->id + ".tsv")).string(),
                TraceTsv(trace));
  });
  WriteStamp((out_dir / "enhance").string(), "enhance", cfg);
  Log(log, "enhance: " + std::to_string(entries.size()) + " utterances -> " +
               (out_dir / "enhanced").string());
}

SystemSpec ParseSystemSpec(const std::string &text) {
  SystemSpec s;
  const auto eq = text.find('=');
  s.kind = text.substr(0, eq);
  std::vector<std::string> parts;
  if (eq != std::string::npos) {
    std::stringstream ss(text.substr(eq + 1));
    for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
  }
  if (s.kind == "mixture") {
    if (!parts.empty()) Fail(ErrorCode::kInvalidArgument, "mixture takes no arguments");
  } else if (s.kind == "supervised") {
    if (parts.size() != 1) Fail(ErrorCode::kInvalidArgument, "usage: supervised=CKPT");
    s.checkpoint = parts[0];
  } else if (s.kind == "vae") {
    if (parts.empty() || parts.size() > 3)
      Fail(ErrorCode::kInvalidArgument, "usage: vae=CKPT[,BACKEND[,CLASSIFIER_CKPT]]");
    s.checkpoint = parts[0];
    if (parts.size() > 1) s.backend = ParseBackend(parts[1]);
    if (parts.size() > 2) s.classifier_checkpoint = parts[2];
  } else {
    Fail(ErrorCode::kInvalidArgument, "unknown system: " + text);
  }
  return s;
}

std::vector<SystemSpec> DefaultSystems(const RunConfig &cfg) {
  std::vector<SystemSpec> out{SystemSpec{"mixture", "", ClassifierBackend::kNone, ""}};
  if (!cfg.paths.supervised.empty())
    out.push_back(SystemSpec{"supervised", cfg.paths.supervised,
                             ClassifierBackend::kNone, ""});
  if (!cfg.paths.vae.empty()) out.push_back(ConfiguredVae(cfg));
  return out;
}

EvalReport EvaluateCommand(const RunConfig &cfg,
                           const std::vector<SystemSpec> &systems, Split split,
                           std::ostream *log) {
  ValidateConfig(cfg);
  RequirePath(cfg.paths.corpus, "paths.corpus");
  const CorpusIndex index = ReadCorpusIndex(cfg.paths.corpus);
  const auto entries = index.Select(split);
  if (entries.empty())
    Fail(ErrorCode::kInvalidArgument,
         std::string("corpus has no ") + SplitName(split) + " split");

  std::vector<EvalSystem> eval;
  for (const SystemSpec &spec : systems) {
    auto e = Enhancer::Create(cfg, spec);
    EvalSystem s;
    s.model = e->model_name();
    s.classifier = e->classifier_name();
    s.run = [e](const Utterance &u) {
      return e->Run(u.mixture, &u, u.id, nullptr);
    };
    eval.push_back(std::move(s));
  }
  EvalReport report = RunEvaluation(index, entries, eval, cfg.jobs);
  report.metadata["split"] = SplitName(split);
  report.metadata["config_hash"] = ConfigHash(cfg);
  report.metadata["train_seed"] = std::to_string(cfg.train.seed);
  report.metadata["mcem_seed"] = std::to_string(cfg.mcem.seed);

  if (!cfg.paths.output.empty()) {
    const fs::path out(cfg.paths.output);
    fs::create_directories(out);
    WriteText((out / "report.tsv").string(), report.ToTsv());
    WriteText((out / "report.txt").string(), report.ToText());
    std::ostringstream scores;
    scores << "model\tclassifier\tid\tsnr_db\tsi_sdr\n";
    for (const EvalRow &r : report.rows)
      for (const UtteranceScore &s : r.scores) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%g\t%.17g", s.snr_db, s.si_sdr);
        scores << r.model << '\t' << r.classifier << '\t' << s.id << '\t' << buf << '\n';
      }
    WriteText((out / "scores.tsv").string(), scores.str());
    WriteStamp((out / "report").string(), "evaluate", cfg);
  }
  Log(log, report.ToText());
  return report;
}

std::string InspectCheckpoint(const std::string &path) {
  return DescribeCheckpoint(Checkpoint::Load(path));
}

std::string DescribeCheckpoint(const Checkpoint &ck) {
  std::ostringstream out;
  out << "params=" << ck.ParameterCount() << '\n';
  for (const auto &[k, v] : ck.header) out << k << '=' << v << '\n';
  for (const auto &[name, net] : ck.nets()) {
    out << "net." << name << '=';
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
      const DenseLayer &l = net.layers()[i];
      if (i == 0) out << l.weight.cols();
      out << "->" << l.weight.rows() << ':' << ActivationName(l.activation);
    }
    out << '\n';
  }
  for (const auto &[name, a] : ck.arrays())
    out << "array." << name << '=' << a.rows() << 'x' << a.cols() << '\n';
  return out.str();
}

}  // namespace gvae
