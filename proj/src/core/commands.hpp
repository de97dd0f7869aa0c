// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Command layer: each command reads what it needs from a RunConfig, writes
// its artifacts and a reproducibility stamp next to them.

#ifndef GVAE_CORE_COMMANDS_HPP_
#define GVAE_CORE_COMMANDS_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/config.hpp"
#include "core/corpus.hpp"
#include "core/metrics.hpp"
#include "core/synth.hpp"

namespace gvae {

const char *LibraryVersion();

/// Stamp text: '#'-commented provenance lines followed by the full config,
/// so a stamp can be fed back as a config file.
std::string StampText(const std::string &command, const RunConfig &cfg);
void WriteStamp(const std::string &artifact, const std::string &command,
                const RunConfig &cfg);

/// Per-utterance MCEM seed; depends on the utterance id only, never on
/// scheduling.
std::uint64_t UtteranceSeed(std::uint64_t base, const std::string &id);

DatasetManifest GenSources(const RunConfig &cfg, SourceOptions options,
                           const std::string &out_dir);

CorpusIndex SynthData(const RunConfig &cfg);

/// Writes an untrained checkpoint for cfg.variant to cfg.paths.vae.
void BuildVae(const RunConfig &cfg);

TrainHistory TrainVaeCommand(const RunConfig &cfg, std::ostream *log);
TrainHistory TrainClassifierCommand(const RunConfig &cfg, LabelKind kind,
                                    std::ostream *log);
TrainHistory TrainSupervisedCommand(const RunConfig &cfg, std::ostream *log);

struct EnhanceRequest {
  // Single-file mode when non-empty; otherwise every utterance of `split`
  // in cfg.paths.corpus is enhanced into cfg.paths.output.
  std::string input_wav;
  std::string output_wav;
  std::string trace_path;  // optional, single-file mode
  Split split = Split::kTest;
};

void EnhanceCommand(const RunConfig &cfg, const EnhanceRequest &req,
                    std::ostream *log);

/// One evaluated system. kind is "mixture", "supervised" or "vae".
struct SystemSpec {
  std::string kind;
  std::string checkpoint;
  ClassifierBackend backend = ClassifierBackend::kNone;
  std::string classifier_checkpoint;
};

/// "mixture" | "supervised=CKPT" | "vae=CKPT[,BACKEND[,CLASSIFIER_CKPT]]"
SystemSpec ParseSystemSpec(const std::string &text);

/// Default systems from the config: mixture, then supervised and VAE rows
/// when their checkpoints are configured.
std::vector<SystemSpec> DefaultSystems(const RunConfig &cfg);

EvalReport EvaluateCommand(const RunConfig &cfg,
                           const std::vector<SystemSpec> &systems,
                           Split split, std::ostream *log);

/// Parameter count and header of a checkpoint, one "key=value" per line,
/// starting with "params=N".
std::string DescribeCheckpoint(const Checkpoint &ck);
std::string InspectCheckpoint(const std::string &path);

}  // namespace gvae

#endif  // GVAE_CORE_COMMANDS_HPP_
