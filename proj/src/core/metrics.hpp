// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_METRICS_HPP_
#define GVAE_CORE_METRICS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/corpus.hpp"
#include "core/labels.hpp"
#include "core/signal.hpp"

namespace gvae {

inline constexpr double kSiSdrReportCap = 300.0;

/// Scale-invariant SDR in dB. Returns +infinity when the estimate is an
/// exact multiple of the reference.
double SiSdr(std::span<const double> estimate, std::span<const double> reference);
inline double SiSdr(const Waveform &estimate, const Waveform &reference) {
  return SiSdr(estimate.samples, reference.samples);
}

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  ConfusionCounts &operator+=(const ConfusionCounts &o);
};

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// IBM labels are flattened over all bins.
ConfusionCounts Confusion(const LabelSeq &pred, const LabelSeq &truth);
F1Score F1FromCounts(const ConfusionCounts &c);
F1Score F1(const LabelSeq &pred, const LabelSeq &truth);

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t count = 0;
};

/// mean +- 1.96 * sample sd / sqrt(n); needs at least two values.
MeanCi ConfidenceInterval(std::span<const double> values);

/// What one system produced for one utterance.
struct SystemOutput {
  Waveform estimate;
  std::optional<LabelSeq> predicted;  // classifier labels, for F1
};

struct EvalSystem {
  std::string model;       // row name, e.g. "M2+IBM"
  std::string classifier;  // e.g. "dnn", "oracle", "--"
  std::function<SystemOutput(const Utterance &)> run;
};

struct UtteranceScore {
  std::string id;
  double snr_db = 0.0;
  double si_sdr = 0.0;
};

struct EvalRow {
  std::string model;
  std::string classifier;
  std::optional<F1Score> f1;
  MeanCi overall;
  std::map<double, MeanCi> by_snr;
  std::vector<UtteranceScore> scores;
};

struct EvalReport {
  std::vector<double> snr_buckets;
  std::vector<EvalRow> rows;
  std::map<std::string, std::string> metadata;

  /// Tab-separated: model, classifier, F1, SI-SDR, SI-SDR@<snr>...; every
  /// SI-SDR cell is "mean±half_width".
  std::string ToTsv() const;
  std::string ToText() const;
};

/// The mixture-as-estimate system.
EvalSystem MixturePassthrough();

/// Runs every system on every utterance (utterance-level parallelism) and
/// aggregates per input-SNR bucket. Buckets are the synthesis target SNRs.
EvalReport RunEvaluation(const CorpusIndex &index,
                         const std::vector<const CorpusEntry *> &entries,
                         const std::vector<EvalSystem> &systems, int jobs = 1);

std::string FormatMeanCi(const MeanCi &m);

}  // namespace gvae

#endif  // GVAE_CORE_METRICS_HPP_
