// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace gvae {

double SiSdr(std::span<const double> estimate,
             std::span<const double> reference) {
  if (estimate.size() != reference.size())
    Fail(ErrorCode::kInvalidArgument, "si-sdr: length mismatch");
  double dot = 0.0, ref_energy = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    dot += estimate[i] * reference[i];
    ref_energy += reference[i] * reference[i];
  }
  if (ref_energy == 0.0) Fail(ErrorCode::kInvalidArgument, "si-sdr: zero reference");
  const double alpha = dot / ref_energy;
  if (alpha == 0.0) Fail(ErrorCode::kInvalidArgument, "orthogonal estimate");
  double target = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double t = alpha * reference[i];
    const double e = estimate[i] - t;
    target += t * t;
    residual += e * e;
  }
  if (residual == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(target / residual);
}

ConfusionCounts &ConfusionCounts::operator+=(const ConfusionCounts &o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

ConfusionCounts Confusion(const LabelSeq &pred, const LabelSeq &truth) {
  if (pred.kind != truth.kind || pred.frames() != truth.frames() ||
      pred.dim() != truth.dim())
    Fail(ErrorCode::kInvalidArgument, "f1: label shape or kind mismatch");
  ConfusionCounts c;
  for (Eigen::Index j = 0; j < pred.values.cols(); ++j) {
    for (Eigen::Index i = 0; i < pred.values.rows(); ++i) {
      const bool p = pred.values(i, j) > 0.5;
      const bool t = truth.values(i, j) > 0.5;
      if (p && t) ++c.tp;
      else if (p) ++c.fp;
      else if (t) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

F1Score F1FromCounts(const ConfusionCounts &c) {
  F1Score s;
  const double tp = static_cast<double>(c.tp);
  if (c.tp + c.fp == 0 && c.tp + c.fn == 0) {
    // Both prediction and truth are all-negative: perfect agreement.
    s.f1 = 1.0;
    return s;
  }
  if (c.tp + c.fp > 0) s.precision = tp / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) s.recall = tp / static_cast<double>(c.tp + c.fn);
  if (s.precision + s.recall > 0.0)
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

F1Score F1(const LabelSeq &pred, const LabelSeq &truth) {
  return F1FromCounts(Confusion(pred, truth));
}

MeanCi ConfidenceInterval(std::span<const double> values) {
  if (values.size() < 2)
    Fail(ErrorCode::kInvalidArgument, "confidence interval needs >= 2 values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return MeanCi{mean, 1.96 * sd / std::sqrt(n), values.size()};
}

std::string FormatMeanCi(const MeanCi &m) {
  char buf[64];
  // Means that round to zero print as 0.0, never -0.0.
  double mean = std::round(m.mean * 10.0) / 10.0;
  if (mean == 0.0) mean = 0.0;
  if (m.count < 2)
    std::snprintf(buf, sizeof buf, "%.1f±nan", mean);
  else
    std::snprintf(buf, sizeof buf, "%.1f±%.1f", mean, m.half_width);
  return buf;
}

namespace {

MeanCi Summarize(const std::vector<double> &v) {
  if (v.size() >= 2) return ConfidenceInterval(v);
  MeanCi m;
  m.count = v.size();
  if (!v.empty()) m.mean = v[0];
  return m;
}

std::string BucketName(double snr) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "SI-SDR@%g", snr);
  return buf;
}

std::string F1Cell(const EvalRow &r) {
  if (!r.f1) return "--";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", r.f1->f1);
  return buf;
}

}  // namespace

EvalSystem MixturePassthrough() {
  EvalSystem s;
  s.model = "Mixture";
  s.classifier = "--";
  s.run = [](const Utterance &u) { return SystemOutput{u.mixture, std::nullopt}; };
  return s;
}

EvalReport RunEvaluation(const CorpusIndex &index,
                         const std::vector<const CorpusEntry *> &entries,
                         const std::vector<EvalSystem> &systems, int jobs) {
  const std::size_t n_utt = entries.size();
  const std::size_t n_sys = systems.size();
  std::vector<double> sdr(n_utt * n_sys, 0.0);
  std::vector<std::optional<ConfusionCounts>> counts(n_utt * n_sys);

  ParallelFor(n_utt, jobs, [&](std::size_t u) {
    const Utterance utt = LoadUtterance(index, *entries[u]);
    for (std::size_t s = 0; s < n_sys; ++s) {
      SystemOutput out = systems[s].run(utt);
      if (out.estimate.samples.size() != utt.clean.samples.size())
        Fail(ErrorCode::kInternal, "system output has wrong length");
      sdr[u * n_sys + s] =
          std::min(SiSdr(out.estimate, utt.clean), kSiSdrReportCap);
      if (out.predicted) {
        const LabelSeq &truth =
            out.predicted->kind == LabelKind::kVad ? utt.vad : utt.ibm;
        counts[u * n_sys + s] = Confusion(*out.predicted, truth);
      }
    }
  });

  EvalReport report;
  std::set<double> buckets;
  for (const CorpusEntry *e : entries) buckets.insert(e->snr_db);
  report.snr_buckets.assign(buckets.begin(), buckets.end());
  for (std::size_t s = 0; s < n_sys; ++s) {
    EvalRow row;
    row.model = systems[s].model;
    row.classifier = systems[s].classifier;
    std::vector<double> all;
    std::map<double, std::vector<double>> per;
    std::optional<ConfusionCounts> total;
    for (std::size_t u = 0; u < n_utt; ++u) {
      const double v = sdr[u * n_sys + s];
      all.push_back(v);
      per[entries[u]->snr_db].push_back(v);
      row.scores.push_back({entries[u]->id, entries[u]->snr_db, v});
      if (counts[u * n_sys + s]) {
        if (!total) total = ConfusionCounts{};
        *total += *counts[u * n_sys + s];
      }
    }
    row.overall = Summarize(all);
    for (const auto &[snr, values] : per) row.by_snr[snr] = Summarize(values);
    if (total) row.f1 = F1FromCounts(*total);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string EvalReport::ToTsv() const {
  std::ostringstream out;
  out << "model\tclassifier\tF1\tSI-SDR";
  for (double b : snr_buckets) out << '\t' << BucketName(b);
  out << '\n';
  for (const EvalRow &r : rows) {
    out << r.model << '\t' << r.classifier << '\t' << F1Cell(r) << '\t'
        << FormatMeanCi(r.overall);
    for (double b : snr_buckets) {
      auto it = r.by_snr.find(b);
      out << '\t' << (it == r.by_snr.end() ? "--" : FormatMeanCi(it->second));
    }
    out << '\n';
  }
  return out.str();
}

std::string EvalReport::ToText() const {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"Model", "Classifier", "F1", "SI-SDR"};
  for (double b : snr_buckets) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+g dB", b);
    header.push_back(buf);
  }
  cells.push_back(header);
  for (const EvalRow &r : rows) {
    std::vector<std::string> line{r.model, r.classifier, F1Cell(r),
                                  FormatMeanCi(r.overall)};
    for (double b : snr_buckets) {
      auto it = r.by_snr.find(b);
      line.push_back(it == r.by_snr.end() ? "--" : FormatMeanCi(it->second));
    }
    cells.push_back(line);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto &line : cells)
    for (std::size_t i = 0; i < line.size(); ++i)
      width[i] = std::max(width[i], line[i].size());
  std::ostringstream out;
  for (std::size_t li = 0; li < cells.size(); ++li) {
    for (std::size_t i = 0; i < cells[li].size(); ++i) {
      out << cells[li][i];
      if (i + 1 < cells[li].size())
        out << std::string(width[i] - cells[li][i].size() + 2, ' ');
    }
    out << '\n';
    if (li == 0) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w + 2;
      out << std::string(total - 2, '-') << '\n';
    }
  }
  return out.str();
}

}  // namespace gvae
