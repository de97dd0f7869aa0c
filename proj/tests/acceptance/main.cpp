// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is zero
// only when every selected criterion passes.

#include <chrono>
#include <cstdio>
#include <exception>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "acceptance.hpp"
#include "core/error.hpp"

using namespace gvae::acceptance;

namespace {

struct Criterion {
  int id;
  const char *name;
  Outcome (*run)(const Options &);
};

const Criterion kCriteria[] = {
    {1, "parameter counts", ParameterCounts},
    {2, "stft/istft round trip", StftRoundTrip},
    {3, "gradient verification", GradientChecks},
    {4, "closed-form losses", ClosedForms},
    {5, "si-sdr oracle", SiSdrOracle},
    {6, "m-step monotonicity", MStepMonotone},
    {7, "mcem smoke test", McemSmoke},
    {8, "guidance trend", GuidanceTrend},
    {9, "metric definitions", MetricCases},
    {10, "determinism", Determinism},
};

// Wall-clock budgets; exceeding one fails the criterion.
double BudgetSeconds(int id) {
  switch (id) {
    case 2: return 10.0;
    case 3: return 60.0;
    case 6: return 30.0;
    case 7: return 600.0;
    case 8: return 4 * 3600.0;
    default: return 0.0;
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"gvae acceptance suite"};
  Options opt;
  opt.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<int> only;
  app.add_option("--only", only, "run these criteria (repeatable)")
      ->check(CLI::Range(1, 10));
  app.add_option("--work-dir", opt.work_dir, "scratch and cache directory");
  app.add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", opt.verbose, "progress output");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected(only.begin(), only.end());

  int failed = 0;
  for (const Criterion &c : kCriteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(opt);
    } catch (const gvae::Error &e) {
      o = {false, std::string("error: ") + gvae::ErrorCodeName(e.code()) + ": " + e.what()};
    } catch (const std::exception &e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double budget = BudgetSeconds(c.id);
    if (budget > 0.0 && secs > budget) {
      o.pass = false;
      o.detail += "; over the time budget";
    }
    std::printf("criterion %2d %-24s %s  %s [%.1f s]\n", c.id, c.name,
                o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
