#pragma once

// Synthetic experiment protocol: draw true weights, draw instances, observe
// the forward solutions at the true weights, run every configured method,
// repeat over trials, and reduce to worst-case convergence curves.

#include <cstdint>
#include <string>
#include <vector>

#include "invopt/forward.hpp"
#include "invopt/simplex.hpp"
#include "invopt/solvers.hpp"

namespace invopt {

inline const std::vector<std::string> kAllMethods = {"psgd2", "psgdp", "upa",
                                                     "rpa", "chan"};

/// Per-coordinate offset of the scheduling weight simplex.
inline constexpr double kSchedulingShift = 1e-3;

struct ExperimentConfig {
  std::string experiment = "experiment";
  Family family = Family::Lp;
  std::size_t d = 4;
  std::size_t J = 100;        // LP rows per instance
  double r_max = 10.0;        // LP axis-scale range [1/r_max, 1]
  std::size_t N = 1;          // instances per dataset
  std::size_t K = 500;        // iterations / evaluations per method
  std::size_t trials = 100;
  std::vector<std::string> methods = {"psgd2"};
  std::uint64_t seed = 42;
  bool timing = true;         // false writes elapsed_ms = 0 for byte-stable output
  bool allow_large = false;   // permits scheduling d > 6
  ChanOptions chan;

  SimplexSpec simplex() const;
  /// Throws std::invalid_argument describing the first violated rule.
  void validate() const;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::string method;
  Trace trace;
  Weights phi_star;
  std::uint64_t digest = 0;  // combined digest of the trial's instances
};

/// Order-independent per-trial seed derived from (seed, trial).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

LpInstance gen_lp_instance(std::size_t d, std::size_t J, double r_max, Rng& rng);
SchedulingInstance gen_scheduling_instance(std::size_t d, Rng& rng);

/// Steps (1)-(4) for one trial; records come back in cfg.methods order.
std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg,
                                   std::size_t trial);

/// All trials, spread over `threads` workers (0 = hardware concurrency).
/// Output order is (trial, method) regardless of scheduling.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg,
                                        std::size_t threads = 0);

/// Linear interpolation through (xs[i], ys[i]) with xs strictly increasing;
/// constant extension outside [xs.front(), xs.back()].
double interpolate_checkpoints(const std::vector<double>& xs,
                               const std::vector<double>& ys, double x);

struct DenseCurve {
  std::vector<double> sl, pls, plw;  // index k - 1
};

/// Expands a trace to k = 1..K: checkpoint traces are interpolated, others
/// hold the most recent row (a converged PSGD run keeps its final iterate).
DenseCurve densify(const Trace& trace, std::size_t K);

struct WorstCaseRow {
  std::string method;
  std::size_t k = 0;
  double worst_sl = 0.0;
  double worst_pls = 0.0;
  double worst_plw = 0.0;
};

struct WorstCaseTable {
  Family family = Family::Lp;
  std::size_t d = 0;
  std::vector<WorstCaseRow> rows;  // ordered by method, then k
};

/// Pointwise maximum over trials of each loss, per method and k.
WorstCaseTable aggregate_worst_case(const ExperimentConfig& cfg,
                                    const std::vector<TrialRecord>& records);

inline constexpr const char* kRawCsvHeader =
    "experiment,family,d,method,trial,k,sl,pls,plw,spo,elapsed_ms";
inline constexpr const char* kWorstCaseCsvHeader =
    "family,d,method,k,worst_sl,worst_pls,worst_plw";

void write_raw_csv(const ExperimentConfig& cfg,
                   const std::vector<TrialRecord>& records,
                   const std::string& path);
void write_csv(const WorstCaseTable& table, const std::string& path);
WorstCaseTable read_csv(const std::string& path);

}  // namespace invopt
