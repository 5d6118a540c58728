#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invopt/forward.hpp"
#include "invopt/losses.hpp"
#include "invopt/simplex.hpp"

namespace invopt {

/// Step rule of the projected subgradient method.
///   Polyak     alpha_k = SL(w_k) / ||g(w_k)||^2      ("psgdp")
///   SqrtDecay  alpha_k = k^{-1/2} / ||g(w_k)||       ("psgd2")
enum class StepPolicy { Polyak, SqrtDecay };

std::string policy_name(StepPolicy p);

struct TraceRow {
  std::size_t k = 0;
  Weights phi;
  double sl = 0.0;
  double pls = 0.0;
  std::optional<double> plw;
  std::optional<double> spo;
  double elapsed_ms = 0.0;
  /// CHAN only: summed inner projection value at phi.
  std::optional<double> objective;
};

struct Trace {
  std::vector<TraceRow> rows;
  std::size_t best_index = 0;  // first argmin of sl over rows
  /// Subgradient vanished (PSGD stopped early at the last row).
  bool converged = false;
  /// Rows are checkpoints at grid cardinalities; intermediate k are
  /// obtained by linear interpolation rather than by holding values.
  bool checkpoints = false;

  void finalize_best();
};

struct SolverResult {
  Weights phi;
  Trace trace;
  std::string method;
};

/// Projected subgradient descent on SL for at most K iterations, starting
/// at phi1. Every iterate is recorded; stops early when g(w_k) == 0 exactly
/// because neither step rule is defined there. Returns the best-SL iterate.
SolverResult psgd(const Dataset& data, StepPolicy policy, std::size_t K,
                  const Weights& phi1, const Weights* w_star = nullptr,
                  const Oracle& oracle = default_oracle());

/// Grid levels 0, 1, ... of the UPA lattice whose size fits the budget.
std::vector<std::vector<Weights>> upa_levels(const SimplexSpec& spec,
                                             std::size_t budget);

/// Uniform-grid search: evaluates PLS on every point of each grid level with
/// |level| <= budget. Trace rows sit at k = |level| and report the level's
/// PLS minimizer; the returned weights minimize PLS over everything
/// evaluated (first found on ties).
SolverResult upa_solve(const Dataset& data, std::size_t budget,
                       const Weights* w_star = nullptr,
                       const Oracle& oracle = default_oracle());

/// Random search over `budget` uniform draws; row k reports the PLS
/// minimizer among the first k draws.
SolverResult rpa_solve(const Dataset& data, std::size_t budget, Rng& rng,
                       const Weights* w_star = nullptr,
                       const Oracle& oracle = default_oracle());

/// Linear minimization over the optimal face
///   { x : A x <= 1, x >= 0, w^T x = v* }   of the LP at weights w.
class OptimalFace {
 public:
  OptimalFace(const LpInstance& inst, const Weights& w);

  double optimal_value() const { return value_; }
  /// argmin direction^T x over the face.
  std::vector<double> minimize(std::span<const double> direction) const;

 private:
  const LpInstance* inst_;
  std::vector<double> w_;
  double value_ = 0.0;
};

std::vector<double> optimal_face_lmo(const LpInstance& inst, const Weights& w,
                                     std::span<const double> direction);

using LinearMinimizer =
    std::function<std::vector<double>(std::span<const double>)>;

struct FrankWolfeResult {
  std::vector<double> point;
  double value = 0.0;  // ||point - target||^2
  double gap = 0.0;    // last Frank-Wolfe duality gap
  std::size_t iterations = 0;
};

/// Conditional gradient with exact line search on ||x - target||^2 over
/// conv(lmo range). Stops once the Frank-Wolfe gap is <= tol.
FrankWolfeResult frank_wolfe_min_distance(std::span<const double> target,
                                          const LinearMinimizer& lmo,
                                          std::size_t iters, double tol);

struct ChanOptions {
  std::size_t fw_iters = 10000;
  double fw_tol = 1e-8;
};

/// Grid search over `levels` minimizing sum_n min_{x in optimal face of
/// LP_n(w)} ||x - a_n||^2. LP datasets only. Rows are per-level
/// checkpoints as in upa_solve.
SolverResult chan_solve(const Dataset& data,
                        const std::vector<std::vector<Weights>>& levels,
                        const ChanOptions& options = {},
                        const Weights* w_star = nullptr,
                        const Oracle& oracle = default_oracle());

/// Inner CHAN objective at one weight vector.
double chan_objective(const Dataset& data, const Weights& w,
                      const ChanOptions& options = {});

}  // namespace invopt
