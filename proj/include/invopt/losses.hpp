#pragma once

// Losses of an inverse-optimization estimate w against a dataset
// {(s_n, a_n)}, with N = number of instances:
//
//   SL   (1/N) sum_n  w^T a(w, s_n) - w^T a_n          (suboptimality)
//   PLS  (1/N) sum_n  ||a(w, s_n) - a_n||^2            (solution error)
//   PLW  ||w - w*||                                    (weight error)
//   SPO  (1/N) sum_n  w*^T a_n - w*^T a(w, s_n)        (regret under w*)
//
// and the subgradient g(w) = (1/N) sum_n (a(w, s_n) - a_n) of SL. Also
// hosts the structural checks behind the finite-iteration guarantee: strict
// uniqueness of the argmax at w* and the constants gamma, G bounding the
// regret away from zero.

#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "invopt/forward.hpp"
#include "invopt/simplex.hpp"

namespace invopt {

class NotInPsiError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct LossReport {
  double sl = 0.0;
  double pls = 0.0;
  std::optional<double> plw;
  std::optional<double> spo;
};

/// One oracle pass over the dataset with everything derived from it.
struct Evaluation {
  std::vector<Outcome> predicted;
  std::vector<double> subgradient;
  LossReport losses;
};

Evaluation evaluate(const Weights& w, const Dataset& data,
                    const Oracle& oracle = default_oracle(),
                    const Weights* w_star = nullptr);

std::vector<double> subgradient(const Weights& w, const Dataset& data,
                                const Oracle& oracle = default_oracle());
double suboptimality_loss(const Weights& w, const Dataset& data,
                          const Oracle& oracle = default_oracle());
double prediction_loss_solution(const Weights& w, const Dataset& data,
                                const Oracle& oracle = default_oracle());
double prediction_loss_weights(const Weights& w, const Weights& w_star);
double estimated_loss(const Weights& w, const Weights& w_star,
                      const Dataset& data,
                      const Oracle& oracle = default_oracle());

/// Default threshold below which a score gap counts as a tie.
inline constexpr double kStrictMarginTol = 1e-10;

struct PsiCertificate {
  /// Strict unique argmax at w* on every instance (margin > tolerance).
  bool member = false;
  /// Every observed outcome equals the argmax at w* (within 1e-9).
  bool consistent = false;
  std::vector<Outcome> argmax;
  /// min over n, over b != argmax_n of w*^T argmax_n - w*^T b.
  double margin = 0.0;
  /// margin / (2 * max_n diam Y_n): any weight vector within this radius of
  /// w* keeps every argmax. Zero for non-members.
  double epsilon = 0.0;
  std::vector<double> diameters;
};

PsiCertificate psi_membership(const Weights& w_star, const Dataset& data,
                              double strict_tol = kStrictMarginTol);

struct GammaConstants {
  /// +infinity when no realizable wrong tuple exists.
  double gamma = std::numeric_limits<double>::infinity();
  double G = 0.0;
  /// max over realizable tuples with g != 0 of w*^T g; -inf when none.
  double worst_regret_score = -std::numeric_limits<double>::infinity();
  std::size_t realizable_tuples = 0;
  std::size_t wrong_tuples = 0;
};

/// Enumerates every tuple (xi_1, ..., xi_N) in Y_1 x ... x Y_N that some
/// weight vector realizes with a strict margin (checked by an LP that
/// maximizes the minimum margin over the simplex), and maximizes w*^T g
/// over those with g != 0. Throws NotInPsiError unless w* is a consistent
/// member of Psi.
GammaConstants gamma_constants(const Weights& w_star, const Dataset& data,
                               double strict_tol = kStrictMarginTol);

/// Largest strict margin achievable for the partial tuple `choice` (one
/// outcome index per leading instance) over the simplex. Positive iff the
/// tuple's open region is nonempty.
double tuple_realizability_margin(const std::vector<std::vector<Outcome>>& sets,
                                  const std::vector<std::size_t>& choice,
                                  const SimplexSpec& simplex);

/// max((2(2+gamma)/gamma)^2, (8 log(2/gamma)/gamma)^2, 16 e^2); iteration
/// count after which PSGD2 is guaranteed to have zero PLS.
double finite_iteration_bound(double gamma);

/// floor(4 / (eps^4 gamma^2 + 8 eps^2) + 1), the start index of the
/// log-linear contraction phase. Diagnostic only.
double contraction_start_index(double epsilon, double gamma);

}  // namespace invopt
