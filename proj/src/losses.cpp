#include "invopt/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "invopt/dense_lp.hpp"

namespace invopt {

Evaluation evaluate(const Weights& w, const Dataset& data,
                    const Oracle& oracle, const Weights* w_star) {
  const std::size_t N = data.size();
  const std::size_t d = data.simplex.d;
  if (w.dim() != d) throw std::invalid_argument("evaluate: weight dimension mismatch");
  if (w_star && w_star->dim() != d) {
    throw std::invalid_argument("evaluate: w_star dimension mismatch");
  }
  Evaluation ev;
  ev.predicted.reserve(N);
  ev.subgradient.assign(d, 0.0);
  double sl = 0.0, pls = 0.0, spo = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    Outcome a = oracle(data.instances[n], w.view());
    const auto& obs = data.observed[n].y;
    for (std::size_t i = 0; i < d; ++i) ev.subgradient[i] += a.y[i] - obs[i];
    sl += dot(w.view(), a.y) - dot(w.view(), obs);
    pls += squared_distance(a.y, obs);
    if (w_star) spo += dot(w_star->view(), obs) - dot(w_star->view(), a.y);
    ev.predicted.push_back(std::move(a));
  }
  const double inv = 1.0 / static_cast<double>(N);
  for (double& g : ev.subgradient) g *= inv;
  ev.losses.sl = sl * inv;
  ev.losses.pls = pls * inv;
  if (w_star) {
    ev.losses.plw = prediction_loss_weights(w, *w_star);
    ev.losses.spo = spo * inv;
  }
  return ev;
}

std::vector<double> subgradient(const Weights& w, const Dataset& data,
                                const Oracle& oracle) {
  return evaluate(w, data, oracle).subgradient;
}

double suboptimality_loss(const Weights& w, const Dataset& data,
                          const Oracle& oracle) {
  return evaluate(w, data, oracle).losses.sl;
}

double prediction_loss_solution(const Weights& w, const Dataset& data,
                                const Oracle& oracle) {
  return evaluate(w, data, oracle).losses.pls;
}

double prediction_loss_weights(const Weights& w, const Weights& w_star) {
  if (w.dim() != w_star.dim()) {
    throw std::invalid_argument("prediction_loss_weights: dimension mismatch");
  }
  return std::sqrt(squared_distance(w.view(), w_star.view()));
}

double estimated_loss(const Weights& w, const Weights& w_star,
                      const Dataset& data, const Oracle& oracle) {
  return *evaluate(w, data, oracle, &w_star).losses.spo;
}

namespace {

double diameter(const std::vector<Outcome>& Y) {
  double best = 0.0;
  for (std::size_t a = 0; a < Y.size(); ++a) {
    for (std::size_t b = a + 1; b < Y.size(); ++b) {
      best = std::max(best, squared_distance(Y[a].y, Y[b].y));
    }
  }
  return std::sqrt(best);
}

bool same_outcome(const Outcome& a, const Outcome& b, double tol) {
  for (std::size_t i = 0; i < a.y.size(); ++i) {
    if (std::abs(a.y[i] - b.y[i]) > tol) return false;
  }
  return true;
}

std::vector<std::vector<Outcome>> all_outcome_sets(const Dataset& data) {
  std::vector<std::vector<Outcome>> sets;
  sets.reserve(data.size());
  for (const auto& inst : data.instances) sets.push_back(outcome_set(inst));
  return sets;
}

PsiCertificate certify(const Weights& w_star, const Dataset& data,
                       const std::vector<std::vector<Outcome>>& sets,
                       double strict_tol) {
  PsiCertificate cert;
  cert.margin = std::numeric_limits<double>::infinity();
  cert.consistent = true;
  double max_diam = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto& Y = sets[n];
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < Y.size(); ++k) {
      const double s = dot(w_star.view(), Y[k].y);
      if (s > best_score) {
        second = best_score;
        best_score = s;
        best = k;
      } else if (s > second) {
        second = s;
      }
    }
    cert.argmax.push_back(Y[best]);
    cert.margin = std::min(cert.margin, best_score - second);
    cert.diameters.push_back(diameter(Y));
    max_diam = std::max(max_diam, cert.diameters.back());
    if (!same_outcome(Y[best], data.observed[n], 1e-9)) cert.consistent = false;
  }
  cert.member = cert.margin > strict_tol;
  if (cert.member) {
    cert.epsilon = max_diam > 0.0 ? cert.margin / (2.0 * max_diam)
                                  : std::numeric_limits<double>::infinity();
  }
  return cert;
}

}  // namespace

PsiCertificate psi_membership(const Weights& w_star, const Dataset& data,
                              double strict_tol) {
  data.validate();
  return certify(w_star, data, all_outcome_sets(data), strict_tol);
}

double tuple_realizability_margin(const std::vector<std::vector<Outcome>>& sets,
                                  const std::vector<std::size_t>& choice,
                                  const SimplexSpec& simplex) {
  // max t  s.t.  (xi_n - b)^T (shift + p) >= t  for every listed competitor b,
  // sum(p) = 1, p >= 0. Written with t = tau - M, tau >= 0, so that every
  // pair row is a <= row with nonnegative right-hand side and only the mass
  // row needs an artificial. M bounds |t| from above.
  const std::size_t d = simplex.d;
  const double mass = simplex.mass();
  double M = 1.0;
  for (std::size_t n = 0; n < choice.size(); ++n) {
    const auto& xi = sets[n][choice[n]].y;
    for (const auto& b : sets[n]) {
      double l1 = 0.0;
      for (std::size_t i = 0; i < d; ++i) l1 += std::abs(xi[i] - b.y[i]);
      M = std::max(M, 1.0 + l1 * mass);
    }
  }

  LinearProgram lp;
  lp.num_vars = d + 1;
  lp.objective.assign(d + 1, 0.0);
  lp.objective[d] = 1.0;

  std::vector<double> sum_p(d + 1, 1.0);
  sum_p[d] = 0.0;
  lp.add_row(std::move(sum_p), RowSense::Equal, 1.0);

  // Keeps tau bounded when there are no competitors.
  std::vector<double> cap(d + 1, 0.0);
  cap[d] = 1.0;
  lp.add_row(std::move(cap), RowSense::LessEqual, M + 1e6);

  for (std::size_t n = 0; n < choice.size(); ++n) {
    const auto& xi = sets[n][choice[n]].y;
    for (std::size_t k = 0; k < sets[n].size(); ++k) {
      if (k == choice[n]) continue;
      const auto& b = sets[n][k].y;
      std::vector<double> row(d + 1, 0.0);
      double shifted = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        row[i] = -(xi[i] - b[i]);
        shifted += simplex.shift * (xi[i] - b[i]);
      }
      row[d] = 1.0;
      lp.add_row(std::move(row), RowSense::LessEqual, M + shifted);
    }
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) {
    throw LpError("tuple realizability LP did not solve to optimality");
  }
  return sol.objective - M;
}

GammaConstants gamma_constants(const Weights& w_star, const Dataset& data,
                               double strict_tol) {
  data.validate();
  const auto sets = all_outcome_sets(data);
  const PsiCertificate cert = certify(w_star, data, sets, strict_tol);
  if (!cert.member || !cert.consistent) {
    throw NotInPsiError(
        "gamma_constants: w_star does not have a strict, consistent argmax on "
        "every instance");
  }
  const std::size_t N = data.size();
  const std::size_t d = data.simplex.d;
  GammaConstants out;
  for (double diam : cert.diameters) out.G += diam;
  out.G *= 2.0 / static_cast<double>(N);

  // Outcomes that win strictly somewhere on the simplex. The upper
  // envelope over Y_n equals the envelope over these, so a tuple's region
  // is open and nonempty iff it has a positive margin against them alone.
  std::vector<std::vector<Outcome>> winners(N);
  for (std::size_t n = 0; n < N; ++n) {
    const std::vector<std::vector<Outcome>> one{sets[n]};
    for (std::size_t k = 0; k < sets[n].size(); ++k) {
      if (tuple_realizability_margin(one, {k}, data.simplex) > strict_tol) {
        winners[n].push_back(sets[n][k]);
      }
    }
  }

  std::vector<std::size_t> choice;
  choice.reserve(N);
  const auto visit = [&](auto&& self) -> void {
    const std::size_t n = choice.size();
    if (n == N) {
      ++out.realizable_tuples;
      std::vector<double> g(d, 0.0);
      double gmax = 0.0;
      for (std::size_t m = 0; m < N; ++m) {
        for (std::size_t i = 0; i < d; ++i) {
          g[i] += (winners[m][choice[m]].y[i] - data.observed[m].y[i]) /
                  static_cast<double>(N);
        }
      }
      for (double gi : g) gmax = std::max(gmax, std::abs(gi));
      if (gmax > 1e-9) {
        ++out.wrong_tuples;
        out.worst_regret_score =
            std::max(out.worst_regret_score, dot(w_star.view(), g));
      }
      return;
    }
    for (std::size_t k = 0; k < winners[n].size(); ++k) {
      choice.push_back(k);
      // Single instances were settled by the prefilter.
      if (n == 0 || tuple_realizability_margin(winners, choice, data.simplex) > strict_tol) {
        self(self);
      }
      choice.pop_back();
    }
  };
  visit(visit);

  if (out.wrong_tuples > 0) {
    out.gamma = -out.worst_regret_score / (4.0 * out.G);
  }
  return out;
}

double finite_iteration_bound(double gamma) {
  const double floor_term = 16.0 * std::numbers::e * std::numbers::e;
  if (std::isinf(gamma)) return floor_term;
  const double a = 2.0 * (2.0 + gamma) / gamma;
  const double b = 8.0 * std::log(2.0 / gamma) / gamma;
  return std::max({a * a, b * b, floor_term});
}

double contraction_start_index(double epsilon, double gamma) {
  const double e2 = epsilon * epsilon;
  return std::floor(4.0 / (e2 * e2 * gamma * gamma + 8.0 * e2) + 1.0);
}

}  // namespace invopt
