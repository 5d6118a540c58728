#include "invopt/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "invopt/dense_lp.hpp"

namespace invopt {

std::string policy_name(StepPolicy p) {
  return p == StepPolicy::Polyak ? "psgdp" : "psgd2";
}

void Trace::finalize_best() {
  best_index = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].sl < rows[best_index].sl) best_index = i;
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

TraceRow make_row(std::size_t k, const Weights& phi, const LossReport& losses,
                  double elapsed) {
  TraceRow row;
  row.k = k;
  row.phi = phi;
  row.sl = losses.sl;
  row.pls = losses.pls;
  row.plw = losses.plw;
  row.spo = losses.spo;
  row.elapsed_ms = elapsed;
  return row;
}

}  // namespace

SolverResult psgd(const Dataset& data, StepPolicy policy, std::size_t K,
                  const Weights& phi1, const Weights* w_star,
                  const Oracle& oracle) {
  data.validate();
  if (K < 1) throw std::invalid_argument("psgd: K must be >= 1");
  if (!on_simplex(phi1.view(), data.simplex, 1e-9)) {
    throw std::invalid_argument("psgd: initial weights are not on the simplex");
  }
  const auto start = Clock::now();
  SolverResult result;
  result.method = policy_name(policy);
  Trace& trace = result.trace;
  trace.rows.reserve(K);

  Weights phi = phi1;
  std::vector<double> step(data.simplex.d);
  for (std::size_t k = 1; k <= K; ++k) {
    const Evaluation ev = evaluate(phi, data, oracle, w_star);
    trace.rows.push_back(make_row(k, phi, ev.losses, ms_since(start)));

    const auto& g = ev.subgradient;
    double norm2 = 0.0;
    for (double gi : g) norm2 += gi * gi;
    if (norm2 == 0.0) {
      trace.converged = true;
      break;
    }
    if (k == K) break;

    const double alpha =
        policy == StepPolicy::Polyak
            ? ev.losses.sl / norm2
            : 1.0 / (std::sqrt(static_cast<double>(k)) * std::sqrt(norm2));
    for (std::size_t i = 0; i < step.size(); ++i) step[i] = phi[i] - alpha * g[i];
    phi = project_onto_simplex(step, data.simplex);
  }
  trace.finalize_best();
  result.phi = trace.rows[trace.best_index].phi;
  return result;
}

std::vector<std::vector<Weights>> upa_levels(const SimplexSpec& spec,
                                             std::size_t budget) {
  std::vector<std::vector<Weights>> levels;
  for (std::size_t j = 0; upa_level_size(spec.d, j) <= budget; ++j) {
    levels.push_back(upa_grid(spec, j));
  }
  return levels;
}

SolverResult upa_solve(const Dataset& data, std::size_t budget,
                       const Weights* w_star, const Oracle& oracle) {
  data.validate();
  if (budget < 1) throw std::invalid_argument("upa_solve: budget must be >= 1");
  const auto start = Clock::now();
  SolverResult result;
  result.method = "upa";
  result.trace.checkpoints = true;
  double overall_pls = std::numeric_limits<double>::infinity();

  for (const auto& level : upa_levels(data.simplex, budget)) {
    std::optional<Evaluation> level_best;
    const Weights* level_phi = nullptr;
    for (const Weights& w : level) {
      Evaluation ev = evaluate(w, data, oracle, w_star);
      if (!level_best || ev.losses.pls < level_best->losses.pls) {
        level_best = std::move(ev);
        level_phi = &w;
      }
    }
    if (level_best->losses.pls < overall_pls) {
      overall_pls = level_best->losses.pls;
      result.phi = *level_phi;
    }
    result.trace.rows.push_back(
        make_row(level.size(), *level_phi, level_best->losses, ms_since(start)));
  }
  result.trace.finalize_best();
  return result;
}

SolverResult rpa_solve(const Dataset& data, std::size_t budget, Rng& rng,
                       const Weights* w_star, const Oracle& oracle) {
  data.validate();
  if (budget < 1) throw std::invalid_argument("rpa_solve: budget must be >= 1");
  const auto start = Clock::now();
  SolverResult result;
  result.method = "rpa";
  result.trace.rows.reserve(budget);
  LossReport best;
  for (std::size_t k = 1; k <= budget; ++k) {
    Weights w = sample_uniform_simplex(data.simplex, rng);
    const Evaluation ev = evaluate(w, data, oracle, w_star);
    if (k == 1 || ev.losses.pls < best.pls) {
      best = ev.losses;
      result.phi = std::move(w);
    }
    result.trace.rows.push_back(make_row(k, result.phi, best, ms_since(start)));
  }
  result.trace.finalize_best();
  return result;
}

// --- CHAN -------------------------------------------------------------------

namespace {

LinearProgram face_program(const LpInstance& inst) {
  LinearProgram lp;
  lp.num_vars = inst.d();
  lp.objective.assign(inst.d(), 0.0);
  for (std::size_t j = 0; j < inst.num_rows(); ++j) {
    std::vector<double> row(inst.d());
    for (std::size_t i = 0; i < inst.d(); ++i) row[i] = inst.coefficient(j, i);
    lp.add_row(std::move(row), RowSense::LessEqual, 1.0);
  }
  return lp;
}

}  // namespace

OptimalFace::OptimalFace(const LpInstance& inst, const Weights& w)
    : inst_(&inst), w_(w.coords()) {
  if (w.dim() != inst.d()) {
    throw std::invalid_argument("OptimalFace: weight dimension mismatch");
  }
  value_ = dot(w_, lp_argmax(inst, w.view()).y);
}

std::vector<double> OptimalFace::minimize(
    std::span<const double> direction) const {
  if (direction.size() != inst_->d()) {
    throw std::invalid_argument("OptimalFace::minimize: direction dimension mismatch");
  }
  LinearProgram lp = face_program(*inst_);
  for (std::size_t i = 0; i < lp.num_vars; ++i) lp.objective[i] = -direction[i];
  // w^T x = v*, relaxed to w^T x >= v* - tol (the reverse holds at the optimum).
  const double tol = 1e-9 * std::max(1.0, std::abs(value_));
  lp.add_row(w_, RowSense::GreaterEqual, value_ - tol);
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) {
    throw LpError("optimal face LMO: face LP is not optimal");
  }
  return sol.x;
}

std::vector<double> optimal_face_lmo(const LpInstance& inst, const Weights& w,
                                     std::span<const double> direction) {
  return OptimalFace(inst, w).minimize(direction);
}

FrankWolfeResult frank_wolfe_min_distance(std::span<const double> target,
                                          const LinearMinimizer& lmo,
                                          std::size_t iters, double tol) {
  if (iters < 1) throw std::invalid_argument("frank_wolfe: iters must be >= 1");
  const std::size_t d = target.size();
  std::vector<double> start_dir(target.begin(), target.end());
  for (double& v : start_dir) v = -v;

  FrankWolfeResult res;
  res.point = lmo(start_dir);
  std::vector<double> grad(d), dir(d);
  for (std::size_t it = 1; it <= iters; ++it) {
    res.iterations = it;
    for (std::size_t i = 0; i < d; ++i) grad[i] = 2.0 * (res.point[i] - target[i]);
    const std::vector<double> s = lmo(grad);
    double dir2 = 0.0;
    res.gap = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      dir[i] = s[i] - res.point[i];
      res.gap -= grad[i] * dir[i];
      dir2 += dir[i] * dir[i];
    }
    if (res.gap <= tol || dir2 == 0.0) break;
    // Exact minimizer of the quadratic along the segment.
    const double step = std::clamp(res.gap / (2.0 * dir2), 0.0, 1.0);
    for (std::size_t i = 0; i < d; ++i) res.point[i] += step * dir[i];
  }
  res.value = squared_distance(res.point, target);
  return res;
}

double chan_objective(const Dataset& data, const Weights& w,
                      const ChanOptions& options) {
  double total = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto& inst = std::get<LpInstance>(data.instances[n]);
    const OptimalFace face(inst, w);
    const auto fw = frank_wolfe_min_distance(
        data.observed[n].y,
        [&](std::span<const double> dir) { return face.minimize(dir); },
        options.fw_iters, options.fw_tol);
    total += fw.value;
  }
  return total;
}

SolverResult chan_solve(const Dataset& data,
                        const std::vector<std::vector<Weights>>& levels,
                        const ChanOptions& options, const Weights* w_star,
                        const Oracle& oracle) {
  data.validate();
  if (data.family() != Family::Lp) {
    throw std::invalid_argument("CHAN requires LP family");
  }
  if (levels.empty() || levels.front().empty()) {
    throw std::invalid_argument("chan_solve: empty grid");
  }
  const auto start = Clock::now();
  SolverResult result;
  result.method = "chan";
  result.trace.checkpoints = true;
  double overall = std::numeric_limits<double>::infinity();
  std::size_t seen = 0;

  for (const auto& level : levels) {
    double level_obj = std::numeric_limits<double>::infinity();
    const Weights* level_phi = nullptr;
    for (const Weights& w : level) {
      const double obj = chan_objective(data, w, options);
      if (obj < level_obj) {
        level_obj = obj;
        level_phi = &w;
      }
    }
    if (level_obj < overall) {
      overall = level_obj;
      result.phi = *level_phi;
    }
    seen = std::max(seen + 1, level.size());
    const Evaluation ev = evaluate(*level_phi, data, oracle, w_star);
    TraceRow row = make_row(seen, *level_phi, ev.losses, ms_since(start));
    row.objective = level_obj;
    result.trace.rows.push_back(std::move(row));
  }
  result.trace.finalize_best();
  return result;
}

}  // namespace invopt
