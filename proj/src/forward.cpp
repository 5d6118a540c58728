#include "invopt/forward.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <optional>

#include "invopt/dense_lp.hpp"

namespace invopt {

std::string family_name(Family f) {
  switch (f) {
    case Family::Lp:
      return "lp";
    case Family::Scheduling:
      return "scheduling";
    case Family::PointSet:
      return "points";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  if (name == "lp") return Family::Lp;
  if (name == "scheduling") return Family::Scheduling;
  if (name == "points") return Family::PointSet;
  throw std::invalid_argument("unknown family '" + name + "'");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

namespace {

void require_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(expected) + ", got " +
                                std::to_string(got));
  }
}

// Solves the dense square system M x = rhs by Gaussian elimination with
// partial pivoting. Returns nullopt when M is numerically singular.
std::optional<std::vector<double>> solve_square(std::vector<double> M,
                                                std::vector<double> rhs,
                                                std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(M[r * n + c]) > std::abs(M[piv * n + c])) piv = r;
    }
    if (std::abs(M[piv * n + c]) < 1e-12) return std::nullopt;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(M[c * n + k], M[piv * n + k]);
      std::swap(rhs[c], rhs[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = M[r * n + c] / M[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) M[r * n + k] -= f * M[c * n + k];
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t c = n; c-- > 0;) {
    double s = rhs[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= M[c * n + k] * x[k];
    x[c] = s / M[c * n + c];
  }
  return x;
}

// Hyperplane h: h < J is row h at equality, J + i is x_i = 0.
std::optional<std::vector<double>> vertex_from_active(
    const LpInstance& inst, std::span<const std::size_t> active) {
  const std::size_t d = inst.d();
  const std::size_t J = inst.num_rows();
  std::vector<double> M(d * d, 0.0);
  std::vector<double> rhs(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t h = active[k];
    if (h < J) {
      for (std::size_t i = 0; i < d; ++i) M[k * d + i] = inst.coefficient(h, i);
      rhs[k] = 1.0;
    } else {
      M[k * d + (h - J)] = 1.0;
    }
  }
  return solve_square(std::move(M), std::move(rhs), d);
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool near(const std::vector<double>& a, const std::vector<double>& b,
          double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

}  // namespace

// --- instances --------------------------------------------------------------

LpInstance::LpInstance(std::vector<double> r,
                       std::vector<std::vector<double>> B)
    : r_(std::move(r)), B_(std::move(B)) {
  const std::size_t d = r_.size();
  if (d == 0) throw std::invalid_argument("LpInstance: empty r");
  if (B_.empty()) throw std::invalid_argument("LpInstance: no constraint rows");
  for (double ri : r_) {
    if (!(ri > 0.0) || !std::isfinite(ri)) {
      throw std::invalid_argument("LpInstance: r must be positive and finite");
    }
  }
  A_.assign(B_.size() * d, 0.0);
  std::vector<bool> bounded(d, false);
  for (std::size_t j = 0; j < B_.size(); ++j) {
    require_dim(d, B_[j].size(), "LpInstance row");
    for (std::size_t i = 0; i < d; ++i) {
      const double b = B_[j][i];
      if (!(b >= 0.0) || !std::isfinite(b)) {
        throw std::invalid_argument("LpInstance: B must be nonnegative");
      }
      A_[j * d + i] = r_[i] * r_[i] * b;
      if (A_[j * d + i] > 0.0) bounded[i] = true;
    }
  }
  if (std::find(bounded.begin(), bounded.end(), false) != bounded.end()) {
    throw std::invalid_argument(
        "LpInstance: some coordinate is not cut by any row (unbounded LP)");
  }
}

double LpInstance::normalization_error() const {
  double worst = 0.0;
  for (const auto& row : B_) {
    double s = 0.0;
    for (std::size_t i = 0; i < d(); ++i) s += r_[i] * r_[i] * row[i] * row[i];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

SchedulingInstance::SchedulingInstance(std::vector<double> release,
                                       std::vector<double> processing)
    : release_(std::move(release)), processing_(std::move(processing)) {
  if (release_.empty()) throw std::invalid_argument("SchedulingInstance: no jobs");
  require_dim(release_.size(), processing_.size(), "SchedulingInstance p");
  double max_r = 0.0;
  double sum_p = 0.0;
  for (std::size_t j = 0; j < release_.size(); ++j) {
    if (!(release_[j] >= 0.0) || !std::isfinite(release_[j])) {
      throw std::invalid_argument("SchedulingInstance: release times must be >= 0");
    }
    if (!(processing_[j] > 0.0) || !std::isfinite(processing_[j])) {
      throw std::invalid_argument("SchedulingInstance: processing times must be > 0");
    }
    max_r = std::max(max_r, release_[j]);
    sum_p += processing_[j];
  }
  big_m_ = max_r + sum_p;
}

PointSetInstance::PointSetInstance(std::vector<std::vector<double>> points)
    : points_(std::move(points)) {
  if (points_.empty() || points_.front().empty()) {
    throw std::invalid_argument("PointSetInstance: empty point set");
  }
  for (const auto& p : points_) {
    require_dim(points_.front().size(), p.size(), "PointSetInstance point");
  }
}

Family family_of(const Instance& inst) {
  return std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LpInstance>) return Family::Lp;
        else if constexpr (std::is_same_v<T, SchedulingInstance>) return Family::Scheduling;
        else return Family::PointSet;
      },
      inst);
}

std::size_t dim_of(const Instance& inst) {
  return std::visit([](const auto& s) { return s.d(); }, inst);
}

Outcome forward_argmax(const Instance& inst, std::span<const double> w) {
  return std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LpInstance>) return lp_argmax(s, w);
        else if constexpr (std::is_same_v<T, SchedulingInstance>) return schedule_argmax(s, w);
        else return point_set_argmax(s, w);
      },
      inst);
}

Oracle default_oracle() { return &forward_argmax; }

// --- LP ---------------------------------------------------------------------

Outcome lp_argmax(const LpInstance& inst, std::span<const double> w) {
  const std::size_t d = inst.d();
  require_dim(d, w.size(), "lp_argmax weights");
  LinearProgram lp;
  lp.num_vars = d;
  lp.objective.assign(w.begin(), w.end());
  for (std::size_t j = 0; j < inst.num_rows(); ++j) {
    std::vector<double> row(d);
    for (std::size_t i = 0; i < d; ++i) row[i] = inst.coefficient(j, i);
    lp.add_row(std::move(row), RowSense::LessEqual, 1.0);
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) {
    throw LpError("lp_argmax: forward LP is not bounded-feasible");
  }

  // Nonbasic columns: structural i means x_i = 0 (hyperplane J + i); slack
  // label d + j means row j is tight (hyperplane j).
  std::vector<std::size_t> active;
  active.reserve(sol.nonbasic.size());
  for (std::size_t c : sol.nonbasic) {
    active.push_back(c < d ? inst.num_rows() + c : c - d);
  }
  std::sort(active.begin(), active.end());
  if (active.size() == d) {
    if (auto x = vertex_from_active(inst, active)) {
      for (double& xi : *x) {
        if (xi == 0.0) xi = 0.0;  // normalize -0.0
      }
      return Outcome{std::move(*x)};
    }
  }
  return Outcome{sol.x};
}

std::vector<Outcome> lp_vertex_enumeration(const LpInstance& inst) {
  const std::size_t d = inst.d();
  const std::size_t J = inst.num_rows();
  if (d > 6 || J > 12) {
    throw SizeLimitError("lp_vertex_enumeration: requires d <= 6 and J <= 12");
  }
  const std::size_t H = J + d;
  std::vector<std::vector<double>> found;
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  constexpr double tol = 1e-9;
  for (;;) {
    if (auto x = vertex_from_active(inst, idx)) {
      bool feasible = true;
      for (std::size_t i = 0; i < d && feasible; ++i) feasible = (*x)[i] >= -tol;
      for (std::size_t j = 0; j < J && feasible; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += inst.coefficient(j, i) * (*x)[i];
        feasible = s <= 1.0 + tol;
      }
      if (feasible) {
        for (double& xi : *x) {
          if (std::abs(xi) <= tol) xi = 0.0;
        }
        const bool dup = std::any_of(found.begin(), found.end(), [&](const auto& v) {
          return near(v, *x, tol);
        });
        if (!dup) found.push_back(std::move(*x));
      }
    }
    // Next d-combination of {0..H-1}.
    std::size_t k = d;
    while (k > 0 && idx[k - 1] == H - d + (k - 1)) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t t = k; t < d; ++t) idx[t] = idx[t - 1] + 1;
  }
  std::sort(found.begin(), found.end(), lex_less);
  std::vector<Outcome> out;
  out.reserve(found.size());
  for (auto& v : found) out.push_back(Outcome{std::move(v)});
  return out;
}

// --- scheduling -------------------------------------------------------------

Schedule schedule_eval_order(const SchedulingInstance& inst,
                             std::span<const std::size_t> order) {
  const std::size_t d = inst.d();
  require_dim(d, order.size(), "schedule_eval_order order");
  std::vector<bool> seen(d, false);
  for (std::size_t j : order) {
    if (j >= d || seen[j]) {
      throw std::invalid_argument("schedule_eval_order: order is not a permutation");
    }
    seen[j] = true;
  }
  Schedule s;
  s.start.assign(d, 0.0);
  s.completion.assign(d, 0.0);
  double machine_free = 0.0;
  for (std::size_t pos = 0; pos < d; ++pos) {
    const std::size_t j = order[pos];
    double b = std::ceil(inst.release()[j]);
    if (pos > 0) b = std::max(b, std::ceil(machine_free));
    s.start[j] = b;
    s.completion[j] = b + inst.processing()[j];
    machine_free = s.completion[j];
  }
  return s;
}

Outcome schedule_argmax(const SchedulingInstance& inst,
                        std::span<const double> w) {
  const std::size_t d = inst.d();
  require_dim(d, w.size(), "schedule_argmax weights");
  if (d > 10) throw SizeLimitError("schedule_argmax: requires d <= 10");
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> best;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> neg(d);
  do {
    const Schedule s = schedule_eval_order(inst, order);
    const double cost = dot(w, s.completion);
    for (std::size_t j = 0; j < d; ++j) neg[j] = -s.completion[j];
    if (cost < best_cost || (cost == best_cost && lex_less(neg, best))) {
      best_cost = cost;
      best = neg;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return Outcome{std::move(best)};
}

// --- point sets -------------------------------------------------------------

Outcome point_set_argmax(const PointSetInstance& inst,
                         std::span<const double> w) {
  require_dim(inst.d(), w.size(), "point_set_argmax weights");
  const std::vector<double>* best = nullptr;
  double best_val = -std::numeric_limits<double>::infinity();
  for (const auto& p : inst.points()) {
    const double v = dot(w, p);
    if (v > best_val || (v == best_val && lex_less(p, *best))) {
      best_val = v;
      best = &p;
    }
  }
  return Outcome{*best};
}

// --- shared -----------------------------------------------------------------

std::vector<Outcome> outcome_set(const Instance& inst) {
  std::vector<std::vector<double>> pts;
  if (const auto* lp = std::get_if<LpInstance>(&inst)) {
    return lp_vertex_enumeration(*lp);
  } else if (const auto* sch = std::get_if<SchedulingInstance>(&inst)) {
    const std::size_t d = sch->d();
    if (d > 10) throw SizeLimitError("outcome_set: scheduling requires d <= 10");
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    do {
      Schedule s = schedule_eval_order(*sch, order);
      for (double& c : s.completion) c = -c;
      pts.push_back(std::move(s.completion));
    } while (std::next_permutation(order.begin(), order.end()));
  } else {
    pts = std::get<PointSetInstance>(inst).points();
  }
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Outcome> out;
  out.reserve(pts.size());
  for (auto& p : pts) out.push_back(Outcome{std::move(p)});
  return out;
}

void Dataset::validate() const {
  simplex.validate();
  if (instances.empty()) throw std::invalid_argument("dataset is empty");
  if (instances.size() != observed.size()) {
    throw std::invalid_argument("dataset: instance/outcome count mismatch");
  }
  const Family f = family_of(instances.front());
  for (std::size_t n = 0; n < instances.size(); ++n) {
    if (family_of(instances[n]) != f) {
      throw std::invalid_argument("dataset mixes instance families");
    }
    require_dim(simplex.d, dim_of(instances[n]), "dataset instance");
    require_dim(simplex.d, observed[n].y.size(), "dataset outcome");
  }
}

Dataset make_dataset(std::vector<Instance> instances, const Weights& w_star,
                     const SimplexSpec& simplex, const Oracle& oracle) {
  Dataset data;
  data.simplex = simplex;
  data.instances = std::move(instances);
  data.observed.reserve(data.instances.size());
  for (const auto& inst : data.instances) {
    data.observed.push_back(oracle(inst, w_star.view()));
  }
  data.validate();
  return data;
}

// --- serialization ----------------------------------------------------------

nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["family"] = family_name(family_of(inst));
  j["d"] = dim_of(inst);
  if (const auto* lp = std::get_if<LpInstance>(&inst)) {
    j["r"] = lp->r();
    j["B"] = lp->B();
  } else if (const auto* sch = std::get_if<SchedulingInstance>(&inst)) {
    j["r"] = sch->release();
    j["p"] = sch->processing();
  } else {
    j["points"] = std::get<PointSetInstance>(inst).points();
  }
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family")) {
    throw std::invalid_argument("instance JSON: missing \"family\"");
  }
  const Family f = parse_family(j.at("family").get<std::string>());
  auto check_d = [&](std::size_t got) {
    if (j.contains("d")) require_dim(j.at("d").get<std::size_t>(), got, "instance JSON");
  };
  try {
    switch (f) {
      case Family::Lp: {
        LpInstance lp(j.at("r").get<std::vector<double>>(),
                      j.at("B").get<std::vector<std::vector<double>>>());
        check_d(lp.d());
        return lp;
      }
      case Family::Scheduling: {
        SchedulingInstance s(j.at("r").get<std::vector<double>>(),
                             j.at("p").get<std::vector<double>>());
        check_d(s.d());
        return s;
      }
      case Family::PointSet: {
        PointSetInstance p(j.at("points").get<std::vector<std::vector<double>>>());
        check_d(p.d());
        return p;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("instance JSON: ") + e.what());
  }
  throw std::invalid_argument("instance JSON: unsupported family");
}

namespace {

void fnv_mix(std::uint64_t& h, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof bits);
  for (int b = 0; b < 8; ++b) {
    h ^= (bits >> (8 * b)) & 0xffu;
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

std::uint64_t instance_digest(const Instance& inst) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv_mix(h, static_cast<double>(family_of(inst)));
  if (const auto* lp = std::get_if<LpInstance>(&inst)) {
    for (double v : lp->r()) fnv_mix(h, v);
    for (const auto& row : lp->B()) for (double v : row) fnv_mix(h, v);
  } else if (const auto* sch = std::get_if<SchedulingInstance>(&inst)) {
    for (double v : sch->release()) fnv_mix(h, v);
    for (double v : sch->processing()) fnv_mix(h, v);
  } else {
    for (const auto& p : std::get<PointSetInstance>(inst).points()) {
      for (double v : p) fnv_mix(h, v);
    }
  }
  return h;
}

}  // namespace invopt
