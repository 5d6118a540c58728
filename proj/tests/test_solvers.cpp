#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "invopt/harness.hpp"
#include "invopt/solvers.hpp"

using namespace invopt;

namespace {

Dataset two_point_data() {
  const PointSetInstance ps({{1.0, 0.0}, {0.0, 1.0}});
  Dataset data;
  data.simplex = SimplexSpec{2, 0.0};
  data.instances = {ps, ps};
  data.observed = {Outcome{{1.0, 0.0}}, Outcome{{0.0, 1.0}}};
  return data;
}

Dataset random_lp_data(std::size_t d, std::size_t J, Rng& rng, Weights* w_star_out = nullptr) {
  const SimplexSpec spec{d, 0.0};
  const Weights w_star = sample_uniform_simplex(spec, rng);
  if (w_star_out) *w_star_out = w_star;
  return make_dataset({gen_lp_instance(d, J, 10.0, rng)}, w_star, spec);
}

// x1 <= 1 and x1 + x2 <= 1.5. On the simplex the optimal face is the
// vertex (1, 0.5) for w1 > 1/2, the vertex (0, 1.5) for w1 < 1/2 and the
// segment between them at w1 = 1/2.
LpInstance kinked() {
  return LpInstance({1.0, 1.0}, {{1.0, 0.0}, {2.0 / 3.0, 2.0 / 3.0}});
}

double segment_distance2(const std::vector<double>& p, const std::vector<double>& a,
                         const std::vector<double>& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  if (dx == 0.0 && dy == 0.0) return squared_distance(p, a);
  double t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy);
  t = std::clamp(t, 0.0, 1.0);
  const double qx = a[0] + t * dx - p[0], qy = a[1] + t * dy - p[1];
  return qx * qx + qy * qy;
}

double kinked_exact(const Weights& w, const std::vector<double>& target) {
  const std::vector<double> v1{1.0, 0.5}, v2{0.0, 1.5};
  if (w[0] > 0.5) return segment_distance2(target, v1, v1);
  if (w[0] < 0.5) return segment_distance2(target, v2, v2);
  return segment_distance2(target, v1, v2);
}

}  // namespace

TEST_CASE("policy names") {
  CHECK(policy_name(StepPolicy::SqrtDecay) == "psgd2");
  CHECK(policy_name(StepPolicy::Polyak) == "psgdp");
}

TEST_CASE("psgd stops at once from the true weights") {
  Rng rng(61);
  Weights w_star;
  const Dataset data = random_lp_data(4, 20, rng, &w_star);
  for (StepPolicy p : {StepPolicy::SqrtDecay, StepPolicy::Polyak}) {
    const SolverResult r = psgd(data, p, 100, w_star, &w_star);
    REQUIRE(r.trace.rows.size() == 1);
    CHECK(r.trace.converged);
    CHECK(r.trace.rows[0].k == 1);
    CHECK(r.trace.rows[0].sl == 0.0);
    CHECK(r.trace.rows[0].pls == 0.0);
    CHECK(r.phi == w_star);
  }
}

TEST_CASE("psgd iterates stay on the simplex and best index is the SL argmin") {
  Rng rng(67);
  Weights w_star;
  const Dataset data = random_lp_data(5, 40, rng, &w_star);
  const SolverResult r = psgd(data, StepPolicy::SqrtDecay, 200, barycenter(data.simplex), &w_star);
  CHECK(r.method == "psgd2");
  double best = 1e300;
  for (std::size_t i = 0; i < r.trace.rows.size(); ++i) {
    const auto& row = r.trace.rows[i];
    CHECK(row.k == i + 1);
    CHECK(on_simplex(row.phi.view(), data.simplex, 1e-12));
    CHECK(row.plw.has_value());
    best = std::min(best, row.sl);
  }
  CHECK(r.trace.rows[r.trace.best_index].sl == best);
  CHECK(r.phi == r.trace.rows[r.trace.best_index].phi);
}

TEST_CASE("psgd2 reaches zero prediction loss on small LPs") {
  Rng rng(71);
  for (int t = 0; t < 5; ++t) {
    Weights w_star;
    const Dataset data = random_lp_data(4, 100, rng, &w_star);
    const SolverResult r = psgd(data, StepPolicy::SqrtDecay, 500, barycenter(data.simplex));
    const bool hit = std::any_of(r.trace.rows.begin(), r.trace.rows.end(),
                                 [](const TraceRow& row) { return row.pls == 0.0; });
    CHECK(hit);
  }
}

TEST_CASE("psgd2 on the two-point instance") {
  const Dataset data = two_point_data();
  const SolverResult r = psgd(data, StepPolicy::SqrtDecay, 1000, Weights({0.9, 0.1}));
  for (const auto& row : r.trace.rows) {
    CHECK(std::abs(2.0 * row.sl - std::abs(row.phi[0] - row.phi[1])) <= 1e-12);
  }
  CHECK(r.trace.rows.back().sl < 0.05);
}

TEST_CASE("uniform grid search") {
  const Dataset data = two_point_data();
  const SolverResult one = upa_solve(data, 1);
  CHECK(one.phi.coords() == std::vector<double>{0.5, 0.5});
  REQUIRE(one.trace.rows.size() == 1);
  CHECK(one.trace.checkpoints);

  const SolverResult r = upa_solve(data, 50);
  CHECK(r.method == "upa");
  const double returned = prediction_loss_solution(r.phi, data);
  for (const auto& level : upa_levels(data.simplex, 50)) {
    for (const auto& w : level) CHECK(returned <= prediction_loss_solution(w, data));
  }
  std::size_t prev = 0;
  for (const auto& row : r.trace.rows) {
    CHECK(row.k > prev);
    CHECK(row.k <= 50);
    prev = row.k;
  }
}

TEST_CASE("grid search finds weights on the grid") {
  const LpInstance tri({1.0, 1.0}, {{1.0, 1.0}});
  const Weights w_star({0.75, 0.25});
  const Dataset data = make_dataset({tri}, w_star, SimplexSpec{2, 0.0});
  const SolverResult r = upa_solve(data, 2);
  CHECK(prediction_loss_solution(r.phi, data) == 0.0);
}

TEST_CASE("random search") {
  const Dataset data = two_point_data();
  Rng rng(73);
  const SolverResult one = rpa_solve(data, 1, rng);
  REQUIRE(one.trace.rows.size() == 1);
  CHECK(on_simplex(one.phi.view(), data.simplex));

  Rng a(79), b(79);
  const SolverResult r = rpa_solve(data, 100, a);
  CHECK(r.trace.rows.size() == 100);
  // Replay the draws: the returned point beats every one of them.
  const double returned = prediction_loss_solution(r.phi, data);
  double prev = 1e300;
  for (int k = 0; k < 100; ++k) {
    const Weights w = sample_uniform_simplex(data.simplex, b);
    CHECK(returned <= prediction_loss_solution(w, data));
    CHECK(r.trace.rows[k].pls <= prev);
    prev = r.trace.rows[k].pls;
  }
}

TEST_CASE("optimal face linear minimization") {
  const LpInstance tri({1.0, 1.0}, {{1.0, 1.0}});
  const Weights e1({1.0, 0.0});
  for (auto dir : {std::vector<double>{0.0, 1.0}, std::vector<double>{-1.0, 3.0}}) {
    const auto v = optimal_face_lmo(tri, e1, dir);
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(0.0));
  }
  const LpInstance square({1.0, 1.0}, {{1.0, 0.0}, {0.0, 1.0}});
  const std::vector<double> up{0.0, 1.0}, down{0.0, -1.0};
  const auto lo = optimal_face_lmo(square, e1, up);
  CHECK(lo[0] == doctest::Approx(1.0));
  CHECK(lo[1] == doctest::Approx(0.0));
  const auto hi = optimal_face_lmo(square, e1, down);
  CHECK(hi[0] == doctest::Approx(1.0));
  CHECK(hi[1] == doctest::Approx(1.0));
}

TEST_CASE("frank-wolfe projection") {
  const LpInstance square({1.0, 1.0}, {{1.0, 0.0}, {0.0, 1.0}});
  const OptimalFace edge(square, Weights({1.0, 0.0}));
  const LinearMinimizer lmo = [&](std::span<const double> d) { return edge.minimize(d); };

  const std::vector<double> origin{0.0, 0.0};
  const auto r = frank_wolfe_min_distance(origin, lmo, 1000, 1e-10);
  CHECK(r.point[0] == doctest::Approx(1.0));
  CHECK(std::abs(r.point[1]) <= 1e-9);
  CHECK(r.value == doctest::Approx(1.0));

  const std::vector<double> inside{1.0, 0.3};
  const auto in = frank_wolfe_min_distance(inside, lmo, 10000, 1e-10);
  CHECK(in.value <= 1e-10);

  const LinearMinimizer single = [](std::span<const double>) {
    return std::vector<double>{2.0, 3.0};
  };
  const auto s = frank_wolfe_min_distance(origin, single, 100, 1e-12);
  CHECK(s.point == std::vector<double>{2.0, 3.0});
  CHECK(s.iterations <= 1);
  CHECK(s.value == doctest::Approx(13.0));
}

TEST_CASE("chan inner value matches closed-form projections") {
  const ChanOptions opts{10000, 1e-8};
  for (const auto& target : {std::vector<double>{0.0, 0.0}, std::vector<double>{0.5, 1.0},
                             std::vector<double>{2.0, 0.0}, std::vector<double>{0.3, 2.0}}) {
    Dataset data;
    data.simplex = SimplexSpec{2, 0.0};
    data.instances = {kinked()};
    data.observed = {Outcome{target}};
    double best = 1e300;
    const auto levels = upa_levels(data.simplex, 6);
    for (const auto& level : levels) {
      for (const auto& w : level) {
        const double exact = kinked_exact(w, target);
        CHECK(std::abs(chan_objective(data, w, opts) - exact) <= 10.0 * opts.fw_tol);
        best = std::min(best, exact);
      }
    }
    const SolverResult r = chan_solve(data, levels, opts);
    CHECK(r.method == "chan");
    CHECK(std::abs(chan_objective(data, r.phi, opts) - best) <= 10.0 * opts.fw_tol);
    REQUIRE(r.trace.rows.back().objective.has_value());
  }
}

TEST_CASE("chan recovers grid weights and handles a single point") {
  const LpInstance tri({1.0, 1.0}, {{1.0, 1.0}});
  const Weights w_star({0.75, 0.25});
  const Dataset data = make_dataset({tri}, w_star, SimplexSpec{2, 0.0});
  const auto levels = upa_levels(data.simplex, 2);
  CHECK(chan_objective(data, w_star) <= 1e-12);
  const SolverResult r = chan_solve(data, levels);
  CHECK(chan_objective(data, r.phi) <= 1e-12);

  const std::vector<std::vector<Weights>> single{{Weights({0.3, 0.7})}};
  CHECK(chan_solve(data, single).phi == Weights({0.3, 0.7}));
}

TEST_CASE("chan rejects non-LP data") {
  const Dataset data = two_point_data();
  CHECK_THROWS_WITH_AS(chan_solve(data, upa_levels(data.simplex, 3)),
                       "CHAN requires LP family", std::invalid_argument);
}
