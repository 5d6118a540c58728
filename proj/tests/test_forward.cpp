#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "invopt/forward.hpp"
#include "invopt/harness.hpp"

using namespace invopt;

namespace {

LpInstance unit_triangle() { return LpInstance({1.0, 1.0}, {{1.0, 1.0}}); }
LpInstance unit_square() { return LpInstance({1.0, 1.0}, {{1.0, 0.0}, {0.0, 1.0}}); }
SchedulingInstance two_jobs() { return SchedulingInstance({0.0, 0.0}, {2.0, 1.0}); }

std::vector<double> vec(std::initializer_list<double> v) { return v; }

}  // namespace

TEST_CASE("lp argmax on hand-built instances") {
  const auto w10 = vec({1.0, 0.0});
  CHECK(lp_argmax(unit_triangle(), w10).y == vec({1.0, 0.0}));
  const auto half = vec({0.5, 0.5});
  CHECK(lp_argmax(unit_square(), half).y == vec({1.0, 1.0}));
}

TEST_CASE("lp vertex enumeration") {
  const auto tri = lp_vertex_enumeration(unit_triangle());
  REQUIRE(tri.size() == 3);
  CHECK(tri[0].y == vec({0.0, 0.0}));
  CHECK(tri[1].y == vec({0.0, 1.0}));
  CHECK(tri[2].y == vec({1.0, 0.0}));
  CHECK(lp_vertex_enumeration(unit_square()).size() == 4);
  CHECK(outcome_set(Instance{unit_triangle()}).size() == 3);

  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    const LpInstance inst = gen_lp_instance(3, 4, 10.0, rng);
    for (const auto& v : lp_vertex_enumeration(inst)) {
      for (double x : v.y) CHECK(x >= -1e-9);
      for (std::size_t j = 0; j < inst.num_rows(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < 3; ++i) s += inst.coefficient(j, i) * v.y[i];
        CHECK(s <= 1.0 + 1e-9);
      }
    }
  }

  const LpInstance big({1, 1, 1, 1, 1, 1, 1}, {{1, 1, 1, 1, 1, 1, 1}});
  CHECK_THROWS_AS(lp_vertex_enumeration(big), SizeLimitError);
}

TEST_CASE("lp argmax agrees with the best vertex") {
  Rng rng(23);
  const SimplexSpec spec{3, 0.0};
  for (int t = 0; t < 50; ++t) {
    const LpInstance inst = gen_lp_instance(3, 5, 10.0, rng);
    const Weights w = sample_uniform_simplex(spec, rng);
    double best = -1.0;
    for (const auto& v : lp_vertex_enumeration(inst)) best = std::max(best, dot(w.view(), v.y));
    CHECK(std::abs(dot(w.view(), lp_argmax(inst, w.view()).y) - best) <= 1e-9);
  }
}

TEST_CASE("lp argmax is canonical on a vertex") {
  Rng rng(29);
  const LpInstance inst = gen_lp_instance(4, 30, 10.0, rng);
  const SimplexSpec spec{4, 0.0};
  const Weights w = sample_uniform_simplex(spec, rng);
  const Outcome a = lp_argmax(inst, w.view());
  // Small perturbations that stay in the same normal cone give the same bits.
  std::vector<double> v = w.coords();
  v[0] += 1e-7;
  v[1] -= 1e-7;
  CHECK(lp_argmax(inst, v).y == a.y);
}

TEST_CASE("lp instance validation") {
  CHECK_THROWS_AS(LpInstance({1.0, 1.0}, {{1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(LpInstance({-1.0, 1.0}, {{1.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(LpInstance({1.0, 1.0}, {{-1.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("schedule evaluation") {
  const auto inst = two_jobs();
  const std::vector<std::size_t> fwd{0, 1}, rev{1, 0};
  CHECK(schedule_eval_order(inst, fwd).completion == vec({2.0, 3.0}));
  CHECK(schedule_eval_order(inst, rev).completion == vec({3.0, 1.0}));

  const SchedulingInstance one({0.5}, {1.0});
  const std::vector<std::size_t> only{0};
  const Schedule s = schedule_eval_order(one, only);
  CHECK(s.start == vec({1.0}));
  CHECK(s.completion == vec({2.0}));

  const std::vector<std::size_t> bad{0, 0};
  CHECK_THROWS_AS(schedule_eval_order(inst, bad), std::invalid_argument);
}

TEST_CASE("schedule argmax") {
  const auto inst = two_jobs();
  CHECK(schedule_argmax(inst, vec({0.5, 0.5})).y == vec({-3.0, -1.0}));
  const double delta = 1e-3;
  CHECK(schedule_argmax(inst, vec({1.0 - delta, delta})).y == vec({-2.0, -3.0}));

  const SchedulingInstance one({0.5}, {1.0});
  CHECK(schedule_argmax(one, vec({1.0})).y == vec({-2.0}));

  const SchedulingInstance big(std::vector<double>(11, 0.0), std::vector<double>(11, 1.0));
  CHECK_THROWS_AS(schedule_argmax(big, std::vector<double>(11, 1.0 / 11)), SizeLimitError);
}

TEST_CASE("scheduling outcome set") {
  const auto ys = outcome_set(Instance{two_jobs()});
  REQUIRE(ys.size() == 2);
  CHECK(ys[0].y == vec({-3.0, -1.0}));
  CHECK(ys[1].y == vec({-2.0, -3.0}));

  Rng rng(31);
  const SchedulingInstance three = gen_scheduling_instance(3, rng);
  const auto set3 = outcome_set(Instance{three});
  CHECK(set3.size() <= 6);
  for (const auto& o : set3) {
    std::vector<std::size_t> order{0, 1, 2};
    bool found = false;
    do {
      auto c = schedule_eval_order(three, order).completion;
      for (double& x : c) x = -x;
      found = found || c == o.y;
    } while (std::next_permutation(order.begin(), order.end()));
    CHECK(found);
  }
}

TEST_CASE("schedule argmax minimizes weighted completion") {
  Rng rng(37);
  for (int t = 0; t < 30; ++t) {
    const SchedulingInstance inst = gen_scheduling_instance(4, rng);
    const Weights w = sample_uniform_simplex(SimplexSpec{4, 1e-3}, rng);
    const Outcome a = schedule_argmax(inst, w.view());
    double best = -1e300;
    for (const auto& o : outcome_set(Instance{inst})) best = std::max(best, dot(w.view(), o.y));
    CHECK(dot(w.view(), a.y) == best);
  }
}

TEST_CASE("point sets break ties lexicographically") {
  const PointSetInstance ps({{1.0, 0.0}, {0.0, 1.0}});
  CHECK(point_set_argmax(ps, vec({0.5, 0.5})).y == vec({0.0, 1.0}));
  CHECK(point_set_argmax(ps, vec({0.7, 0.3})).y == vec({1.0, 0.0}));
}

TEST_CASE("dataset construction reproduces observations") {
  Rng rng(41);
  const SimplexSpec spec{4, 0.0};
  std::vector<Instance> insts;
  for (int n = 0; n < 3; ++n) insts.emplace_back(gen_lp_instance(4, 20, 10.0, rng));
  const Weights w_star = sample_uniform_simplex(spec, rng);
  const Dataset data = make_dataset(insts, w_star, spec);
  CHECK(data.size() == 3);
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(forward_argmax(data.instances[n], w_star.view()) == data.observed[n]);
  }
}

TEST_CASE("instance json round trip") {
  Rng rng(43);
  const Instance lp = gen_lp_instance(3, 6, 10.0, rng);
  const Instance sc = gen_scheduling_instance(4, rng);
  const Instance ps = PointSetInstance({{1.0, 2.0}, {3.0, 4.0}});
  for (const Instance& inst : {lp, sc, ps}) {
    const auto j = instance_to_json(inst);
    const Instance back = instance_from_json(nlohmann::json::parse(j.dump()));
    CHECK(family_of(back) == family_of(inst));
    CHECK(instance_digest(back) == instance_digest(inst));
  }
  CHECK_THROWS_AS(instance_from_json(nlohmann::json::object()), std::invalid_argument);
  CHECK_THROWS_AS(instance_from_json(nlohmann::json{{"family", "qp"}}), std::invalid_argument);
}

TEST_CASE("family names") {
  for (Family f : {Family::Lp, Family::Scheduling, Family::PointSet}) {
    CHECK(parse_family(family_name(f)) == f);
  }
  CHECK_THROWS_AS(parse_family("milp"), std::invalid_argument);
}
