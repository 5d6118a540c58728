#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "invopt/verify.hpp"

using namespace invopt;

namespace {

VerifyConfig quick(Family f, std::size_t d) {
  VerifyConfig cfg;
  cfg.family = f;
  cfg.d = d;
  cfg.instances = 10;
  cfg.psi_draws = 100;
  cfg.lemma45_samples = 40;
  cfg.lemma46_samples = 500;
  cfg.descent_iters = 300;
  return cfg;
}

}  // namespace

TEST_CASE("every property passes on small suites") {
  for (const auto& cfg : {quick(Family::Lp, 2), quick(Family::Lp, 3),
                          quick(Family::Scheduling, 3), quick(Family::PointSet, 3)}) {
    const VerifyReport r = run_verify(cfg);
    CHECK(r.passed());
    CHECK(r.datasets_certified == cfg.instances);
    CHECK(r.get("lemma45").cases == cfg.instances * cfg.lemma45_samples);
    CHECK(r.get("lemma46").violations == 0);
    CHECK(r.get("descent").violations == 0);
  }
}

TEST_CASE("same seed gives the same report") {
  const VerifyConfig cfg = quick(Family::Scheduling, 2);
  std::ostringstream a, b;
  print_report(run_verify(cfg), a);
  print_report(run_verify(cfg), b);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("PASS lemma46") != std::string::npos);
}

TEST_CASE("drawn datasets satisfy the observation model") {
  const VerifyConfig cfg = quick(Family::Lp, 3);
  Rng rng(97);
  for (int t = 0; t < 10; ++t) {
    const DrawnDataset dd = draw_verify_dataset(cfg, rng);
    CHECK(dd.data.size() >= 1);
    CHECK(dd.data.size() <= cfg.max_N);
    for (std::size_t n = 0; n < dd.data.size(); ++n) {
      CHECK(forward_argmax(dd.data.instances[n], dd.w_star.view()) == dd.data.observed[n]);
    }
  }
}

TEST_CASE("size guards") {
  VerifyConfig cfg = quick(Family::Lp, 7);
  CHECK_THROWS_AS(run_verify(cfg), std::invalid_argument);
  cfg.d = 3;
  cfg.J = 13;
  CHECK_THROWS_AS(run_verify(cfg), std::invalid_argument);
  cfg = quick(Family::Scheduling, 7);
  CHECK_THROWS_AS(run_verify(cfg), std::invalid_argument);
  CHECK_THROWS_AS(VerifyReport{}.get("nope"), std::out_of_range);
}
