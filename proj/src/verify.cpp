#include "invopt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "invopt/harness.hpp"
#include "invopt/losses.hpp"
#include "invopt/solvers.hpp"

namespace invopt {

void VerifyConfig::validate() const {
  if (d < 2) throw std::invalid_argument("verify: d must be >= 2");
  if (max_N < 1) throw std::invalid_argument("verify: max_N must be >= 1");
  switch (family) {
    case Family::Lp:
      if (d > 6 || J > 12) {
        throw std::invalid_argument("verify: LP family needs d <= 6 and J <= 12");
      }
      break;
    case Family::Scheduling:
      if (d > 6) throw std::invalid_argument("verify: scheduling family needs d <= 6");
      break;
    case Family::PointSet:
      if (points < 1) throw std::invalid_argument("verify: points must be >= 1");
      break;
  }
}

bool VerifyReport::passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.passed; });
}

const PropertyResult& VerifyReport::get(const std::string& name) const {
  for (const auto& p : properties) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("no property named '" + name + "'");
}

DrawnDataset draw_verify_dataset(const VerifyConfig& cfg, Rng& rng) {
  const SimplexSpec spec{
      cfg.d, cfg.family == Family::Scheduling ? kSchedulingShift : 0.0};
  std::uniform_int_distribution<std::size_t> count(1, cfg.max_N);
  const std::size_t N = count(rng);
  std::vector<Instance> instances;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t n = 0; n < N; ++n) {
    switch (cfg.family) {
      case Family::Lp:
        instances.emplace_back(gen_lp_instance(cfg.d, cfg.J, cfg.r_max, rng));
        break;
      case Family::Scheduling:
        instances.emplace_back(gen_scheduling_instance(cfg.d, rng));
        break;
      case Family::PointSet: {
        std::vector<std::vector<double>> pts(cfg.points, std::vector<double>(cfg.d));
        for (auto& p : pts) {
          for (double& v : p) v = unit(rng);
        }
        instances.emplace_back(PointSetInstance(std::move(pts)));
        break;
      }
    }
  }
  Weights w_star = sample_uniform_simplex(spec, rng);
  Dataset data = make_dataset(std::move(instances), w_star, spec);
  return DrawnDataset{std::move(data), std::move(w_star)};
}

namespace {

bool is_zero(const std::vector<double>& g) {
  return std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; });
}

void record(PropertyResult& p, double slack) {
  ++p.cases;
  if (std::isnan(p.worst_slack) || slack < p.worst_slack) p.worst_slack = slack;
  if (slack < 0.0) ++p.violations;
}

PropertyResult fresh(const std::string& name) {
  PropertyResult p;
  p.name = name;
  p.worst_slack = std::numeric_limits<double>::quiet_NaN();
  return p;
}

}  // namespace

VerifyReport run_verify(const VerifyConfig& cfg) {
  cfg.validate();
  VerifyReport report;
  Rng rng(trial_seed(cfg.seed, 0));

  // Almost every w* admits a strict unique argmax.
  PropertyResult psi = fresh("psi_rate");
  {
    std::size_t members = 0;
    for (std::size_t i = 0; i < cfg.psi_draws; ++i) {
      const DrawnDataset dd = draw_verify_dataset(cfg, rng);
      const PsiCertificate c = psi_membership(dd.w_star, dd.data);
      if (c.member) ++members;
    }
    psi.cases = cfg.psi_draws;
    const double rate =
        cfg.psi_draws ? static_cast<double>(members) / cfg.psi_draws : 1.0;
    psi.worst_slack = rate - 0.99;
    psi.passed = rate >= 0.99;
    psi.violations = cfg.psi_draws - members;
    psi.detail = "member rate " + std::to_string(rate);
  }

  PropertyResult l45 = fresh("lemma45");
  PropertyResult l46 = fresh("lemma46");
  PropertyResult descent = fresh("descent");
  PropertyResult bound = fresh("finite_bound");
  std::size_t bound_skipped = 0;
  double smallest_gamma = std::numeric_limits<double>::infinity();

  const std::size_t max_draws = cfg.instances * 50 + 100;
  while (report.datasets_certified < cfg.instances &&
         report.datasets_drawn < max_draws) {
    DrawnDataset dd = draw_verify_dataset(cfg, rng);
    ++report.datasets_drawn;
    const PsiCertificate cert = psi_membership(dd.w_star, dd.data);
    if (!cert.member || !cert.consistent) continue;
    ++report.datasets_certified;
    const Dataset& data = dd.data;
    const Weights& w_star = dd.w_star;
    const SimplexSpec& spec = data.simplex;

    // g = 0 <=> PLS = 0. Half the probes are uniform, half cluster near w*
    // so both sides of the equivalence are exercised.
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t s = 0; s < cfg.lemma45_samples; ++s) {
      Weights w;
      if (s % 2 == 0) {
        w = sample_uniform_simplex(spec, rng);
      } else {
        const double radius = std::min(0.5, 4.0 * cert.epsilon) *
                              std::pow(0.5, static_cast<double>(s % 8));
        std::vector<double> v = w_star.coords();
        for (double& x : v) x += radius * noise(rng);
        w = project_onto_simplex(v, spec);
      }
      const Evaluation ev = evaluate(w, data);
      const bool g_zero = is_zero(ev.subgradient);
      const bool pls_zero = ev.losses.pls == 0.0;
      record(l45, g_zero == pls_zero ? 0.0 : -1.0);
    }

    const GammaConstants gc = gamma_constants(w_star, data);
    smallest_gamma = std::min(smallest_gamma, gc.gamma);
    const double ceiling = -4.0 * gc.G * gc.gamma;
    for (std::size_t s = 0; s < cfg.lemma46_samples; ++s) {
      const Weights w = sample_uniform_simplex(spec, rng);
      const Evaluation ev = evaluate(w, data);
      if (is_zero(ev.subgradient)) continue;
      const double score = dot(w_star.view(), ev.subgradient);
      record(l46, ceiling + 1e-9 - score);
    }

    if (std::isinf(gc.gamma)) {
      // No realizable wrong tuple: every iterate already has g = 0.
      const SolverResult run = psgd(data, StepPolicy::SqrtDecay, 1, barycenter(spec));
      record(bound, run.trace.rows.back().pls == 0.0 ? 0.0 : -1.0);
      continue;
    }

    const double B = finite_iteration_bound(gc.gamma);
    const bool bound_applies = B <= cfg.bound_cap;
    const std::size_t K =
        bound_applies ? static_cast<std::size_t>(std::ceil(B)) : cfg.descent_iters;
    const SolverResult run =
        psgd(data, StepPolicy::SqrtDecay, std::max<std::size_t>(K, 1), barycenter(spec));
    const auto& rows = run.trace.rows;

    // Every row except a converged last one was followed by a step with g != 0.
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double j = static_cast<double>(rows[i].k);
      const double before = squared_distance(rows[i].phi.view(), w_star.view());
      const double after = squared_distance(rows[i + 1].phi.view(), w_star.view());
      const double rhs = before - 0.5 * gc.gamma / std::sqrt(j) + 1.0 / j;
      record(descent, rhs + 1e-9 - after);
    }

    if (bound_applies) {
      record(bound, rows.back().pls == 0.0 ? 0.0 : -1.0);
    } else {
      ++bound_skipped;
    }
  }

  l45.passed = l45.violations == 0;
  l46.passed = l46.violations == 0;
  descent.passed = descent.violations == 0;
  bound.passed = bound.violations == 0;
  bound.detail = "applicable runs " + std::to_string(bound.cases) +
                 ", skipped (bound > cap) " + std::to_string(bound_skipped) +
                 ", smallest gamma " + std::to_string(smallest_gamma);
  l46.detail = "smallest gamma " + std::to_string(smallest_gamma);

  PropertyResult coverage = fresh("coverage");
  coverage.cases = report.datasets_certified;
  coverage.worst_slack = static_cast<double>(report.datasets_certified) -
                         static_cast<double>(cfg.instances);
  coverage.passed = report.datasets_certified >= cfg.instances;
  coverage.violations = coverage.passed ? 0 : 1;
  coverage.detail = "certified " + std::to_string(report.datasets_certified) +
                    " of " + std::to_string(report.datasets_drawn) + " drawn";

  report.properties = {psi, coverage, l45, l46, descent, bound};
  return report;
}

void print_report(const VerifyReport& report, std::ostream& os) {
  for (const auto& p : report.properties) {
    os << (p.passed ? "PASS " : "FAIL ") << p.name << "  cases=" << p.cases
       << "  violations=" << p.violations << "  worst_slack=" << p.worst_slack;
    if (!p.detail.empty()) os << "  (" << p.detail << ")";
    os << '\n';
  }
}

}  // namespace invopt
