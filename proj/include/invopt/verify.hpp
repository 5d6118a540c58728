#pragma once

// Empirical checks of the structural results behind the finite-iteration
// guarantee of PSGD2, run on freshly generated small instances:
//
//   psi_rate       strict unique argmax holds for almost every w*
//   lemma45        g(w) = 0  <=>  PLS(w) = 0            (w* in Psi)
//   lemma46        w*^T g(w) <= -4 G gamma  when g(w) != 0
//   descent        ||w_{j+1}-w*||^2 <= ||w_j-w*||^2 - (gamma/2) j^{-1/2} + 1/j
//   finite_bound   PLS = 0 once k reaches the gamma-dependent bound

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "invopt/forward.hpp"

namespace invopt {

struct VerifyConfig {
  Family family = Family::Lp;
  std::size_t d = 3;
  std::uint64_t seed = 7;
  std::size_t instances = 50;          // Psi-certified datasets to test
  std::size_t max_N = 2;               // dataset size drawn from 1..max_N
  std::size_t J = 8;                   // LP rows
  double r_max = 10.0;
  std::size_t points = 6;              // point-set family: points per instance
  std::size_t psi_draws = 1000;
  std::size_t lemma45_samples = 200;
  std::size_t lemma46_samples = 10000;
  double bound_cap = 1e5;              // largest finite bound actually run
  std::size_t descent_iters = 2000;

  void validate() const;
};

struct PropertyResult {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;       // checks performed
  std::size_t violations = 0;
  /// Smallest observed slack (>= 0 means satisfied); NaN when not measured.
  double worst_slack = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<PropertyResult> properties;
  std::size_t datasets_drawn = 0;
  std::size_t datasets_certified = 0;

  bool passed() const;
  const PropertyResult& get(const std::string& name) const;
};

/// Draws a random dataset of the configured family with true weights
/// w_star (also drawn); exposed for tests.
struct DrawnDataset {
  Dataset data;
  Weights w_star;
};
DrawnDataset draw_verify_dataset(const VerifyConfig& cfg, Rng& rng);

VerifyReport run_verify(const VerifyConfig& cfg);

void print_report(const VerifyReport& report, std::ostream& os);

}  // namespace invopt
