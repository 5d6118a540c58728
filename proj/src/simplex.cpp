#include "invopt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace invopt {

void SimplexSpec::validate() const {
  if (d < 2) throw std::invalid_argument("simplex dimension must be >= 2");
  if (!(shift >= 0.0)) throw std::invalid_argument("simplex shift must be >= 0");
}

bool on_simplex(std::span<const double> v, const SimplexSpec& spec,
                double tol) {
  if (v.size() != spec.d) return false;
  double sum = 0.0;
  for (double x : v) {
    if (!(x >= spec.shift - tol)) return false;
    sum += x;
  }
  return std::abs(sum - spec.mass()) <= tol;
}

namespace {

// Projection onto the unit simplex {p >= 0, sum p = 1}.
std::vector<double> project_unit(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double prefix = 0.0;
  double lambda = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    prefix += u[j];
    const double candidate = (1.0 - prefix) / static_cast<double>(j + 1);
    if (u[j] + candidate > 0.0) lambda = candidate;
  }
  for (double& x : v) x = std::max(x + lambda, 0.0);
  return v;
}

}  // namespace

Weights project_onto_simplex(std::span<const double> v,
                             const SimplexSpec& spec) {
  spec.validate();
  if (v.size() != spec.d) {
    throw std::invalid_argument("projection: expected dimension " +
                                std::to_string(spec.d) + ", got " +
                                std::to_string(v.size()));
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("projection: non-finite coordinate");
    }
  }
  // Already feasible: every coordinate at or above the shift and the mass
  // correct up to rounding of a previous projection.
  const double mass_tol = 4.0 * static_cast<double>(spec.d) *
                          std::numeric_limits<double>::epsilon() * spec.mass();
  if (std::all_of(v.begin(), v.end(),
                  [&](double x) { return x >= spec.shift; }) &&
      std::abs(std::accumulate(v.begin(), v.end(), 0.0) - spec.mass()) <=
          mass_tol) {
    return Weights(std::vector<double>(v.begin(), v.end()));
  }

  std::vector<double> shifted(v.begin(), v.end());
  for (double& x : shifted) x -= spec.shift;
  std::vector<double> p = project_unit(std::move(shifted));
  for (double& x : p) x += spec.shift;
  return Weights(std::move(p));
}

Weights sample_uniform_simplex(const SimplexSpec& spec, Rng& rng) {
  spec.validate();
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> e(spec.d);
  double total = 0.0;
  do {
    total = 0.0;
    for (double& x : e) {
      x = exp1(rng);
      total += x;
    }
  } while (!(total > 0.0));
  for (double& x : e) x = x / total + spec.shift;
  return Weights(std::move(e));
}

Weights barycenter(const SimplexSpec& spec) {
  spec.validate();
  return Weights(std::vector<double>(
      spec.d, 1.0 / static_cast<double>(spec.d) + spec.shift));
}

std::uint64_t upa_level_size(std::size_t d, std::size_t level) {
  if (d == 0) return 0;
  // C(level + d - 1, d - 1) computed incrementally; exact while it fits.
  const std::uint64_t r = d - 1;
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    result = result * (level + i) / i;
  }
  return result;
}

namespace {

void compositions(std::size_t remaining, std::size_t pos,
                  std::vector<std::size_t>& parts,
                  const std::function<void(const std::vector<std::size_t>&)>& emit) {
  if (pos + 1 == parts.size()) {
    parts[pos] = remaining;
    emit(parts);
    return;
  }
  for (std::size_t k = remaining + 1; k-- > 0;) {
    parts[pos] = k;
    compositions(remaining - k, pos + 1, parts, emit);
  }
}

}  // namespace

std::vector<Weights> upa_grid(const SimplexSpec& spec, std::size_t level) {
  spec.validate();
  std::vector<Weights> grid;
  grid.reserve(upa_level_size(spec.d, level));
  const double denom = static_cast<double>(2 * level + spec.d);
  std::vector<std::size_t> parts(spec.d, 0);
  compositions(level, 0, parts, [&](const std::vector<std::size_t>& k) {
    std::vector<double> p(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
      p[i] = static_cast<double>(2 * k[i] + 1) / denom + spec.shift;
    }
    grid.emplace_back(std::move(p));
  });
  return grid;
}

}  // namespace invopt
