#pragma once

// Geometry of the (optionally shifted) probability simplex
//
//   Phi = { shift * 1 + p : p >= 0, sum(p) = 1 }
//
// which is the feasible set of weight vectors for every inverse solver in
// this library.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace invopt {

using Rng = std::mt19937_64;

struct SimplexSpec {
  std::size_t d = 2;
  double shift = 0.0;

  /// Total coordinate mass of every member, 1 + d * shift.
  double mass() const { return 1.0 + static_cast<double>(d) * shift; }
  void validate() const;
};

/// A point on the simplex. Thin value wrapper so weights are not confused
/// with outcome vectors or raw subgradient steps.
class Weights {
 public:
  Weights() = default;
  explicit Weights(std::vector<double> coords) : coords_(std::move(coords)) {}

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> view() const { return coords_; }
  const std::vector<double>& coords() const { return coords_; }

  friend bool operator==(const Weights&, const Weights&) = default;

 private:
  std::vector<double> coords_;
};

/// True when every coordinate is >= shift - tol and the mass is within tol.
bool on_simplex(std::span<const double> v, const SimplexSpec& spec,
                double tol = 1e-12);

/// Euclidean projection onto the simplex (sort-based, O(d log d)).
/// Inputs that already lie on the simplex are returned unchanged, so the
/// projection is exactly idempotent.
Weights project_onto_simplex(std::span<const double> v,
                             const SimplexSpec& spec);

/// Uniform draw (flat Dirichlet from normalized Exponential(1) variates).
Weights sample_uniform_simplex(const SimplexSpec& spec, Rng& rng);

/// The point (1/d, ..., 1/d) + shift.
Weights barycenter(const SimplexSpec& spec);

/// Number of compositions of `level` into d nonnegative parts,
/// C(level + d - 1, d - 1).
std::uint64_t upa_level_size(std::size_t d, std::size_t level);

/// All points ((2k_1+1)/(2k+d), ..., (2k_d+1)/(2k+d)) + shift with
/// sum(k_i) = level. Enumerated with k_1 descending, then k_2, and so on.
std::vector<Weights> upa_grid(const SimplexSpec& spec, std::size_t level);

}  // namespace invopt
