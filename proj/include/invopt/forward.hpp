#pragma once

// Forward problems a(w, s) = argmax_{y in Y(s)} w^T y and the brute-force
// outcome-set enumerators used to check them.
//
// Three instance families share one interface:
//   * LpInstance        max w^T x  s.t.  sum_i r_i^2 B_ji x_i <= 1, x >= 0
//   * SchedulingInstance single machine, release dates, integer start times;
//                        outcome is the negated completion-time vector
//   * PointSetInstance   an explicit finite outcome set

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "invopt/simplex.hpp"
#include "json.hpp"

namespace invopt {

class SizeLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Family { Lp, Scheduling, PointSet };

std::string family_name(Family f);
Family parse_family(const std::string& name);

class LpInstance {
 public:
  /// r: positive axis scales (size d); B: J rows of nonnegative directions.
  /// Every coordinate must be bounded by at least one row.
  LpInstance(std::vector<double> r, std::vector<std::vector<double>> B);

  std::size_t d() const { return r_.size(); }
  std::size_t num_rows() const { return B_.size(); }
  const std::vector<double>& r() const { return r_; }
  const std::vector<std::vector<double>>& B() const { return B_; }
  /// Constraint coefficient r_i^2 B_ji.
  double coefficient(std::size_t j, std::size_t i) const {
    return A_[j * d() + i];
  }
  /// max_j |sum_i r_i^2 B_ji^2 - 1|; zero for generator-normalized rows.
  double normalization_error() const;

 private:
  std::vector<double> r_;
  std::vector<std::vector<double>> B_;
  std::vector<double> A_;
};

class SchedulingInstance {
 public:
  SchedulingInstance(std::vector<double> release, std::vector<double> processing);

  std::size_t d() const { return release_.size(); }
  const std::vector<double>& release() const { return release_; }
  const std::vector<double>& processing() const { return processing_; }
  /// Big-M constant max_j r_j + sum_j p_j.
  double big_m() const { return big_m_; }

 private:
  std::vector<double> release_;
  std::vector<double> processing_;
  double big_m_ = 0.0;
};

class PointSetInstance {
 public:
  explicit PointSetInstance(std::vector<std::vector<double>> points);

  std::size_t d() const { return points_.front().size(); }
  const std::vector<std::vector<double>>& points() const { return points_; }

 private:
  std::vector<std::vector<double>> points_;
};

using Instance = std::variant<LpInstance, SchedulingInstance, PointSetInstance>;

Family family_of(const Instance& inst);
std::size_t dim_of(const Instance& inst);

struct Outcome {
  std::vector<double> y;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Pluggable forward solver. The default dispatches on the instance family.
using Oracle = std::function<Outcome(const Instance&, std::span<const double>)>;

Outcome forward_argmax(const Instance& inst, std::span<const double> w);
Oracle default_oracle();

// --- LP family --------------------------------------------------------------

/// Vertex maximizing w^T x. The simplex result is re-solved from its sorted
/// set of active hyperplanes, so every weight vector landing on the same
/// (nondegenerate) vertex yields bit-identical coordinates.
Outcome lp_argmax(const LpInstance& inst, std::span<const double> w);

/// Every vertex of the feasible polytope; requires d <= 6 and J <= 12.
std::vector<Outcome> lp_vertex_enumeration(const LpInstance& inst);

// --- scheduling family ------------------------------------------------------

struct Schedule {
  std::vector<double> start;       // integer-valued start times b_j
  std::vector<double> completion;  // C_j = b_j + p_j
};

/// Greedy minimal integer start times along `order` (a permutation of
/// 0..d-1). Jobs are indexed from zero.
Schedule schedule_eval_order(const SchedulingInstance& inst,
                             std::span<const std::size_t> order);

/// Minimizes sum_j w_j C_j over all d! orders (d <= 10) and returns the
/// negated completion vector. Exact ties resolve to the lexicographically
/// smallest outcome.
Outcome schedule_argmax(const SchedulingInstance& inst,
                        std::span<const double> w);

// --- point-set family -------------------------------------------------------

/// argmax over the listed points, lexicographically smallest among ties.
Outcome point_set_argmax(const PointSetInstance& inst,
                         std::span<const double> w);

// --- shared -----------------------------------------------------------------

/// Y(s): all distinct outcomes the oracle can return, in lexicographic order.
std::vector<Outcome> outcome_set(const Instance& inst);

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Training data: instances paired with observed optimal outcomes, plus the
/// simplex the unknown weights live on.
struct Dataset {
  SimplexSpec simplex;
  std::vector<Instance> instances;
  std::vector<Outcome> observed;

  std::size_t size() const { return instances.size(); }
  Family family() const { return family_of(instances.front()); }
  void validate() const;
};

/// Builds a dataset whose observations are a(w_star, s) for every instance.
Dataset make_dataset(std::vector<Instance> instances, const Weights& w_star,
                     const SimplexSpec& simplex,
                     const Oracle& oracle = default_oracle());

nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

/// FNV-1a over the instance's numeric content.
std::uint64_t instance_digest(const Instance& inst);

}  // namespace invopt
