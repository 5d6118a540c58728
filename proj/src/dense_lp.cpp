#include "invopt/dense_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace invopt {

void LinearProgram::add_row(std::vector<double> coeffs, RowSense sense,
                            double b) {
  if (coeffs.size() != num_vars) {
    throw std::invalid_argument("LinearProgram::add_row: expected " +
                                std::to_string(num_vars) + " coefficients");
  }
  rows.push_back(std::move(coeffs));
  senses.push_back(sense);
  rhs.push_back(b);
}

namespace {

enum class ColumnKind { Structural, Slack, Artificial };

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const LpOptions& options)
      : opt_(options), m_(lp.rows.size()), n_(lp.num_vars) {
    // Normalize to nonnegative right-hand sides.
    std::vector<RowSense> sense = lp.senses;
    std::vector<double> sign(m_, 1.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (lp.rhs[i] < 0.0) {
        sign[i] = -1.0;
        if (sense[i] == RowSense::LessEqual) {
          sense[i] = RowSense::GreaterEqual;
        } else if (sense[i] == RowSense::GreaterEqual) {
          sense[i] = RowSense::LessEqual;
        }
      }
    }

    // Column layout: structurals, one slack/surplus per inequality row (in
    // row order), then artificials for >= and = rows.
    kind_.assign(n_, ColumnKind::Structural);
    slack_col_.assign(m_, npos);
    for (std::size_t i = 0; i < m_; ++i) {
      if (lp.senses[i] != RowSense::Equal) {
        slack_col_[i] = kind_.size();
        slack_label_.push_back(n_ + i);
        kind_.push_back(ColumnKind::Slack);
      }
    }
    std::vector<std::size_t> art_col(m_, npos);
    for (std::size_t i = 0; i < m_; ++i) {
      if (sense[i] != RowSense::LessEqual) {
        art_col[i] = kind_.size();
        kind_.push_back(ColumnKind::Artificial);
      }
    }
    cols_ = kind_.size();
    width_ = cols_ + 1;
    t_.assign((m_ + 1) * width_, 0.0);
    basis_.assign(m_, npos);

    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign[i] * lp.rows[i][j];
      at(i, cols_) = sign[i] * lp.rhs[i];
      if (slack_col_[i] != npos) {
        // Slack enters with +1 for <=, -1 (surplus) for >= after the sign flip.
        at(i, slack_col_[i]) = sense[i] == RowSense::LessEqual ? 1.0 : -1.0;
      }
      if (art_col[i] != npos) {
        at(i, art_col[i]) = 1.0;
        basis_[i] = art_col[i];
      } else {
        basis_[i] = slack_col_[i];
      }
    }
  }

  LpSolution solve(const LinearProgram& lp) {
    LpSolution out;
    const bool has_artificial =
        std::find(kind_.begin(), kind_.end(), ColumnKind::Artificial) !=
        kind_.end();
    if (has_artificial) {
      // Phase I: maximize -sum(artificials).
      std::fill(obj_begin(), obj_begin() + width_, 0.0);
      for (std::size_t j = 0; j < cols_; ++j) {
        if (kind_[j] == ColumnKind::Artificial) obj(j) = 1.0;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (kind_[basis_[i]] == ColumnKind::Artificial) eliminate_objective(i);
      }
      if (run(/*allow_artificial=*/true) != LpStatus::Optimal) {
        throw LpError("phase I reported unbounded");
      }
      // Read the residual off the basic artificials; the objective cell
      // accumulates round-off over long pivot sequences.
      double infeasibility = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (kind_[basis_[i]] == ColumnKind::Artificial) {
          infeasibility += std::abs(at(i, cols_));
        }
      }
      if (infeasibility > opt_.feasibility_tol) {
        out.status = LpStatus::Infeasible;
        out.pivots = pivots_;
        return out;
      }
      drive_out_artificials();
    }

    std::fill(obj_begin(), obj_begin() + width_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) obj(j) = -lp.objective[j];
    for (std::size_t i = 0; i < m_; ++i) {
      if (obj(basis_[i]) != 0.0) eliminate_objective(i);
    }
    out.status = run(/*allow_artificial=*/false);
    out.pivots = pivots_;
    if (out.status != LpStatus::Optimal) return out;

    out.x.assign(n_, 0.0);
    std::vector<bool> is_basic(cols_, false);
    for (std::size_t i = 0; i < m_; ++i) {
      is_basic[basis_[i]] = true;
      if (basis_[i] < n_) out.x[basis_[i]] = at(i, cols_);
    }
    out.objective = obj(cols_);
    for (std::size_t j = 0; j < cols_; ++j) {
      if (is_basic[j] || kind_[j] == ColumnKind::Artificial) continue;
      out.nonbasic.push_back(j < n_ ? j : slack_label_[j - n_]);
    }
    return out;
  }

 private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  double& at(std::size_t i, std::size_t j) { return t_[i * width_ + j]; }
  double& obj(std::size_t j) { return t_[m_ * width_ + j]; }
  std::vector<double>::iterator obj_begin() {
    return t_.begin() + static_cast<std::ptrdiff_t>(m_ * width_);
  }

  void eliminate_objective(std::size_t row) {
    const double f = obj(basis_[row]);
    if (f == 0.0) return;
    double* o = &t_[m_ * width_];
    const double* r = &t_[row * width_];
    for (std::size_t j = 0; j < width_; ++j) o[j] -= f * r[j];
  }

  void pivot(std::size_t row, std::size_t col) {
    double* pr = &t_[row * width_];
    const double inv = 1.0 / pr[col];
    for (std::size_t j = 0; j < width_; ++j) pr[j] *= inv;
    pr[col] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == row) continue;
      double* ri = &t_[i * width_];
      const double f = ri[col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) ri[j] -= f * pr[j];
      ri[col] = 0.0;
    }
    basis_[row] = col;
    ++pivots_;
    if (pivots_ > opt_.max_pivots) {
      throw LpError("simplex exceeded pivot limit");
    }
  }

  LpStatus run(bool allow_artificial) {
    // Phase I is bounded, so a column with no pivot row there is only
    // improving through round-off (many entries just under pivot_tol).
    // Skip it until the next pivot instead of reporting unboundedness.
    std::vector<bool> skip(cols_, false);
    for (;;) {
      // Bland: lowest-index improving column.
      std::size_t enter = npos;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!allow_artificial && kind_[j] == ColumnKind::Artificial) continue;
        if (skip[j]) continue;
        if (obj(j) < -opt_.pivot_tol) {
          enter = j;
          break;
        }
      }
      if (enter == npos) return LpStatus::Optimal;

      // Ratio test. Ties prefer the largest pivot element, which keeps
      // degenerate problems well conditioned; after a long degenerate
      // stretch we fall back to Bland's lowest basic index for good.
      std::size_t leave = npos;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= opt_.pivot_tol) continue;
        const double ratio = std::max(at(i, cols_), 0.0) / a;
        if (ratio < best) {
          best = ratio;
          leave = i;
        } else if (ratio == best) {
          const bool better = bland_
                                  ? basis_[i] < basis_[leave]
                                  : a > at(leave, enter) ||
                                        (a == at(leave, enter) && basis_[i] < basis_[leave]);
          if (better) leave = i;
        }
      }
      if (leave != npos && !bland_) {
        degenerate_run_ = best == 0.0 ? degenerate_run_ + 1 : 0;
        if (degenerate_run_ > 10 * (m_ + cols_)) bland_ = true;
      }
      if (leave == npos) {
        if (!allow_artificial) return LpStatus::Unbounded;
        skip[enter] = true;
        continue;
      }
      pivot(leave, enter);
      std::fill(skip.begin(), skip.end(), false);
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (kind_[basis_[i]] != ColumnKind::Artificial) continue;
      std::size_t col = npos;
      double best = opt_.pivot_tol;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (kind_[j] == ColumnKind::Artificial) continue;
        if (std::abs(at(i, j)) > best) {
          best = std::abs(at(i, j));
          col = j;
        }
      }
      // No candidate: the row is redundant and its artificial stays basic
      // at zero, never re-entering phase II.
      if (col != npos) pivot(i, col);
    }
  }

  LpOptions opt_;
  std::size_t m_;
  std::size_t n_;
  std::size_t cols_ = 0;
  std::size_t width_ = 0;
  std::vector<ColumnKind> kind_;
  std::vector<std::size_t> slack_col_;
  std::vector<std::size_t> slack_label_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::size_t pivots_ = 0;
  std::size_t degenerate_run_ = 0;
  bool bland_ = false;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  if (lp.objective.size() != lp.num_vars) {
    throw std::invalid_argument("solve_lp: objective size mismatch");
  }
  if (lp.senses.size() != lp.rows.size() || lp.rhs.size() != lp.rows.size()) {
    throw std::invalid_argument("solve_lp: row data size mismatch");
  }
  for (const auto& row : lp.rows) {
    if (row.size() != lp.num_vars) {
      throw std::invalid_argument("solve_lp: row width mismatch");
    }
  }
  Tableau tableau(lp, options);
  return tableau.solve(lp);
}

}  // namespace invopt
