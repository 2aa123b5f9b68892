#include "pulseforge/simplex.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace pulseforge::lp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-12;
constexpr double kTieTol = 1e-13;

// Tableau in shifted coordinates: every variable lives in [0, upper_j].
class Tableau {
 public:
  Tableau(RealMatrix rows, RealVector rhs, RealVector upper, std::vector<int> basis)
      : t_(std::move(rows)),
        upper_(std::move(upper)),
        basis_(std::move(basis)),
        at_upper_(static_cast<std::size_t>(t_.cols()), false),
        is_basic_(static_cast<std::size_t>(t_.cols()), false),
        x_basic_(std::move(rhs)) {
    for (int j : basis_) {
      is_basic_[static_cast<std::size_t>(j)] = true;
    }
  }

  // Maximises cost^T x; returns false when unbounded.
  bool optimise(const RealVector& cost, int& iterations, int max_iterations) {
    const Eigen::Index m = t_.rows();
    const Eigen::Index n = t_.cols();
    while (true) {
      if (iterations >= max_iterations) {
        std::ostringstream msg;
        msg << "simplex: iteration cap of " << max_iterations << " reached";
        throw NumericalError(msg.str());
      }
      RealVector cb(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
      }
      const RealVector reduced = cost.transpose() - cb.transpose() * t_;

      Eigen::Index entering = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (is_basic_[ju] || upper_(j) == 0.0) {
          continue;
        }
        if ((!at_upper_[ju] && reduced(j) > kCostTol) || (at_upper_[ju] && reduced(j) < -kCostTol)) {
          entering = j;
          break;
        }
      }
      if (entering < 0) {
        return true;
      }
      ++iterations;

      const double dir = at_upper_[static_cast<std::size_t>(entering)] ? -1.0 : 1.0;
      double best = kInf;
      Eigen::Index leave_row = -1;
      bool leave_to_upper = false;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double delta = dir * t_(i, entering);
        const int var = basis_[static_cast<std::size_t>(i)];
        double limit = kInf;
        bool to_upper = false;
        if (delta > kPivotTol) {
          limit = std::max(0.0, x_basic_(i)) / delta;
        } else if (delta < -kPivotTol && std::isfinite(upper_(var))) {
          limit = std::max(0.0, upper_(var) - x_basic_(i)) / -delta;
          to_upper = true;
        } else {
          continue;
        }
        const bool tie = leave_row >= 0 && std::abs(limit - best) <= kTieTol * std::max(1.0, best);
        if ((!tie && limit < best) || (tie && var < basis_[static_cast<std::size_t>(leave_row)])) {
          best = limit;
          leave_row = i;
          leave_to_upper = to_upper;
        }
      }
      double step = best;
      if (upper_(entering) <= best) {
        step = upper_(entering);
        leave_row = -1;
      }
      if (!std::isfinite(step)) {
        return false;
      }

      x_basic_ -= (dir * step) * t_.col(entering);
      if (leave_row < 0) {
        at_upper_[static_cast<std::size_t>(entering)] = !at_upper_[static_cast<std::size_t>(entering)];
        continue;
      }

      const double entering_value =
          at_upper_[static_cast<std::size_t>(entering)] ? upper_(entering) - step : step;
      const int leaving = basis_[static_cast<std::size_t>(leave_row)];
      is_basic_[static_cast<std::size_t>(leaving)] = false;
      at_upper_[static_cast<std::size_t>(leaving)] = leave_to_upper;
      is_basic_[static_cast<std::size_t>(entering)] = true;
      at_upper_[static_cast<std::size_t>(entering)] = false;
      basis_[static_cast<std::size_t>(leave_row)] = static_cast<int>(entering);

      const double pivot = t_(leave_row, entering);
      t_.row(leave_row) /= pivot;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (i != leave_row) {
          const double factor = t_(i, entering);
          if (factor != 0.0) {
            t_.row(i) -= factor * t_.row(leave_row);
          }
        }
      }
      x_basic_(leave_row) = entering_value;
    }
  }

  RealVector values() const {
    RealVector x = RealVector::Zero(t_.cols());
    for (Eigen::Index j = 0; j < t_.cols(); ++j) {
      if (at_upper_[static_cast<std::size_t>(j)]) {
        x(j) = upper_(j);
      }
    }
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      x(basis_[i]) = x_basic_(static_cast<Eigen::Index>(i));
    }
    return x;
  }

  void fix_to_zero(Eigen::Index j) { upper_(j) = 0.0; }

 private:
  RealMatrix t_;
  RealVector upper_;
  std::vector<int> basis_;
  std::vector<bool> at_upper_;
  std::vector<bool> is_basic_;
  RealVector x_basic_;
};

}  // namespace

Solution solve(const LinearProgram& problem, int max_iterations) {
  const Eigen::Index m = problem.a.rows();
  const Eigen::Index n = problem.a.cols();
  if (problem.b.size() != m || problem.c.size() != n || problem.lower.size() != n ||
      problem.upper.size() != n) {
    throw NumericalError("simplex: inconsistent problem dimensions");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(problem.lower(j)) || problem.upper(j) < problem.lower(j)) {
      throw NumericalError("simplex: lower bounds must be finite and not exceed upper bounds");
    }
  }

  // Columns: structural (n), slacks (m), artificials (one per negative row).
  const RealVector rhs = problem.b - problem.a * problem.lower;
  std::vector<Eigen::Index> negative_rows;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (rhs(i) < 0.0) {
      negative_rows.push_back(i);
    }
  }
  const Eigen::Index n_art = static_cast<Eigen::Index>(negative_rows.size());
  const Eigen::Index total = n + m + n_art;

  RealMatrix rows = RealMatrix::Zero(m, total);
  rows.leftCols(n) = problem.a;
  rows.block(0, n, m, m).setIdentity();
  RealVector upper(total);
  upper.head(n) = problem.upper - problem.lower;
  upper.tail(m + n_art).setConstant(kInf);

  std::vector<int> basis(static_cast<std::size_t>(m));
  RealVector basic_values = rhs;
  for (Eigen::Index i = 0; i < m; ++i) {
    basis[static_cast<std::size_t>(i)] = static_cast<int>(n + i);
  }
  for (Eigen::Index k = 0; k < n_art; ++k) {
    const Eigen::Index i = negative_rows[static_cast<std::size_t>(k)];
    rows.row(i) *= -1.0;
    basic_values(i) = -rhs(i);
    rows(i, n + m + k) = 1.0;
    basis[static_cast<std::size_t>(i)] = static_cast<int>(n + m + k);
  }

  Tableau tableau(std::move(rows), basic_values, upper, std::move(basis));
  Solution out;

  if (n_art > 0) {
    RealVector phase1 = RealVector::Zero(total);
    phase1.tail(n_art).setConstant(-1.0);
    tableau.optimise(phase1, out.iterations, max_iterations);
    const RealVector x = tableau.values();
    if (x.tail(n_art).sum() > 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) {
      out.status = Status::Infeasible;
      return out;
    }
    for (Eigen::Index k = 0; k < n_art; ++k) {
      tableau.fix_to_zero(n + m + k);
    }
  }

  RealVector cost = RealVector::Zero(total);
  cost.head(n) = problem.c;
  if (!tableau.optimise(cost, out.iterations, max_iterations)) {
    out.status = Status::Unbounded;
    return out;
  }
  out.status = Status::Optimal;
  out.x = tableau.values().head(n) + problem.lower;
  out.objective = problem.c.dot(out.x);
  return out;
}

}  // namespace pulseforge::lp
