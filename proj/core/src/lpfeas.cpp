#include "polyx/lpfeas.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "polyx/error.hpp"

namespace polyx::lp {
namespace {

constexpr double kPivotEps = 1e-11;

// Dense simplex on the condensed (Tucker) tableau for
//   maximize c'z  s.t.  M z <= q,  z >= 0
// with q >= 0, so the all-slack basis is feasible and no separate phase is
// needed. Entering and leaving variables follow Bland's rule.
class CondensedSimplex {
 public:
  CondensedSimplex(const Matrix& m, const Vector& q, const Vector& c)
      : rows_(m.rows()), cols_(m.cols()), tab_(rows_ + 1, cols_ + 1),
        basic_(static_cast<std::size_t>(rows_)),
        nonbasic_(static_cast<std::size_t>(cols_)) {
    tab_.topLeftCorner(rows_, cols_) = m;
    tab_.col(cols_).head(rows_) = q;
    tab_.row(rows_).head(cols_) = -c.transpose();
    tab_(rows_, cols_) = 0.0;
    for (Index j = 0; j < cols_; ++j) nonbasic_[static_cast<std::size_t>(j)] = j;
    for (Index i = 0; i < rows_; ++i) basic_[static_cast<std::size_t>(i)] = cols_ + i;
  }

  // Value of structural variable j at the current basis.
  double value(Index j) const {
    for (Index i = 0; i < rows_; ++i) {
      if (basic_[idx(i)] == j) return tab_(i, cols_);
    }
    return 0.0;
  }

  // Returns the optimal objective; the caller guarantees boundedness.
  double maximize() {
    // Bland's rule terminates; the bound only guards against float chaos.
    const Index max_pivots = 50 * (rows_ + cols_) + 1000;
    for (Index it = 0; it < max_pivots; ++it) {
      Index enter = -1;
      for (Index j = 0; j < cols_; ++j) {
        if (tab_(rows_, j) < -kPivotEps &&
            (enter < 0 || nonbasic_[idx(j)] < nonbasic_[idx(enter)])) {
          enter = j;
        }
      }
      if (enter < 0) return tab_(rows_, cols_);

      Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < rows_; ++i) {
        const double a = tab_(i, enter);
        if (a <= kPivotEps) continue;
        const double ratio = tab_(i, cols_) / a;
        if (ratio < best_ratio - 1e-14 ||
            (std::abs(ratio - best_ratio) <= 1e-14 && leave >= 0 &&
             basic_[idx(i)] < basic_[idx(leave)])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) fail(ErrorCode::kInternal, "lp: unbounded slack problem");
      pivot(leave, enter);
    }
    fail(ErrorCode::kInternal, "lp: simplex pivot limit reached");
  }

 private:
  static std::size_t idx(Index i) { return static_cast<std::size_t>(i); }

  void pivot(Index r, Index s) {
    const double inv = 1.0 / tab_(r, s);
    for (Index i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = tab_(i, s) * inv;
      if (f == 0.0) continue;
      for (Index j = 0; j <= cols_; ++j) {
        if (j != s) tab_(i, j) -= tab_(r, j) * f;
      }
      tab_(i, s) = -f;
    }
    for (Index j = 0; j <= cols_; ++j) {
      if (j != s) tab_(r, j) *= inv;
    }
    tab_(r, s) = inv;
    std::swap(basic_[idx(r)], nonbasic_[idx(s)]);
  }

  Index rows_;
  Index cols_;
  Matrix tab_;
  std::vector<Index> basic_;
  std::vector<Index> nonbasic_;
};

}  // namespace

void LinearSystem::validate() const {
  if (rows.rows() < 1 || rows.cols() < 1) {
    fail(ErrorCode::kInput, "linear system needs at least one row and one column");
  }
  if (rhs.size() != rows.rows()) {
    fail(ErrorCode::kInput, "linear system rhs length does not match row count");
  }
  if (!rows.allFinite() || !rhs.allFinite()) {
    fail(ErrorCode::kInput, "linear system contains NaN or Inf");
  }
}

double max_uniform_slack(const LinearSystem& sys, double cap) { return solve_max_slack(sys, cap).slack; }

SlackSolution solve_max_slack(const LinearSystem& sys, double cap) {
  sys.validate();
  const Index m = sys.constraints();
  const Index n = sys.dim();

  Matrix a(m, n);
  Vector b(m);
  for (Index i = 0; i < m; ++i) {
    const double norm = sys.rows.row(i).norm();
    if (norm > 1e-14) {
      a.row(i) = sys.rows.row(i) / norm;
      b(i) = sys.rhs(i) / norm;
    } else {
      a.row(i).setZero();
      b(i) = sys.rhs(i);
    }
  }

  // Start from x = 0 and the largest t it allows; shift t so that the
  // remaining slack variable tau = t - t0 is non-negative.
  const double t0 = std::min(b.minCoeff(), cap);

  // z = (x+, x-, tau)
  const Index vars = 2 * n + 1;
  Matrix tableau(m + 1, vars);
  Vector q(m + 1);
  tableau.topLeftCorner(m, n) = a;
  tableau.block(0, n, m, n) = -a;
  tableau.block(0, 2 * n, m, 1).setOnes();
  q.head(m) = (b.array() - t0).matrix();
  tableau.row(m).setZero();
  tableau(m, 2 * n) = 1.0;
  q(m) = cap - t0;
  q = q.cwiseMax(0.0);

  Vector c = Vector::Zero(vars);
  c(2 * n) = 1.0;

  CondensedSimplex simplex(tableau, q, c);
  SlackSolution out;
  out.slack = t0 + simplex.maximize();
  out.point.resize(n);
  for (Index j = 0; j < n; ++j) out.point(j) = simplex.value(j) - simplex.value(n + j);
  return out;
}

bool feasible(const LinearSystem& sys) {
  return max_uniform_slack(sys) >= -kFeasibilityTol;
}

bool strict_feasible(const LinearSystem& sys) {
  return max_uniform_slack(sys) > kStrictTol;
}

}  // namespace polyx::lp
