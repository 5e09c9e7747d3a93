#pragma once

// Feasibility of systems of linear inequalities.
//
// Both predicates reduce to one small LP, the single-artificial phase-1
// problem
//
//     maximize t  subject to  rows * x + t * 1 <= rhs,  t <= cap
//
// over free x and t, after every row has been scaled to unit norm. The
// optimum t* is the largest uniform slack the system admits (capped so the
// LP stays bounded). Ax <= b is feasible iff t* >= -tol and Ax < b is
// feasible iff t* > tol.

#include "polyx/types.hpp"

namespace polyx::lp {

inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr double kStrictTol = 1e-9;
inline constexpr double kSlackCap = 1.0;

struct LinearSystem {
  Matrix rows;  // m x n, one constraint normal per row
  Vector rhs;   // m

  Index constraints() const { return rows.rows(); }
  Index dim() const { return rows.cols(); }

  /// Throws kInput on empty, mis-shaped or non-finite data.
  void validate() const;
};

/// Largest t such that rows * x + t <= rhs is feasible for some x, with rows
/// normalized to unit length first and t clamped to `cap`. Zero rows act as
/// the constant constraint t <= rhs_i.
double max_uniform_slack(const LinearSystem& sys, double cap = kSlackCap);

struct SlackSolution {
  double slack = 0.0;
  Vector point;  // an x attaining `slack`
};

/// max_uniform_slack together with a maximizing x.
SlackSolution solve_max_slack(const LinearSystem& sys, double cap = kSlackCap);

/// True iff some x satisfies rows * x <= rhs.
bool feasible(const LinearSystem& sys);

/// True iff some x satisfies rows * x < rhs.
bool strict_feasible(const LinearSystem& sys);

}  // namespace polyx::lp
