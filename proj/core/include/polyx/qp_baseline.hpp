#pragma once

// Reference solvers for   minimize |y|^2  subject to  V y <= s.
//
// solve_approx is an operator-splitting (ADMM) first-order method with the
// same iteration and stopping rule as OSQP, used as the approximate
// baseline in timing and accuracy comparisons. brute_force enumerates
// active sets and is the independent correctness oracle for minnorm.

#include <cstdint>

#include "polyx/geom.hpp"
#include "polyx/types.hpp"

namespace polyx::qp {

/// Problem in the frame centred on the query point: y = z - x.
struct QpProblem {
  Matrix constraint_matrix;  // k x n (V)
  Vector constraint_rhs;     // k   (s)

  /// Translates P so that x becomes the origin.
  static QpProblem centered(const geom::PolyhedronH& p, const Vector& x);
  void validate() const;
};

struct AdmmSettings {
  double rel_tol = 1e-6;
  double abs_tol = 1e-4;
  int max_iter = 4000;
  double rho = 1.0;
  double sigma = 1e-6;
  double alpha = 1.6;      // over-relaxation
  int rho_update_interval = 25;
};

struct ApproxResult {
  Vector point;  // in the centred frame
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

ApproxResult solve_approx(const QpProblem& problem, const AdmmSettings& settings);
ApproxResult solve_approx(const QpProblem& problem, double rel_tol = 1e-6, int max_iter = 4000);

inline constexpr std::uint64_t kBruteForceSubsetLimit = 1'000'000;

/// Number of hyperplane subsets of size <= min(n, k) brute_force would visit.
std::uint64_t brute_force_subset_count(std::size_t k, Index n);

/// Exhaustive minimum-norm point: projects x onto every linearly independent
/// subset of at most n boundary hyperplanes by solving the normal equations
/// and keeps the closest candidate inside P. Throws kBudgetExceeded above
/// kBruteForceSubsetLimit subsets and kEmptyPolyhedron when nothing is
/// feasible.
Vector brute_force(const geom::PolyhedronH& p, const Vector& x);

}  // namespace polyx::qp
