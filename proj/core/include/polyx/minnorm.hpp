#pragma once

// Exact minimum-norm point of an H-polyhedron and the signed distance built
// on it.
//
// The search moves a point y from the query x by successive orthogonal
// projections onto constraint hyperplanes. After each projection the
// remaining constraints are re-expressed inside the affine subspace that y
// now lives in, so every level of the recursion looks like the top level in
// a smaller space. Each level keeps only constraints that y still violates,
// prunes them to an irredundant set, tries them in order of decreasing
// violation and accepts y as soon as it lies in P and no point of P's
// interior is strictly closer to x (checked by a strict LP).

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "polyx/geom.hpp"
#include "polyx/types.hpp"

namespace polyx::minnorm {

/// Residual norm under which a Gram-Schmidt direction counts as dependent.
inline constexpr double kDependenceTol = 1e-10;

struct SolveOptions {
  double tol = kDefaultTol;
  std::uint64_t node_budget = 10'000'000;
  /// Skip irredundancy pruning below the top level. Faster, same answers.
  bool skip_min_h_below_depth1 = false;
  /// Wall-clock limit; exceeding it raises kBudgetExceeded.
  std::optional<std::chrono::steady_clock::time_point> deadline;
  /// Re-check the optimality certificate of every outside-case result.
#ifdef NDEBUG
  bool verify = false;
#else
  bool verify = true;
#endif
};

struct MinNormResult {
  Vector point;
  double signed_distance = 0.0;
  std::uint64_t iterations = 0;  // recursion nodes visited
};

/// A constraint <z, normal> <= offset expressed in the current subspace.
/// `source` is its index in the family the search started from.
struct Constraint {
  double offset = 0.0;
  Vector normal;
  std::size_t source = 0;
};
using Family = std::vector<Constraint>;

struct ReducedFamily {
  Family kept;
  std::vector<std::size_t> dropped;  // sources whose normal is parallel to the pivot
};

/// Minimum-norm point from x in the intersection of `planes`, by sequential
/// projection along Gram-Schmidt directions. Throws kLinearDependence naming
/// the first plane whose normal depends on the earlier ones.
Vector project_intersection(const Vector& x, std::span<const geom::Hyperplane> planes);

/// Re-expresses every member of h but h[pivot] inside the pivot hyperplane.
/// x must already lie on that hyperplane. Members whose normal is parallel to
/// the pivot normal have no counterpart there and are reported in `dropped`.
ReducedFamily reduce_family(const Vector& x, const Family& h, std::size_t pivot);

/// Optimality certificate: y in P is the minimum-norm point from x iff the
/// interior of P and the open halfspace {z : <z, y - x> < <y, y - x>} are
/// disjoint. Requires a full-dimensional P. Throws kPrecondition when y is
/// outside P.
bool is_min_norm(const Vector& x, const Vector& y, const geom::PolyhedronH& p,
                 double tol = kDefaultTol);

/// A polyhedron prepared for repeated queries. Construction computes the
/// minimum H-description once; solve() is const and safe to call from many
/// threads.
class Solver {
 public:
  explicit Solver(geom::PolyhedronH p, SolveOptions options = {});

  MinNormResult solve(const Vector& x) const;
  MinNormResult solve(const Vector& x, const SolveOptions& options) const;
  double signed_distance(const Vector& x) const { return solve(x).signed_distance; }

  const geom::PolyhedronH& polyhedron() const { return original_; }
  const geom::PolyhedronH& minimal() const { return minimal_; }
  const SolveOptions& options() const { return options_; }

 private:
  geom::PolyhedronH original_;
  geom::PolyhedronH minimal_;
  Family family_;
  SolveOptions options_;
};

/// One-shot helpers; they pay for the irredundancy pass on every call.
MinNormResult solve(const geom::PolyhedronH& p, const Vector& x, const SolveOptions& options = {});
double signed_distance(const geom::PolyhedronH& p, const Vector& x,
                       const SolveOptions& options = {});

}  // namespace polyx::minnorm
