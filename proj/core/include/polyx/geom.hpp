#pragma once

// Hyperplanes, closed halfspaces and H-represented convex polyhedra.

#include <cstddef>
#include <vector>

#include "polyx/types.hpp"

namespace polyx::geom {

/// Oriented affine hyperplane {x : <x, normal> = offset} with a unit normal.
class Hyperplane {
 public:
  /// Rescales (offset, normal) to (offset/|normal|, normal/|normal|).
  /// Throws kInput for |normal| < 1e-12 or non-finite values.
  Hyperplane(double offset, Vector normal);

  double offset() const { return offset_; }
  const Vector& normal() const { return normal_; }
  Index dim() const { return normal_.size(); }

  /// <x, normal> - offset
  double signed_distance(const Vector& x) const;

 private:
  double offset_;
  Vector normal_;
};

/// Closed halfspace {x : <x, normal> <= offset} bounded by `boundary`.
class Halfspace {
 public:
  explicit Halfspace(Hyperplane boundary) : boundary_(std::move(boundary)) {}
  Halfspace(double offset, Vector normal) : boundary_(offset, std::move(normal)) {}

  const Hyperplane& boundary() const { return boundary_; }
  double offset() const { return boundary_.offset(); }
  const Vector& normal() const { return boundary_.normal(); }
  Index dim() const { return boundary_.dim(); }

  /// The opposite closed halfspace sharing the same boundary.
  Halfspace flipped() const { return Halfspace(-offset(), -normal()); }

 private:
  Hyperplane boundary_;
};

/// Intersection of k >= 1 closed halfspaces in R^dim. May be empty,
/// unbounded or lower-dimensional.
class PolyhedronH {
 public:
  PolyhedronH(Index dim, std::vector<Halfspace> halfspaces);

  /// Builds from a k x n matrix of normals (rows) and k offsets.
  static PolyhedronH from_matrix(const Matrix& normals, const Vector& offsets);

  Index dim() const { return dim_; }
  std::size_t size() const { return halfspaces_.size(); }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  const Halfspace& operator[](std::size_t i) const { return halfspaces_[i]; }

  /// k x n matrix of unit normals.
  Matrix normals() const;
  Vector offsets() const;

  PolyhedronH subset(const std::vector<std::size_t>& indices) const;
  PolyhedronH translated(const Vector& t) const;

 private:
  Index dim_;
  std::vector<Halfspace> halfspaces_;
};

double halfspace_signed_distance(const Vector& x, const Halfspace& b);

/// max_i (<x, v_i> - s_i); positive means x violates some halfspace.
double max_violation(const PolyhedronH& p, const Vector& x);

bool contains(const PolyhedronH& p, const Vector& x, double tol = kDefaultTol);

/// max_i (<x, v_i> - s_i) for x in P. This is -d(x, boundary of P) when P is
/// given by its minimum H-description. Throws kPrecondition if x is outside
/// P by more than kDefaultTol.
double inside_signed_distance(const PolyhedronH& p, const Vector& x);

bool is_empty(const PolyhedronH& p);

/// True iff P has a non-empty interior.
bool is_full_dimensional(const PolyhedronH& p);

/// Drops every halfspace whose boundary hyperplane misses P.
/// Throws kEmptyPolyhedron if P is empty.
PolyhedronH support_filter(const PolyhedronH& p);

/// Irredundant subfamily. A halfspace is kept iff the system made of its own
/// complement and the interiors of the other kept halfspaces is strictly
/// feasible. Candidates are tested from the last index to the first against
/// the current survivors, so among duplicates the lowest index survives.
/// Throws kEmptyPolyhedron if P is empty and kDegeneratePolyhedron if P has
/// no interior (the strict test cannot tell constraints apart there).
PolyhedronH min_h_description(const PolyhedronH& p);
std::vector<std::size_t> min_h_indices(const PolyhedronH& p);

/// Same sequential test on a raw family (normals as rows, need not be unit).
/// No emptiness checks: an empty or flat family yields an arbitrary subset.
std::vector<std::size_t> irredundant_indices(const Matrix& normals, const Vector& offsets);

}  // namespace polyx::geom
