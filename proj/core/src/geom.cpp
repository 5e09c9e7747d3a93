#include "polyx/geom.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "polyx/error.hpp"
#include "polyx/lpfeas.hpp"

namespace polyx::geom {
namespace {

void check_dim(Index expected, Index got, const char* what) {
  if (expected != got) {
    fail(ErrorCode::kInput, std::string(what) + ": dimension mismatch (expected " +
                                std::to_string(expected) + ", got " + std::to_string(got) + ")");
  }
}

}  // namespace

Hyperplane::Hyperplane(double offset, Vector normal) {
  if (normal.size() < 1) fail(ErrorCode::kInput, "hyperplane needs dimension >= 1");
  if (!std::isfinite(offset) || !normal.allFinite()) {
    fail(ErrorCode::kInput, "hyperplane has non-finite offset or normal");
  }
  const double norm = normal.norm();
  if (norm < 1e-12) fail(ErrorCode::kInput, "degenerate hyperplane: normal has zero length");
  offset_ = offset / norm;
  normal_ = std::move(normal) / norm;
}

double Hyperplane::signed_distance(const Vector& x) const {
  check_dim(dim(), x.size(), "signed_distance");
  return x.dot(normal_) - offset_;
}

PolyhedronH::PolyhedronH(Index dim, std::vector<Halfspace> halfspaces)
    : dim_(dim), halfspaces_(std::move(halfspaces)) {
  if (dim_ < 1) fail(ErrorCode::kInput, "polyhedron dimension must be >= 1");
  if (halfspaces_.empty()) fail(ErrorCode::kInput, "polyhedron needs at least one halfspace");
  for (const auto& h : halfspaces_) check_dim(dim_, h.dim(), "polyhedron");
}

PolyhedronH PolyhedronH::from_matrix(const Matrix& normals, const Vector& offsets) {
  if (normals.rows() != offsets.size()) {
    fail(ErrorCode::kInput, "polyhedron: normals/offsets row count mismatch");
  }
  std::vector<Halfspace> hs;
  hs.reserve(static_cast<std::size_t>(normals.rows()));
  for (Index i = 0; i < normals.rows(); ++i) {
    hs.emplace_back(offsets(i), normals.row(i).transpose());
  }
  return PolyhedronH(normals.cols(), std::move(hs));
}

Matrix PolyhedronH::normals() const {
  Matrix m(static_cast<Index>(size()), dim_);
  for (std::size_t i = 0; i < size(); ++i) m.row(static_cast<Index>(i)) = halfspaces_[i].normal();
  return m;
}

Vector PolyhedronH::offsets() const {
  Vector s(static_cast<Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) s(static_cast<Index>(i)) = halfspaces_[i].offset();
  return s;
}

PolyhedronH PolyhedronH::subset(const std::vector<std::size_t>& indices) const {
  std::vector<Halfspace> hs;
  hs.reserve(indices.size());
  for (auto i : indices) hs.push_back(halfspaces_.at(i));
  return PolyhedronH(dim_, std::move(hs));
}

PolyhedronH PolyhedronH::translated(const Vector& t) const {
  check_dim(dim_, t.size(), "translated");
  std::vector<Halfspace> hs;
  hs.reserve(size());
  for (const auto& h : halfspaces_) hs.emplace_back(h.offset() + h.normal().dot(t), h.normal());
  return PolyhedronH(dim_, std::move(hs));
}

double halfspace_signed_distance(const Vector& x, const Halfspace& b) {
  return b.boundary().signed_distance(x);
}

double max_violation(const PolyhedronH& p, const Vector& x) {
  check_dim(p.dim(), x.size(), "contains");
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& h : p.halfspaces()) worst = std::max(worst, x.dot(h.normal()) - h.offset());
  return worst;
}

bool contains(const PolyhedronH& p, const Vector& x, double tol) {
  return max_violation(p, x) <= tol;
}

double inside_signed_distance(const PolyhedronH& p, const Vector& x) {
  const double d = max_violation(p, x);
  if (d > kDefaultTol) fail(ErrorCode::kPrecondition, "inside_signed_distance: point is outside the polyhedron");
  return d;
}

bool is_empty(const PolyhedronH& p) {
  return !lp::feasible({p.normals(), p.offsets()});
}

bool is_full_dimensional(const PolyhedronH& p) {
  return lp::strict_feasible({p.normals(), p.offsets()});
}

PolyhedronH support_filter(const PolyhedronH& p) {
  if (is_empty(p)) fail(ErrorCode::kEmptyPolyhedron, "support_filter: empty polyhedron");
  const Matrix a = p.normals();
  const Vector b = p.offsets();
  const Index k = a.rows();

  lp::LinearSystem sys{Matrix(k + 1, a.cols()), Vector(k + 1)};
  sys.rows.topRows(k) = a;
  sys.rhs.head(k) = b;
  std::vector<std::size_t> keep;
  for (Index j = 0; j < k; ++j) {
    // <x, v_j> >= s_j together with P pins x to the hyperplane.
    sys.rows.row(k) = -a.row(j);
    sys.rhs(k) = -b(j);
    if (lp::feasible(sys)) keep.push_back(static_cast<std::size_t>(j));
  }
  return p.subset(keep);
}

std::vector<std::size_t> irredundant_indices(const Matrix& normals, const Vector& offsets) {
  const Index k = normals.rows();
  std::vector<bool> alive(static_cast<std::size_t>(k), true);
  std::size_t alive_count = static_cast<std::size_t>(k);

  for (Index j = k - 1; j >= 0; --j) {
    if (alive_count == 1) break;  // a single halfspace is never redundant
    lp::LinearSystem sys{Matrix(static_cast<Index>(alive_count), normals.cols()),
                         Vector(static_cast<Index>(alive_count))};
    Index r = 0;
    for (Index i = 0; i < k; ++i) {
      if (!alive[static_cast<std::size_t>(i)]) continue;
      const double sign = (i == j) ? -1.0 : 1.0;
      sys.rows.row(r) = sign * normals.row(i);
      sys.rhs(r) = sign * offsets(i);
      ++r;
    }
    if (!lp::strict_feasible(sys)) {
      alive[static_cast<std::size_t>(j)] = false;
      --alive_count;
    }
  }

  std::vector<std::size_t> keep;
  keep.reserve(alive_count);
  for (Index i = 0; i < k; ++i) {
    if (alive[static_cast<std::size_t>(i)]) keep.push_back(static_cast<std::size_t>(i));
  }
  return keep;
}

std::vector<std::size_t> min_h_indices(const PolyhedronH& p) {
  const lp::LinearSystem sys{p.normals(), p.offsets()};
  const double slack = lp::max_uniform_slack(sys);
  if (slack < -lp::kFeasibilityTol) fail(ErrorCode::kEmptyPolyhedron, "min_h_description: empty polyhedron");
  if (slack <= lp::kStrictTol) {
    fail(ErrorCode::kDegeneratePolyhedron, "min_h_description: polyhedron has no interior");
  }
  return irredundant_indices(sys.rows, sys.rhs);
}

PolyhedronH min_h_description(const PolyhedronH& p) { return p.subset(min_h_indices(p)); }

}  // namespace polyx::geom
