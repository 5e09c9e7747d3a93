#include "polyx/minnorm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "polyx/error.hpp"
#include "polyx/lpfeas.hpp"

namespace polyx::minnorm {
namespace {

// Removes the components of w along every basis vector. Two passes of
// modified Gram-Schmidt keep the result orthogonal to working precision.
void orthogonalize(Vector& w, const std::vector<Vector>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& u : basis) w -= w.dot(u) * u;
  }
}

void check_point(const Vector& x, Index dim, const char* what) {
  if (x.size() != dim) {
    fail(ErrorCode::kInput, std::string(what) + ": point dimension " + std::to_string(x.size()) +
                                " does not match polyhedron dimension " + std::to_string(dim));
  }
  if (!x.allFinite()) fail(ErrorCode::kInput, std::string(what) + ": non-finite point");
}

class Search {
 public:
  Search(const geom::PolyhedronH& p, const Vector& x, const SolveOptions& options)
      : p_(p), x_(x), y_(x), options_(options), dim_(p.dim()) {
    basis_.reserve(static_cast<std::size_t>(dim_));
  }

  bool descend(const Family& family, Index depth) {
    tick();

    // Accept or backtrack once y has entered P.
    if (depth > 0 && geom::max_violation(p_, y_) <= options_.tol) {
      return is_min_norm(x_, y_, p_, options_.tol);
    }
    if (depth >= dim_) return false;

    // Only constraints still violated can carry the solution.
    std::vector<std::size_t> candidates;
    std::vector<double> distance(family.size());
    for (std::size_t j = 0; j < family.size(); ++j) {
      distance[j] = y_.dot(family[j].normal) - family[j].offset;
      if (distance[j] > options_.tol) candidates.push_back(j);
    }
    if (candidates.empty()) return false;

    if (!(options_.skip_min_h_below_depth1 && depth >= 1) && candidates.size() > 1) {
      Matrix a(static_cast<Index>(candidates.size()), dim_);
      Vector b(static_cast<Index>(candidates.size()));
      for (std::size_t r = 0; r < candidates.size(); ++r) {
        a.row(static_cast<Index>(r)) = family[candidates[r]].normal;
        b(static_cast<Index>(r)) = family[candidates[r]].offset;
      }
      std::vector<std::size_t> kept;
      for (auto r : geom::irredundant_indices(a, b)) kept.push_back(candidates[r]);
      candidates = std::move(kept);
    }

    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return distance[a] > distance[b]; });

    std::vector<bool> excluded(family.size(), false);
    for (const std::size_t c : candidates) {
      excluded[c] = true;
      const Vector saved = y_;
      y_ -= distance[c] * family[c].normal;
      basis_.push_back(family[c].normal);

      Family child;
      if (reduce(family, excluded, c, child) && descend(child, depth + 1)) return true;

      basis_.pop_back();
      y_ = saved;
    }
    return false;
  }

  const Vector& point() const { return y_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  void tick() {
    ++nodes_;
    if (nodes_ > options_.node_budget) {
      fail(ErrorCode::kBudgetExceeded, "minnorm: node budget of " +
                                           std::to_string(options_.node_budget) + " exceeded");
    }
    if (options_.deadline && (nodes_ & 63u) == 0 &&
        std::chrono::steady_clock::now() > *options_.deadline) {
      fail(ErrorCode::kBudgetExceeded, "minnorm: time budget exceeded");
    }
  }

  // Expresses the non-excluded members of `family` inside the hyperplane of
  // family[pivot], which y_ now lies on. Returns false when a constraint
  // parallel to the pivot is violated, i.e. the subspace misses P entirely.
  bool reduce(const Family& family, const std::vector<bool>& excluded, std::size_t pivot,
              Family& out) const {
    const Vector& pivot_normal = family[pivot].normal;
    out.reserve(family.size());
    for (std::size_t j = 0; j < family.size(); ++j) {
      if (excluded[j]) continue;
      const Constraint& c = family[j];
      const double gap = y_.dot(c.normal) - c.offset;
      Vector w = c.normal - c.normal.dot(pivot_normal) * pivot_normal;
      orthogonalize(w, basis_);
      const double residual = w.norm();
      if (residual < kDependenceTol) {
        if (gap > options_.tol) return false;
        continue;
      }
      w /= residual;
      const double along = c.normal.dot(w);
      out.push_back({y_.dot(w) - gap / along, std::move(w), c.source});
    }
    return true;
  }

  const geom::PolyhedronH& p_;
  const Vector& x_;
  Vector y_;
  const SolveOptions& options_;
  Index dim_;
  std::vector<Vector> basis_;
  std::uint64_t nodes_ = 0;
};

MinNormResult search_outside(const geom::PolyhedronH& searched, const geom::PolyhedronH& original,
                             const Family& family, const Vector& x, const SolveOptions& options) {
  Search search(searched, x, options);
  if (!search.descend(family, 0)) {
    fail(ErrorCode::kInternal, "minnorm: search exhausted without an optimal point");
  }
  MinNormResult result{search.point(), (search.point() - x).norm(), search.nodes()};
  if (options.verify && !is_min_norm(x, result.point, original, options.tol)) {
    fail(ErrorCode::kInternal, "minnorm: result fails the optimality certificate");
  }
  return result;
}

}  // namespace

Vector project_intersection(const Vector& x, std::span<const geom::Hyperplane> planes) {
  Vector y = x;
  std::vector<Vector> basis;
  basis.reserve(planes.size());
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const auto& plane = planes[i];
    if (plane.dim() != x.size()) {
      fail(ErrorCode::kInput, "project_intersection: plane " + std::to_string(i) +
                                  " has the wrong dimension");
    }
    Vector w = plane.normal();
    orthogonalize(w, basis);
    const double residual = w.norm();
    if (residual < kDependenceTol) {
      fail(ErrorCode::kLinearDependence, "project_intersection: normal of plane " +
                                             std::to_string(i) +
                                             " is linearly dependent on the previous ones");
    }
    const Vector u = w / residual;
    const double step = (y.dot(plane.normal()) - plane.offset()) / u.dot(plane.normal());
    y -= step * u;
    basis.push_back(u);
  }
  return y;
}

ReducedFamily reduce_family(const Vector& x, const Family& h, std::size_t pivot) {
  if (pivot >= h.size()) fail(ErrorCode::kInput, "reduce_family: pivot index out of range");
  const Vector& p = h[pivot].normal;
  if (p.size() != x.size()) fail(ErrorCode::kInput, "reduce_family: dimension mismatch");
  const Vector pivot_unit = p / p.norm();

  ReducedFamily out;
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (j == pivot) continue;
    const Constraint& c = h[j];
    if (c.normal.size() != x.size()) fail(ErrorCode::kInput, "reduce_family: dimension mismatch");
    Vector w = c.normal - c.normal.dot(pivot_unit) * pivot_unit;
    const double residual = w.norm();
    if (residual < kDependenceTol * c.normal.norm()) {
      out.dropped.push_back(c.source);
      continue;
    }
    w /= residual;
    const double offset = x.dot(w) - (x.dot(c.normal) - c.offset) / c.normal.dot(w);
    out.kept.push_back({offset, std::move(w), c.source});
  }
  return out;
}

bool is_min_norm(const Vector& x, const Vector& y, const geom::PolyhedronH& p, double tol) {
  check_point(x, p.dim(), "is_min_norm");
  check_point(y, p.dim(), "is_min_norm");
  if (geom::max_violation(p, y) > tol) {
    fail(ErrorCode::kPrecondition, "is_min_norm: candidate point is outside the polyhedron");
  }
  const Vector v = y - x;
  if (v.norm() <= 1e-14 * (1.0 + y.norm())) return true;

  const Index k = static_cast<Index>(p.size());
  lp::LinearSystem sys{Matrix(k + 1, p.dim()), Vector(k + 1)};
  sys.rows.topRows(k) = p.normals();
  sys.rhs.head(k) = p.offsets();
  sys.rows.row(k) = v.transpose();
  sys.rhs(k) = y.dot(v);
  return !lp::strict_feasible(sys);
}

Solver::Solver(geom::PolyhedronH p, SolveOptions options)
    : original_(std::move(p)),
      minimal_(geom::min_h_description(original_)),
      options_(options) {
  family_.reserve(minimal_.size());
  for (std::size_t i = 0; i < minimal_.size(); ++i) {
    family_.push_back({minimal_[i].offset(), minimal_[i].normal(), i});
  }
}

MinNormResult Solver::solve(const Vector& x) const { return solve(x, options_); }

MinNormResult Solver::solve(const Vector& x, const SolveOptions& options) const {
  check_point(x, original_.dim(), "solve");

  const double inside = geom::max_violation(minimal_, x);
  if (inside <= options.tol) {
    return {x, std::min(inside, 0.0), 1};
  }

  return search_outside(minimal_, original_, family_, x, options);
}

MinNormResult solve(const geom::PolyhedronH& p, const Vector& x, const SolveOptions& options) {
  check_point(x, p.dim(), "solve");
  if (geom::max_violation(p, x) <= options.tol) return Solver(p, options).solve(x);

  // Outside: the search prunes redundant constraints itself, so the full
  // irredundancy pass is skipped. Emptiness and flatness still need one LP.
  const double slack = lp::max_uniform_slack({p.normals(), p.offsets()});
  if (slack < -lp::kFeasibilityTol) fail(ErrorCode::kEmptyPolyhedron, "minnorm: empty polyhedron");
  if (slack <= lp::kStrictTol) fail(ErrorCode::kDegeneratePolyhedron, "minnorm: polyhedron has no interior");

  Family family;
  family.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) family.push_back({p[i].offset(), p[i].normal(), i});
  return search_outside(p, p, family, x, options);
}

double signed_distance(const geom::PolyhedronH& p, const Vector& x, const SolveOptions& options) {
  return solve(p, x, options).signed_distance;
}

}  // namespace polyx::minnorm
