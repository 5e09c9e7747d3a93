#include "polyx/qp_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "polyx/error.hpp"

namespace polyx::qp {
namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

QpProblem QpProblem::centered(const geom::PolyhedronH& p, const Vector& x) {
  if (x.size() != p.dim()) fail(ErrorCode::kInput, "QpProblem: dimension mismatch");
  const Matrix v = p.normals();
  return {v, p.offsets() - v * x};
}

void QpProblem::validate() const {
  if (constraint_matrix.rows() < 1 || constraint_matrix.cols() < 1) {
    fail(ErrorCode::kInput, "QpProblem: empty constraint matrix");
  }
  if (constraint_rhs.size() != constraint_matrix.rows()) {
    fail(ErrorCode::kInput, "QpProblem: rhs length mismatch");
  }
  if (!constraint_matrix.allFinite() || !constraint_rhs.allFinite()) {
    fail(ErrorCode::kInput, "QpProblem: non-finite entries");
  }
}

ApproxResult solve_approx(const QpProblem& problem, double rel_tol, int max_iter) {
  AdmmSettings s;
  s.rel_tol = rel_tol;
  s.max_iter = max_iter;
  return solve_approx(problem, s);
}

ApproxResult solve_approx(const QpProblem& problem, const AdmmSettings& settings) {
  problem.validate();
  const Matrix& a = problem.constraint_matrix;
  const Vector& u = problem.constraint_rhs;
  const Index n = a.cols();
  const Index k = a.rows();

  // P = I, q = 0, l = -inf, u = s.
  double rho = settings.rho;
  const Matrix ata = a.transpose() * a;
  auto factor = [&](double r) {
    Matrix kkt = ata * r;
    kkt.diagonal().array() += 1.0 + settings.sigma;
    return Eigen::LLT<Matrix>(kkt);
  };
  Eigen::LLT<Matrix> llt = factor(rho);

  Vector x = Vector::Zero(n);
  Vector z = Vector::Zero(k);
  Vector lambda = Vector::Zero(k);
  Vector ax = Vector::Zero(k);

  ApproxResult result;
  for (int it = 1; it <= settings.max_iter; ++it) {
    const Vector rhs = settings.sigma * x + a.transpose() * (rho * z - lambda);
    const Vector x_tilde = llt.solve(rhs);
    const Vector z_tilde = a * x_tilde;

    const Vector x_next = settings.alpha * x_tilde + (1.0 - settings.alpha) * x;
    const Vector z_relaxed = settings.alpha * z_tilde + (1.0 - settings.alpha) * z;
    const Vector z_next = (z_relaxed + lambda / rho).cwiseMin(u);
    lambda += rho * (z_relaxed - z_next);
    x = x_next;
    z = z_next;

    ax = a * x;
    const Vector aty = a.transpose() * lambda;
    const double prim = inf_norm(ax - z);
    const double dual = inf_norm(x + aty);
    const double prim_scale = std::max(inf_norm(ax), inf_norm(z));
    const double dual_scale = std::max(inf_norm(x), inf_norm(aty));

    result.iterations = it;
    result.primal_residual = prim;
    result.dual_residual = dual;
    if (prim <= settings.abs_tol + settings.rel_tol * prim_scale &&
        dual <= settings.abs_tol + settings.rel_tol * dual_scale) {
      result.converged = true;
      break;
    }

    if (settings.rho_update_interval > 0 && it % settings.rho_update_interval == 0) {
      const double ratio = std::sqrt((prim / (prim_scale + 1e-30)) / (dual / (dual_scale + 1e-30) + 1e-30));
      const double next = std::clamp(rho * ratio, 1e-6, 1e6);
      if (next > 5.0 * rho || next < 0.2 * rho) {
        rho = next;
        llt = factor(rho);
      }
    }
  }
  result.point = x;
  return result;
}

std::uint64_t brute_force_subset_count(std::size_t k, Index n) {
  const std::uint64_t limit = std::min<std::uint64_t>(k, static_cast<std::uint64_t>(n));
  std::uint64_t total = 0;
  std::uint64_t binom = 1;  // C(k, 0)
  for (std::uint64_t r = 0; r <= limit; ++r) {
    total += binom;
    if (total > kBruteForceSubsetLimit) return total;
    binom = binom * (k - r) / (r + 1);
  }
  return total;
}

Vector brute_force(const geom::PolyhedronH& p, const Vector& x) {
  if (x.size() != p.dim() || !x.allFinite()) fail(ErrorCode::kInput, "brute_force: bad query point");
  const std::size_t k = p.size();
  const Index n = p.dim();
  if (brute_force_subset_count(k, n) > kBruteForceSubsetLimit) {
    fail(ErrorCode::kBudgetExceeded, "brute_force: too many hyperplane subsets");
  }
  const Matrix v = p.normals();
  const Vector s = p.offsets();

  Vector best;
  double best_dist = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& candidate) {
    if (!geom::contains(p, candidate, kDefaultTol)) return;
    const double d = (candidate - x).norm();
    if (d < best_dist) {
      best_dist = d;
      best = candidate;
    }
  };

  consider(x);
  const std::size_t max_size = std::min<std::size_t>(k, static_cast<std::size_t>(n));
  std::vector<std::size_t> subset;
  for (std::size_t r = 1; r <= max_size; ++r) {
    subset.resize(r);
    std::iota(subset.begin(), subset.end(), std::size_t{0});
    while (true) {
      Matrix vs(static_cast<Index>(r), n);
      Vector ss(static_cast<Index>(r));
      for (std::size_t i = 0; i < r; ++i) {
        vs.row(static_cast<Index>(i)) = v.row(static_cast<Index>(subset[i]));
        ss(static_cast<Index>(i)) = s(static_cast<Index>(subset[i]));
      }
      // Normal equations: (V V^T) mu = V x - s, y = x - V^T mu.
      const Matrix gram = vs * vs.transpose();
      Eigen::FullPivLU<Matrix> lu(gram);
      lu.setThreshold(1e-10);
      if (lu.rank() == static_cast<Index>(r)) {
        const Vector mu = lu.solve(vs * x - ss);
        consider(x - vs.transpose() * mu);
      }

      // next combination in lexicographic order
      std::size_t i = r;
      while (i > 0 && subset[i - 1] == k - r + (i - 1)) --i;
      if (i == 0) break;
      ++subset[i - 1];
      for (std::size_t j = i; j < r; ++j) subset[j] = subset[j - 1] + 1;
    }
  }
  if (!std::isfinite(best_dist)) fail(ErrorCode::kEmptyPolyhedron, "brute_force: no feasible candidate");
  return best;
}

}  // namespace polyx::qp
