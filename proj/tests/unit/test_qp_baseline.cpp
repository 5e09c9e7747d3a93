#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "polyx/bench.hpp"
#include "polyx/error.hpp"
#include "polyx/geom.hpp"
#include "polyx/qp_baseline.hpp"

using polyx::Error;
using polyx::ErrorCode;
using polyx::Matrix;
using polyx::Vector;
using polyx::geom::Halfspace;
using polyx::geom::PolyhedronH;
using polyx::testing::random_raw;
using polyx::testing::unit_square;
using polyx::testing::vec;
namespace qp = polyx::qp;

TEST_CASE("solve_approx examples") {
  SUBCASE("single violated constraint") {
    const qp::QpProblem p{(Matrix(1, 3) << 1, 0, 0).finished(), vec({-1})};
    const auto r = qp::solve_approx(p);
    CHECK(r.converged);
    CHECK((r.point - vec({-1, 0, 0})).norm() < 1e-4);
  }
  SUBCASE("origin feasible") {
    const qp::QpProblem p{(Matrix(2, 2) << 1, 0, 0, 1).finished(), vec({1, 2})};
    const auto r = qp::solve_approx(p);
    CHECK(r.converged);
    CHECK(r.point.norm() < 1e-4);
  }
  SUBCASE("iteration cap flags non-convergence") {
    const qp::QpProblem p{(Matrix(2, 2) << 1, 0, 0, 1).finished(), vec({-1, -1})};
    qp::AdmmSettings s;
    s.max_iter = 1;
    s.rel_tol = 1e-12;
    s.abs_tol = 1e-12;
    const auto r = qp::solve_approx(p, s);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.point.allFinite());
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(qp::solve_approx(qp::QpProblem{Matrix(1, 2), vec({1, 2})}), Error);
    Matrix bad = (Matrix(1, 1) << std::nan("")).finished();
    CHECK_THROWS_AS(qp::solve_approx(qp::QpProblem{bad, vec({1})}), Error);
  }
}

TEST_CASE("centered problem") {
  const auto p = qp::QpProblem::centered(unit_square(), vec({2, 2}));
  const auto r = qp::solve_approx(p, 1e-8, 100000);
  CHECK((r.point + vec({2, 2}) - vec({1, 1})).norm() < 1e-3);
}

TEST_CASE("brute_force examples") {
  CHECK((qp::brute_force(unit_square(), vec({2, 2})) - vec({1, 1})).norm() < 1e-12);
  CHECK((qp::brute_force(unit_square(), vec({2, 0.5})) - vec({1, 0.5})).norm() < 1e-12);
  CHECK((qp::brute_force(unit_square(), vec({0.3, 0.5})) - vec({0.3, 0.5})).norm() < 1e-12);
  const PolyhedronH tri(2, {Halfspace(0, vec({-1, 0})), Halfspace(0, vec({0, -1})), Halfspace(1, vec({1, 1}))});
  CHECK((qp::brute_force(tri, vec({1, 1})) - vec({0.5, 0.5})).norm() < 1e-12);
}

TEST_CASE("brute_force errors") {
  const PolyhedronH empty(1, {Halfspace(0, vec({1})), Halfspace(-1, vec({-1}))});
  try {
    qp::brute_force(empty, vec({5}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyPolyhedron);
  }
  CHECK(qp::brute_force_subset_count(3, 2) == 1 + 3 + 3);
  CHECK(qp::brute_force_subset_count(40, 10) > qp::kBruteForceSubsetLimit);
  std::mt19937_64 rng(1);
  const PolyhedronH big = random_raw(10, 40, rng);
  try {
    qp::brute_force(big, Vector::Constant(10, 5.0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBudgetExceeded);
  }
}

TEST_CASE("brute_force is a KKT point") {
  // At the minimizer y of |y - x| over P the residual x - y lies in the cone
  // of the normals of the active constraints (non-negative multipliers).
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index n = 2 + t % 3;
    const PolyhedronH p = random_raw(n, 2 + t % 6, rng);
    Vector x(n);
    for (Eigen::Index c = 0; c < n; ++c) x(c) = g(rng);
    const Vector y = qp::brute_force(p, x);
    CAPTURE(t);
    CHECK(polyx::geom::contains(p, y, 1e-9));
    std::vector<Eigen::Index> active;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (std::abs(p[i].normal().dot(y) - p[i].offset()) < 1e-8) active.push_back(static_cast<Eigen::Index>(i));
    }
    const Vector r = x - y;
    if (active.empty()) {
      CHECK(r.norm() < 1e-9);
      continue;
    }
    Matrix a(n, static_cast<Eigen::Index>(active.size()));
    for (std::size_t j = 0; j < active.size(); ++j) a.col(static_cast<Eigen::Index>(j)) = p.normals().row(active[j]);
    const Vector mu = polyx::testing::nnls(a, r);
    CHECK((a * mu - r).norm() < 1e-7);
  }
}

TEST_CASE("approximation error shrinks as tolerance tightens") {
  std::vector<polyx::bench::Instance> instances;
  for (int i = 0; i < 20; ++i) instances.push_back(polyx::bench::random_polyhedron(3, 20, 100 + i));
  std::vector<Vector> exact;
  for (const auto& inst : instances) exact.push_back(qp::brute_force(inst.polyhedron, inst.query));

  double previous = 1e300;
  double first = 0;
  double last = 0;
  for (double tol : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
    qp::AdmmSettings s;
    s.rel_tol = tol;
    s.abs_tol = tol;
    s.max_iter = 200000;
    double mean = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto p = qp::QpProblem::centered(instances[i].polyhedron, instances[i].query);
      const auto r = qp::solve_approx(p, s);
      mean += (r.point + instances[i].query - exact[i]).norm() / static_cast<double>(instances.size());
    }
    CAPTURE(tol);
    CHECK(mean <= 2.0 * previous);
    previous = mean;
    if (tol == 1e-3) first = mean;
    last = mean;
  }
  CHECK(last < 1e-2 * first);
}
