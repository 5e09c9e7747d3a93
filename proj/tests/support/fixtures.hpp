#pragma once

// Small builders shared by the unit tests.

#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "polyx/geom.hpp"

namespace polyx::testing {

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline geom::PolyhedronH unit_square() {
  using geom::Halfspace;
  return geom::PolyhedronH(2, {Halfspace(1, vec({1, 0})), Halfspace(0, vec({-1, 0})), Halfspace(1, vec({0, 1})),
                               Halfspace(0, vec({0, -1}))});
}

/// Random polyhedron with the origin inside; redundant constraints allowed.
inline geom::PolyhedronH random_raw(Eigen::Index n, int k, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> off(0.2, 2.0);
  std::vector<geom::Halfspace> hs;
  for (int i = 0; i < k; ++i) {
    Vector v(n);
    for (Eigen::Index c = 0; c < n; ++c) v(c) = g(rng);
    hs.emplace_back(off(rng), v);
  }
  return geom::PolyhedronH(n, std::move(hs));
}

}  // namespace polyx::testing
