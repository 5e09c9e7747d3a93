#pragma once

// Per-pixel class densities from distance vectors.

#include <string>
#include <vector>

#include "polyx/types.hpp"

namespace polyx::density {

enum class DistanceKind { kSignedPolyhedral, kCentroid };

struct DistanceVectors {
  Matrix values;  // pixels x K
  DistanceKind kind = DistanceKind::kSignedPolyhedral;

  void validate() const;
};

struct DensityMap {
  Matrix values;  // pixels x K, rows sum to 1
  std::vector<std::string> class_names;

  Index pixels() const { return values.rows(); }
  Index classes() const { return values.cols(); }
};

/// Row-wise softmax of -alpha * d.
DensityMap softmax_density(const DistanceVectors& d, double alpha = 1.0);

/// Row-wise normalised d^-p for centroid distances. A row with a zero
/// distance becomes the indicator of its first zero.
DensityMap inverse_distance_density(const DistanceVectors& d, double p = 1.0);

/// Divides each column by its population standard deviation.
DistanceVectors std_scale(const DistanceVectors& d);

/// Re-expresses each row in the basis made of, for every class k, the row
/// with the smallest k-th coordinate. Throws kIllConditioned when that basis
/// has condition number >= 1e8.
DistanceVectors basis_change(const DistanceVectors& d);

}  // namespace polyx::density
