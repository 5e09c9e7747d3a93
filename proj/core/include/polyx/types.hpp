#pragma once

#include <Eigen/Dense>

namespace polyx {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Absolute tolerance used by every geometric predicate unless overridden.
inline constexpr double kDefaultTol = 1e-9;

}  // namespace polyx
