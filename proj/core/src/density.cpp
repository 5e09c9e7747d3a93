#include "polyx/density.hpp"

#include <cmath>
#include <limits>

#include "polyx/error.hpp"

namespace polyx::density {

void DistanceVectors::validate() const {
  if (values.rows() < 1 || values.cols() < 1) fail(ErrorCode::kInput, "distance vectors are empty");
  if (!values.allFinite()) fail(ErrorCode::kInput, "distance vectors contain NaN or Inf");
}

DensityMap softmax_density(const DistanceVectors& d, double alpha) {
  d.validate();
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorCode::kInput, "softmax_density: alpha must be > 0");
  DensityMap out;
  out.values.resize(d.values.rows(), d.values.cols());
  for (Index i = 0; i < d.values.rows(); ++i) {
    const Eigen::RowVectorXd logits = -alpha * d.values.row(i);
    const Eigen::RowVectorXd e = (logits.array() - logits.maxCoeff()).exp().matrix();
    out.values.row(i) = e / e.sum();
  }
  return out;
}

DensityMap inverse_distance_density(const DistanceVectors& d, double p) {
  d.validate();
  if (d.kind != DistanceKind::kCentroid) {
    fail(ErrorCode::kInput, "inverse_distance_density expects centroid distances");
  }
  if (!(p > 0.0)) fail(ErrorCode::kInput, "inverse_distance_density: p must be > 0");
  if ((d.values.array() < 0.0).any()) fail(ErrorCode::kInput, "inverse_distance_density: negative distance");

  DensityMap out;
  out.values = Matrix::Zero(d.values.rows(), d.values.cols());
  for (Index i = 0; i < d.values.rows(); ++i) {
    Index zero = -1;
    for (Index k = 0; k < d.values.cols(); ++k) {
      if (d.values(i, k) == 0.0) {
        zero = k;
        break;
      }
    }
    if (zero >= 0) {
      out.values(i, zero) = 1.0;
      continue;
    }
    // Scale by the smallest distance first so d^-p cannot overflow.
    const double dmin = d.values.row(i).minCoeff();
    const Eigen::RowVectorXd w = (d.values.row(i).array() / dmin).pow(-p).matrix();
    out.values.row(i) = w / w.sum();
  }
  return out;
}

DistanceVectors std_scale(const DistanceVectors& d) {
  d.validate();
  if (d.values.rows() < 2) fail(ErrorCode::kInput, "std_scale: needs at least two pixels");
  DistanceVectors out{d.values, d.kind};
  for (Index k = 0; k < d.values.cols(); ++k) {
    const double mean = d.values.col(k).mean();
    const double var = (d.values.col(k).array() - mean).square().mean();
    const double sd = std::sqrt(var);
    if (sd <= 1e-12) {
      fail(ErrorCode::kInput, "std_scale: column " + std::to_string(k) + " has zero variance");
    }
    out.values.col(k) /= sd;
  }
  return out;
}

DistanceVectors basis_change(const DistanceVectors& d) {
  d.validate();
  if (d.kind != DistanceKind::kSignedPolyhedral) {
    fail(ErrorCode::kInput, "basis_change expects signed polyhedral distances");
  }
  const Index k = d.values.cols();
  Matrix basis(k, k);  // row j = selected row for class j
  for (Index j = 0; j < k; ++j) {
    Index arg = 0;
    d.values.col(j).minCoeff(&arg);
    basis.row(j) = d.values.row(arg);
  }
  const Eigen::JacobiSVD<Matrix> svd(basis);
  const Vector sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                              : std::numeric_limits<double>::infinity();
  if (!(cond < 1e8)) {
    fail(ErrorCode::kIllConditioned,
         "basis_change: selected basis is ill-conditioned; disable the basis change");
  }
  // Coordinates y with sum_j y_j * basis.row(j) = row, i.e. basis^T y = row.
  const Eigen::PartialPivLU<Matrix> lu(basis.transpose());
  DistanceVectors out{Matrix(d.values.rows(), k), d.kind};
  out.values = lu.solve(d.values.transpose()).transpose();
  return out;
}

}  // namespace polyx::density
