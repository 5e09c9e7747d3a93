#pragma once

// Unsupervised linear classifiers whose classes are convex polyhedra:
// k-means (Voronoi cells) and a Gaussian mixture whose hard labels are
// separated pairwise by linear SVMs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polyx/geom.hpp"
#include "polyx/types.hpp"

namespace polyx::classify {

struct KMeansModel {
  Matrix centroids;  // K x n
  double inertia = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;

  /// Index of the nearest centroid (lowest index on ties) for each row.
  std::vector<int> predict(const Matrix& data) const;
};

struct GmmModel {
  Vector weights;                // K
  Matrix means;                  // K x n
  std::vector<Matrix> covariances;
  std::uint64_t seed = 0;
  std::vector<double> log_likelihood_trace;  // mean log-likelihood per EM iteration

  /// pixels x K posterior class probabilities.
  Matrix responsibilities(const Matrix& data) const;
  /// argmax responsibility per row.
  std::vector<int> predict(const Matrix& data) const;
  /// Mean per-point log-likelihood of `data`.
  double mean_log_likelihood(const Matrix& data) const;
};

enum class Provenance { kKMeans, kGmmSvm };
std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

/// K polyhedral classes. Class i is the intersection of the K-1 halfspaces
/// frontier(i, j), j != i, and frontier(j, i) is frontier(i, j) flipped.
struct PartitionModel {
  int classes = 0;
  std::vector<geom::PolyhedronH> polyhedra;
  Provenance provenance = Provenance::kKMeans;
  std::optional<Matrix> centroids;  // k-means centroids or GMM means

  /// Builds class polyhedra from the upper-triangular frontiers
  /// frontiers[i][j] (i < j), each bounding class i.
  static PartitionModel from_frontiers(int classes,
                                       const std::vector<std::vector<std::optional<geom::Halfspace>>>& frontiers,
                                       Provenance provenance);

  /// Halfspace of class i facing class j.
  const geom::Halfspace& frontier(int i, int j) const;
  Index dim() const { return polyhedra.front().dim(); }
};

struct KMeansOptions {
  int max_iterations = 300;
  double shift_tol = 1e-6;
};

/// Lloyd's algorithm seeded by k-means++. An emptied cluster is re-seeded at
/// the point farthest from its assigned centroid.
KMeansModel kmeans_fit(const Matrix& data, int k, std::uint64_t seed, const KMeansOptions& options = {});

/// Perpendicular-bisector halfspaces between every pair of centroids.
PartitionModel voronoi_partition(const KMeansModel& model);

struct GmmOptions {
  double subsample_ratio = 0.2;
  int max_iterations = 200;
  double rel_tol = 1e-6;
  double ridge_scale = 1e-6;  // times trace(data covariance) / n
};

/// EM with full covariances on a seeded random subsample, initialised from
/// k-means on that subsample.
GmmModel gmm_fit(const Matrix& data, int k, std::uint64_t seed, const GmmOptions& options = {});

struct SvmOptions {
  double c = 1.0;
  double tol = 1e-6;
  int max_epochs = 1000;
};

struct LinearSvm {
  Vector weights;
  double bias = 0.0;
  int epochs = 0;
  bool converged = false;
};

/// Soft-margin linear SVM (hinge loss) by dual coordinate descent, bias via
/// an augmented constant feature. labels are +1/-1. Rows are visited in a
/// fixed seed-determined order that does not change between epochs.
LinearSvm train_linear_svm(const Matrix& data, const std::vector<int>& labels, std::uint64_t seed,
                           const SvmOptions& options = {});

/// One-vs-one SVM frontiers on hard labels in [0, K).
PartitionModel ovo_svm_partition(const Matrix& data, const std::vector<int>& labels, int k,
                                 std::uint64_t seed, const SvmOptions& options = {});

}  // namespace polyx::classify
