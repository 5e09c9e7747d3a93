#include "polyx/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "polyx/error.hpp"
#include "polyx/rng.hpp"

namespace polyx::classify {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_data(const Matrix& data, const char* what) {
  if (data.rows() < 1 || data.cols() < 1) fail(ErrorCode::kInput, std::string(what) + ": empty data");
  if (!data.allFinite()) fail(ErrorCode::kInput, std::string(what) + ": non-finite data");
}

// pixels x K squared Euclidean distances.
Matrix squared_distances(const Matrix& data, const Matrix& centroids) {
  Matrix d = -2.0 * data * centroids.transpose();
  d.colwise() += data.rowwise().squaredNorm();
  d.rowwise() += centroids.rowwise().squaredNorm().transpose();
  return d.cwiseMax(0.0);
}

int argmin_row(const Matrix& m, Index r) {
  Index best = 0;
  for (Index j = 1; j < m.cols(); ++j) {
    if (m(r, j) < m(r, best)) best = j;
  }
  return static_cast<int>(best);
}

double log_sum_exp(const Eigen::Ref<const Vector>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

Matrix sample_covariance(const Matrix& data) {
  const Vector mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - mean.transpose();
  return centered.transpose() * centered / static_cast<double>(data.rows());
}

}  // namespace

std::vector<int> KMeansModel::predict(const Matrix& data) const {
  const Matrix d = squared_distances(data, centroids);
  std::vector<int> labels(static_cast<std::size_t>(data.rows()));
  for (Index i = 0; i < data.rows(); ++i) labels[static_cast<std::size_t>(i)] = argmin_row(d, i);
  return labels;
}

KMeansModel kmeans_fit(const Matrix& data, int k, std::uint64_t seed, const KMeansOptions& options) {
  check_data(data, "kmeans_fit");
  if (k < 1) fail(ErrorCode::kInput, "kmeans_fit: K must be >= 1");
  if (data.rows() < k) fail(ErrorCode::kPrecondition, "kmeans_fit: fewer points than clusters");

  const Index m = data.rows();
  Rng rng = make_rng(seed, "kmeans");
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // k-means++ seeding
  Matrix centroids(k, data.cols());
  centroids.row(0) = data.row(static_cast<Index>(rng() % static_cast<std::uint64_t>(m)));
  Vector nearest = (data.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Index pick = 0;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      pick = m - 1;
      for (Index i = 0; i < m; ++i) {
        acc += nearest(i);
        if (acc > target && nearest(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng() % static_cast<std::uint64_t>(m));
    }
    centroids.row(c) = data.row(pick);
    nearest = nearest.cwiseMin((data.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }

  KMeansModel model;
  model.seed = seed;
  std::vector<int> labels(static_cast<std::size_t>(m));
  for (int it = 1; it <= options.max_iterations; ++it) {
    model.iterations = it;
    const Matrix d = squared_distances(data, centroids);
    for (Index i = 0; i < m; ++i) labels[static_cast<std::size_t>(i)] = argmin_row(d, i);

    Matrix sums = Matrix::Zero(k, data.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < m; ++i) {
      const int l = labels[static_cast<std::size_t>(i)];
      sums.row(l) += data.row(i);
      ++counts[static_cast<std::size_t>(l)];
    }
    Matrix next(k, data.cols());
    std::vector<bool> taken(static_cast<std::size_t>(m), false);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        next.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: move it to the point worst served by its centroid.
      Index far = -1;
      double far_d = -1.0;
      for (Index i = 0; i < m; ++i) {
        const double di = d(i, labels[static_cast<std::size_t>(i)]);
        if (!taken[static_cast<std::size_t>(i)] && di > far_d) {
          far_d = di;
          far = i;
        }
      }
      taken[static_cast<std::size_t>(far)] = true;
      next.row(c) = data.row(far);
    }
    const double shift = (next - centroids).rowwise().norm().maxCoeff();
    centroids = next;
    if (shift <= options.shift_tol) break;
  }

  model.centroids = centroids;
  const Matrix d = squared_distances(data, centroids);
  model.inertia = d.rowwise().minCoeff().sum();
  return model;
}

std::string to_string(Provenance p) { return p == Provenance::kKMeans ? "kmeans" : "gmm-svm"; }

Provenance provenance_from_string(const std::string& s) {
  if (s == "kmeans") return Provenance::kKMeans;
  if (s == "gmm-svm") return Provenance::kGmmSvm;
  fail(ErrorCode::kInput, "unknown classifier provenance '" + s + "'");
}

PartitionModel PartitionModel::from_frontiers(
    int classes, const std::vector<std::vector<std::optional<geom::Halfspace>>>& frontiers,
    Provenance provenance) {
  if (classes < 2) fail(ErrorCode::kInput, "partition needs at least two classes");
  PartitionModel model;
  model.classes = classes;
  model.provenance = provenance;
  for (int i = 0; i < classes; ++i) {
    std::vector<geom::Halfspace> hs;
    Index dim = 0;
    for (int j = 0; j < classes; ++j) {
      if (j == i) continue;
      const auto& f = i < j ? frontiers[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                            : frontiers[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      if (!f) fail(ErrorCode::kInput, "partition: missing frontier");
      hs.push_back(i < j ? *f : f->flipped());
      dim = f->dim();
    }
    model.polyhedra.emplace_back(dim, std::move(hs));
  }
  return model;
}

const geom::Halfspace& PartitionModel::frontier(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i >= classes || j >= classes) {
    fail(ErrorCode::kInput, "frontier: invalid class pair");
  }
  return polyhedra[static_cast<std::size_t>(i)][static_cast<std::size_t>(j < i ? j : j - 1)];
}

PartitionModel voronoi_partition(const KMeansModel& model) {
  const int k = static_cast<int>(model.centroids.rows());
  std::vector<std::vector<std::optional<geom::Halfspace>>> frontiers(
      static_cast<std::size_t>(k), std::vector<std::optional<geom::Halfspace>>(static_cast<std::size_t>(k)));
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const Vector ci = model.centroids.row(i).transpose();
      const Vector cj = model.centroids.row(j).transpose();
      const Vector diff = cj - ci;
      if (diff.norm() <= 1e-12) fail(ErrorCode::kInput, "voronoi_partition: coincident centroids");
      const Vector v = diff / diff.norm();
      frontiers[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          geom::Halfspace(0.5 * (ci + cj).dot(v), v);
    }
  }
  PartitionModel p = PartitionModel::from_frontiers(k, frontiers, Provenance::kKMeans);
  p.centroids = model.centroids;
  return p;
}

Matrix GmmModel::responsibilities(const Matrix& data) const {
  const Index k = weights.size();
  const Index n = means.cols();
  Matrix log_r(data.rows(), k);
  for (Index c = 0; c < k; ++c) {
    const Eigen::LLT<Matrix> llt(covariances[static_cast<std::size_t>(c)]);
    const Matrix l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    const Matrix centered = (data.rowwise() - means.row(c)).transpose();
    const Matrix solved = llt.matrixL().solve(centered);
    const Vector maha = solved.colwise().squaredNorm().transpose();
    log_r.col(c) = ((-0.5 * (static_cast<double>(n) * kLog2Pi + log_det) + std::log(weights(c))) -
                    0.5 * maha.array()).matrix();
  }
  for (Index i = 0; i < data.rows(); ++i) {
    const double lse = log_sum_exp(log_r.row(i).transpose());
    log_r.row(i) = (log_r.row(i).array() - lse).exp().matrix();
  }
  return log_r;
}

double GmmModel::mean_log_likelihood(const Matrix& data) const {
  const Index k = weights.size();
  const Index n = means.cols();
  Matrix log_p(data.rows(), k);
  for (Index c = 0; c < k; ++c) {
    const Eigen::LLT<Matrix> llt(covariances[static_cast<std::size_t>(c)]);
    const Matrix l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    const Matrix solved = llt.matrixL().solve((data.rowwise() - means.row(c)).transpose());
    log_p.col(c) = ((-0.5 * (static_cast<double>(n) * kLog2Pi + log_det) + std::log(weights(c))) -
                    0.5 * solved.colwise().squaredNorm().transpose().array()).matrix();
  }
  double total = 0.0;
  for (Index i = 0; i < data.rows(); ++i) total += log_sum_exp(log_p.row(i).transpose());
  return total / static_cast<double>(data.rows());
}

std::vector<int> GmmModel::predict(const Matrix& data) const {
  const Matrix r = responsibilities(data);
  std::vector<int> labels(static_cast<std::size_t>(data.rows()));
  for (Index i = 0; i < data.rows(); ++i) {
    Index best = 0;
    r.row(i).maxCoeff(&best);
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

GmmModel gmm_fit(const Matrix& data, int k, std::uint64_t seed, const GmmOptions& options) {
  check_data(data, "gmm_fit");
  if (k < 1) fail(ErrorCode::kInput, "gmm_fit: K must be >= 1");
  if (!(options.subsample_ratio > 0.0 && options.subsample_ratio <= 1.0)) {
    fail(ErrorCode::kInput, "gmm_fit: subsample ratio must be in (0, 1]");
  }
  const Index total = data.rows();
  const Index m = static_cast<Index>(std::floor(static_cast<double>(total) * options.subsample_ratio));
  if (m < 10 * k) fail(ErrorCode::kPrecondition, "gmm_fit: subsample smaller than 10 points per component");

  std::vector<Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng = make_rng(seed, "gmm-subsample");
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(static_cast<std::size_t>(m));
  std::sort(order.begin(), order.end());
  Matrix sample(m, data.cols());
  for (Index i = 0; i < m; ++i) sample.row(i) = data.row(order[static_cast<std::size_t>(i)]);

  const Index n = data.cols();
  const double ridge = std::max(options.ridge_scale * sample_covariance(sample).trace() / static_cast<double>(n),
                                1e-12);

  const KMeansModel init = kmeans_fit(sample, k, derive_seed(seed, "gmm-init"));
  const std::vector<int> init_labels = init.predict(sample);

  GmmModel model;
  model.seed = seed;
  model.weights = Vector::Zero(k);
  model.means = init.centroids;
  model.covariances.assign(static_cast<std::size_t>(k), Matrix::Zero(n, n));
  {
    Matrix resp = Matrix::Zero(m, k);
    for (Index i = 0; i < m; ++i) resp(i, init_labels[static_cast<std::size_t>(i)]) = 1.0;
    for (Index c = 0; c < k; ++c) {
      const double nk = resp.col(c).sum();
      model.weights(c) = std::max(nk, 1.0);
      Matrix centered = sample.rowwise() - model.means.row(c);
      Matrix cov = centered.transpose() * resp.col(c).asDiagonal() * centered / std::max(nk, 1.0);
      cov.diagonal().array() += ridge;
      model.covariances[static_cast<std::size_t>(c)] = cov;
    }
    model.weights /= model.weights.sum();
  }

  double previous = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    // E-step
    Matrix resp = model.responsibilities(sample);
    const double ll = model.mean_log_likelihood(sample);
    model.log_likelihood_trace.push_back(ll);
    if (std::isfinite(previous) && std::abs(ll - previous) <= options.rel_tol * std::abs(ll)) break;
    previous = ll;

    // M-step
    for (Index c = 0; c < k; ++c) {
      const double nk = resp.col(c).sum();
      if (nk / static_cast<double>(m) < 1e-8) {
        // Collapsed component: restart it on the least likely point.
        Index worst = 0;
        resp.rowwise().maxCoeff().minCoeff(&worst);
        model.means.row(c) = sample.row(worst);
        Matrix cov = sample_covariance(sample);
        cov.diagonal().array() += ridge;
        model.covariances[static_cast<std::size_t>(c)] = cov;
        model.weights(c) = 1.0 / static_cast<double>(k);
        continue;
      }
      model.weights(c) = nk / static_cast<double>(m);
      model.means.row(c) = (resp.col(c).transpose() * sample) / nk;
      const Matrix centered = sample.rowwise() - model.means.row(c);
      Matrix cov = centered.transpose() * resp.col(c).asDiagonal() * centered / nk;
      cov = 0.5 * (cov + cov.transpose());
      cov.diagonal().array() += ridge;
      model.covariances[static_cast<std::size_t>(c)] = cov;
    }
    model.weights /= model.weights.sum();
  }
  return model;
}

LinearSvm train_linear_svm(const Matrix& data, const std::vector<int>& labels, std::uint64_t seed,
                           const SvmOptions& options) {
  check_data(data, "train_linear_svm");
  const Index m = data.rows();
  const Index n = data.cols();
  if (static_cast<Index>(labels.size()) != m) fail(ErrorCode::kInput, "train_linear_svm: label count mismatch");

  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng = make_rng(seed, "svm-order");
  std::shuffle(order.begin(), order.end(), rng);

  Vector w = Vector::Zero(n + 1);  // last entry multiplies the constant feature
  Vector alpha = Vector::Zero(m);
  Vector diag(m);
  for (Index i = 0; i < m; ++i) diag(i) = data.row(i).squaredNorm() + 1.0;

  LinearSvm svm;
  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    svm.epochs = epoch;
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (const Index i : order) {
      const double yi = labels[static_cast<std::size_t>(i)] > 0 ? 1.0 : -1.0;
      const double margin = data.row(i).dot(w.head(n)) + w(n);
      const double g = yi * margin - 1.0;
      double pg = g;
      if (alpha(i) <= 0.0) pg = std::min(g, 0.0);
      else if (alpha(i) >= options.c) pg = std::max(g, 0.0);
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = alpha(i);
        alpha(i) = std::clamp(old - g / diag(i), 0.0, options.c);
        const double step = (alpha(i) - old) * yi;
        w.head(n) += step * data.row(i).transpose();
        w(n) += step;
      }
    }
    if (pg_max - pg_min <= options.tol) {
      svm.converged = true;
      break;
    }
  }
  svm.weights = w.head(n);
  svm.bias = w(n);
  return svm;
}

PartitionModel ovo_svm_partition(const Matrix& data, const std::vector<int>& labels, int k,
                                 std::uint64_t seed, const SvmOptions& options) {
  check_data(data, "ovo_svm_partition");
  if (static_cast<Index>(labels.size()) != data.rows()) {
    fail(ErrorCode::kInput, "ovo_svm_partition: label count mismatch");
  }
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int l = labels[i];
    if (l < 0 || l >= k) fail(ErrorCode::kInput, "ovo_svm_partition: label out of range");
    members[static_cast<std::size_t>(l)].push_back(static_cast<Index>(i));
  }
  for (int c = 0; c < k; ++c) {
    if (members[static_cast<std::size_t>(c)].size() < 2) {
      fail(ErrorCode::kPrecondition, "ovo_svm_partition: class " + std::to_string(c) + " has fewer than 2 points");
    }
  }

  std::vector<std::vector<std::optional<geom::Halfspace>>> frontiers(
      static_cast<std::size_t>(k), std::vector<std::optional<geom::Halfspace>>(static_cast<std::size_t>(k)));
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const auto& a = members[static_cast<std::size_t>(i)];
      const auto& b = members[static_cast<std::size_t>(j)];
      Matrix pair(static_cast<Index>(a.size() + b.size()), data.cols());
      std::vector<int> y;
      y.reserve(a.size() + b.size());
      Index r = 0;
      for (const Index idx : a) {
        pair.row(r++) = data.row(idx);
        y.push_back(-1);  // class i ends up on the <= side
      }
      for (const Index idx : b) {
        pair.row(r++) = data.row(idx);
        y.push_back(+1);
      }
      const std::uint64_t pair_seed = derive_seed(seed, "ovo-" + std::to_string(i) + "-" + std::to_string(j));
      const LinearSvm svm = train_linear_svm(pair, y, pair_seed, options);
      if (svm.weights.norm() <= 1e-12) {
        fail(ErrorCode::kIllConditioned, "ovo_svm_partition: zero-norm separator for classes " +
                                             std::to_string(i) + "/" + std::to_string(j));
      }
      // w.x + b <= 0  <=>  w.x <= -b
      frontiers[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = geom::Halfspace(-svm.bias, svm.weights);
    }
  }
  return PartitionModel::from_frontiers(k, frontiers, Provenance::kGmmSvm);
}

}  // namespace polyx::classify
