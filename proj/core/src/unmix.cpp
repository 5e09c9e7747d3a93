#include "polyx/unmix.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "polyx/error.hpp"
#include "polyx/minnorm.hpp"
#include "polyx/parallel.hpp"
#include "polyx/rng.hpp"

namespace polyx::unmix {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void SpectralImage::validate() const {
  if (width < 1 || height < 1) fail(ErrorCode::kInput, "image must have at least one pixel");
  if (data.rows() != width * height) fail(ErrorCode::kInput, "image data rows != width * height");
  if (data.cols() < 1) fail(ErrorCode::kInput, "image needs at least one band");
  if (!data.allFinite()) fail(ErrorCode::kInput, "image contains NaN or Inf");
}

Matrix signed_distances(const SpectralImage& img, const classify::PartitionModel& partition,
                        std::size_t threads) {
  img.validate();
  if (partition.polyhedra.empty()) fail(ErrorCode::kInput, "partition has no classes");
  if (partition.dim() != img.bands()) fail(ErrorCode::kInput, "partition dimension != image bands");

  std::vector<minnorm::Solver> solvers;
  solvers.reserve(partition.polyhedra.size());
  for (const auto& p : partition.polyhedra) solvers.emplace_back(p);

  const Index k = static_cast<Index>(solvers.size());
  Matrix d(img.pixels(), k);
  parallel_for(static_cast<std::size_t>(img.pixels()), threads, [&](std::size_t i) {
    const Vector y = img.data.row(static_cast<Index>(i)).transpose();
    for (Index c = 0; c < k; ++c) {
      d(static_cast<Index>(i), c) = solvers[static_cast<std::size_t>(c)].signed_distance(y);
    }
  });
  return d;
}

EndmemberSet extract_endmembers(const SpectralImage& img, const classify::PartitionModel& partition,
                                std::size_t threads) {
  if (partition.classes < 2) fail(ErrorCode::kPrecondition, "extract_endmembers: needs K >= 2");
  return extract_endmembers(img, signed_distances(img, partition, threads));
}

EndmemberSet extract_endmembers(const SpectralImage& img, const Matrix& distances) {
  img.validate();
  const Index k = distances.cols();
  if (k < 2) fail(ErrorCode::kPrecondition, "extract_endmembers: needs K >= 2");
  if (distances.rows() != img.pixels()) fail(ErrorCode::kInput, "extract_endmembers: distance rows != pixels");

  EndmemberSet out;
  out.spectra.resize(k, img.bands());
  for (Index c = 0; c < k; ++c) {
    Index best = -1;
    for (Index i = 0; i < distances.rows(); ++i) {
      if (distances(i, c) > 0.0) continue;  // not in class c
      if (best < 0 || distances(i, c) < distances(best, c)) best = i;
    }
    if (best < 0) fail(ErrorCode::kPrecondition, "extract_endmembers: class " + std::to_string(c) + " is empty");
    out.spectra.row(c) = img.data.row(best);
    out.source_pixel.push_back(best);
  }
  return out;
}

Matrix abundances_from_endmembers(const SpectralImage& img, const EndmemberSet& endmembers, bool clip) {
  img.validate();
  const Matrix& m = endmembers.spectra;
  if (m.cols() != img.bands()) fail(ErrorCode::kInput, "abundances: endmember length != bands");
  if (m.rows() > m.cols()) {
    fail(ErrorCode::kIllConditioned, "abundances: endmembers linearly dependent (more classes than bands)");
  }
  const Matrix mt = m.transpose();  // bands x K
  const Eigen::JacobiSVD<Matrix> svd(mt);
  const Vector sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > 1e10) {
    fail(ErrorCode::kIllConditioned, "abundances: endmembers linearly dependent");
  }
  const Eigen::ColPivHouseholderQR<Matrix> qr(mt);
  Matrix a = qr.solve(img.data.transpose()).transpose();  // pixels x K
  if (clip) {
    a = a.cwiseMax(0.0).cwiseMin(1.0);
    for (Index i = 0; i < a.rows(); ++i) {
      const double s = a.row(i).sum();
      if (s > 0.0) a.row(i) /= s;
      else a.row(i).setConstant(1.0 / static_cast<double>(a.cols()));
    }
  }
  return a;
}

density::DensityMap probability_from_distances(const Matrix& distances, const ProbabilityOptions& options) {
  density::DistanceVectors d{distances, density::DistanceKind::kSignedPolyhedral};
  d = density::std_scale(d);
  if (options.basis_change) d = density::basis_change(d);
  return density::softmax_density(d, options.alpha);
}

density::DensityMap probability_pipeline(const SpectralImage& img, const classify::PartitionModel& partition,
                                         const ProbabilityOptions& options) {
  return probability_from_distances(signed_distances(img, partition, options.threads), options);
}

RmseResult rmse(const Matrix& est, const Matrix& truth, bool permute) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
    fail(ErrorCode::kInput, "rmse: shape mismatch");
  }
  const Index k = est.cols();
  if (permute && k > 8) fail(ErrorCode::kInput, "rmse: permutation search limited to K <= 8");
  const double count = static_cast<double>(est.size());

  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  auto score = [&](const std::vector<int>& p) {
    double sum = 0.0;
    for (Index c = 0; c < k; ++c) sum += (est.col(p[static_cast<std::size_t>(c)]) - truth.col(c)).squaredNorm();
    return std::sqrt(sum / count);
  };

  RmseResult best{score(perm), perm};
  if (!permute) return best;
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double s = score(perm);
    if (s < best.value) best = {s, perm};
  }
  return best;
}

RunResult run_once(const SpectralImage& img, const RunConfig& config, std::uint64_t seed, const Matrix* truth) {
  img.validate();
  const auto t0 = Clock::now();
  RunResult run;
  run.seed = seed;

  if (config.classifier == classify::Provenance::kKMeans) {
    const auto km = classify::kmeans_fit(img.data, config.classes, derive_seed(seed, "unmix-kmeans"));
    run.partition = classify::voronoi_partition(km);
  } else {
    classify::GmmOptions gopts;
    gopts.subsample_ratio = config.gmm_subsample_ratio;
    const auto gmm = classify::gmm_fit(img.data, config.classes, derive_seed(seed, "unmix-gmm"), gopts);
    const auto labels = gmm.predict(img.data);
    run.partition = classify::ovo_svm_partition(img.data, labels, config.classes, derive_seed(seed, "unmix-svm"));
    run.partition.centroids = gmm.means;
  }
  run.classify_seconds = seconds_since(t0);

  const auto t1 = Clock::now();
  const Matrix distances = signed_distances(img, run.partition, config.threads);
  run.distance_seconds = seconds_since(t1);

  if (config.mode == Mode::kAbundance) {
    run.endmembers = extract_endmembers(img, distances);
    run.map.values = abundances_from_endmembers(img, *run.endmembers, config.clip_abundances);
  } else {
    run.map = probability_from_distances(distances, {config.alpha, config.basis_change, config.threads});
  }
  if (truth != nullptr) run.rmse = rmse(run.map.values, *truth, true);
  run.total_seconds = seconds_since(t0);
  return run;
}

}  // namespace polyx::unmix
