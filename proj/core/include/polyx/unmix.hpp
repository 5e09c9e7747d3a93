#pragma once

// Abundance and probability maps for spectral images segmented into
// polyhedral classes.

#include <cstdint>
#include <optional>
#include <vector>

#include "polyx/classify.hpp"
#include "polyx/density.hpp"
#include "polyx/types.hpp"

namespace polyx::unmix {

struct SpectralImage {
  Index width = 0;
  Index height = 0;
  Matrix data;  // (width * height) x bands, pixel-major

  Index pixels() const { return data.rows(); }
  Index bands() const { return data.cols(); }
  void validate() const;
};

struct EndmemberSet {
  Matrix spectra;                          // K x bands
  std::vector<Index> source_pixel;         // K
};

/// pixels x K signed distances of every pixel to every class polyhedron.
Matrix signed_distances(const SpectralImage& img, const classify::PartitionModel& partition,
                        std::size_t threads = 1);

/// For each class the pixel with the most negative signed distance to it
/// (lowest index on ties). Needs K >= 2 and every class non-empty.
EndmemberSet extract_endmembers(const SpectralImage& img, const classify::PartitionModel& partition,
                                std::size_t threads = 1);
EndmemberSet extract_endmembers(const SpectralImage& img, const Matrix& distances);

/// Least-squares abundances a with M^T a ~= y per pixel (pixels x K). With
/// clip, rows are clipped to [0, 1] and renormalised to sum to 1.
/// Throws kIllConditioned ("endmembers linearly dependent") when M's
/// condition number exceeds 1e10 or K > bands.
Matrix abundances_from_endmembers(const SpectralImage& img, const EndmemberSet& endmembers,
                                  bool clip = false);

struct ProbabilityOptions {
  double alpha = 1.0;
  bool basis_change = false;
  std::size_t threads = 1;
};

/// Signed distances -> per-class std scaling -> (optional basis change) ->
/// softmax.
density::DensityMap probability_pipeline(const SpectralImage& img,
                                          const classify::PartitionModel& partition,
                                          const ProbabilityOptions& options = {});
density::DensityMap probability_from_distances(const Matrix& distances, const ProbabilityOptions& options = {});

struct RmseResult {
  double value = 0.0;
  std::vector<int> permutation;  // est column permutation[k] is compared with truth column k
};

/// Root mean squared error over all entries. With permute, the minimum over
/// all column permutations of est (K <= 8).
RmseResult rmse(const Matrix& est, const Matrix& truth, bool permute);

enum class Mode { kAbundance, kProbability };

struct RunConfig {
  classify::Provenance classifier = classify::Provenance::kGmmSvm;
  int classes = 3;
  Mode mode = Mode::kProbability;
  double alpha = 1.0;
  bool basis_change = false;
  bool clip_abundances = false;
  double gmm_subsample_ratio = 0.2;
  std::size_t threads = 1;
};

struct RunResult {
  std::uint64_t seed = 0;
  classify::PartitionModel partition;
  density::DensityMap map;
  std::optional<EndmemberSet> endmembers;
  std::optional<RmseResult> rmse;
  double classify_seconds = 0.0;
  double distance_seconds = 0.0;
  double total_seconds = 0.0;
};

/// Fits the classifier with `seed`, builds the partition and the requested
/// map; scores it against `truth` (pixels x K) when given.
RunResult run_once(const SpectralImage& img, const RunConfig& config, std::uint64_t seed,
                   const Matrix* truth = nullptr);

}  // namespace polyx::unmix
