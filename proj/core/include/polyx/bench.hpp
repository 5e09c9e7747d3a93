#pragma once

// Random polyhedra and the exact-vs-approximate timing/accuracy harness.

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "polyx/geom.hpp"
#include "polyx/types.hpp"

namespace polyx::bench {

struct Instance {
  geom::PolyhedronH polyhedron;
  Vector query;
};

/// A polyhedron in R^n whose minimum H-description has exactly k halfspaces,
/// with the origin strictly inside, and a query point outside it.
///
/// Normals are uniform on the sphere and offsets uniform in [0.5, 1.5]. A
/// drawn halfspace is kept only if it is irredundant and leaves every
/// earlier one irredundant; otherwise it is redrawn. After `max_attempts`
/// failed draws for one halfspace the instance is restarted, and after
/// kGeneratorRestarts restarts kBudgetExceeded is thrown. The query is
/// r * u with u uniform on the sphere and r uniform in [2, 5], redrawn until
/// it falls outside.
inline constexpr int kGeneratorRestarts = 20;

Instance random_polyhedron(Index n, std::size_t k, std::uint64_t seed, int max_attempts = 1000);

enum class Mode { kFixedN, kNEqualsK };
std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct BenchConfig {
  Mode mode = Mode::kFixedN;
  Index n_fixed = 3;
  std::vector<std::size_t> k_values;
  int reps = 1000;
  std::uint64_t seed = 42;
  std::chrono::nanoseconds time_budget_per_solve = std::chrono::seconds(10);
  double approx_rel_tol = 1e-6;

  void validate() const;
};

struct BenchRow {
  Mode mode = Mode::kFixedN;
  Index n = 0;
  std::size_t k = 0;
  int rep = 0;
  std::int64_t exact_time_ns = 0;
  std::int64_t approx_time_ns = 0;
  double error_norm = 0.0;  // |y_approx - y_exact|, NaN when truncated
  bool truncated = false;
};

struct BenchSummary {
  std::size_t k = 0;
  Index n = 0;
  double mean_exact_ns = 0.0;
  double mean_approx_ns = 0.0;
  double median_exact_ns = 0.0;
  double mean_error = 0.0;
  double std_error = 0.0;
  int instances = 0;
  bool truncated = false;
};

/// Seed of instance `rep` at size k; stable across runs.
std::uint64_t instance_seed(std::uint64_t seed, Mode mode, std::size_t k, int rep);

std::vector<BenchRow> run_benchmark(const BenchConfig& config);
std::vector<BenchSummary> summarize(const std::vector<BenchRow>& rows);

/// Columns: mode,n,k,rep,exact_time_ns,approx_time_ns,error_norm,truncated
void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);

/// Parses "1..100", "1,2,5" or "1..20:5" (start..stop:step).
std::vector<std::size_t> parse_k_values(const std::string& text);

}  // namespace polyx::bench
