#pragma once

// Subcommands of the polyx tool. Each returns the process exit code and
// reports failures by throwing polyx::Error.

#include <cstddef>
#include <cstdint>
#include <string>

namespace polyx::cli {

struct MinnormArgs {
  std::string polyhedron;
  std::string point;
  double tol = 1e-9;
};

struct ReduceArgs {
  std::string polyhedron;
  std::string out;  // empty: stdout
};

struct BenchArgs {
  std::string mode = "fixed-n";
  std::string k = "1..100";
  int n = 3;
  int reps = 1000;
  std::uint64_t seed = 42;
  double timeout_s = 10.0;
  std::string out;  // empty: stdout
};

struct UnmixArgs {
  std::string image;
  std::string classifier = "gmm-svm";
  int classes = 3;
  std::string mode = "probability";
  std::uint64_t seed = 0;
  int runs = 1;
  double alpha = 1.0;
  bool basis_change = false;
  bool clip_abundances = false;
  double subsample_ratio = 0.2;
  std::string truth;
  std::string out = "polyx_out";
  bool pgm = false;
  std::size_t threads = 0;
};

struct RmseArgs {
  std::string est;
  std::string truth;
  bool permute = false;
};

int run_minnorm(const MinnormArgs& args);
int run_reduce(const ReduceArgs& args);
int run_bench(const BenchArgs& args);
int run_unmix(const UnmixArgs& args);
int run_rmse(const RmseArgs& args);

}  // namespace polyx::cli
