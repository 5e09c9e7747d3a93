#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "polyx/bench.hpp"
#include "polyx/classify.hpp"
#include "polyx/error.hpp"
#include "polyx/geom.hpp"
#include "polyx/io.hpp"
#include "polyx/minnorm.hpp"
#include "polyx/parallel.hpp"
#include "polyx/unmix.hpp"

namespace polyx::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

Vector parse_point(const std::string& text) {
  std::string s = text;
  for (char& c : s) {
    if (c == '[' || c == ']' || c == ',') c = ' ';
  }
  std::istringstream in(s);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(token, &pos));
      if (pos != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      fail(ErrorCode::kInput, "--point: cannot parse '" + token + "'");
    }
  }
  if (values.empty()) fail(ErrorCode::kInput, "--point: no coordinates");
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Matrix load_maps(const fs::path& path) {
  if (path.extension() == ".csv") return io::parse_csv_matrix(io::read_text(path));
  return io::load_density(path).values;
}

std::string run_dir_name(int run) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%03d", run);
  return buf;
}

}  // namespace

int run_minnorm(const MinnormArgs& args) {
  const geom::PolyhedronH p = io::load_polyhedron(args.polyhedron);
  const Vector x = parse_point(args.point);
  minnorm::SolveOptions options;
  options.tol = args.tol;
  const auto r = minnorm::solve(p, x, options);
  json out{{"point", to_json(r.point)}, {"signed_distance", r.signed_distance}, {"iterations", r.iterations}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_reduce(const ReduceArgs& args) {
  const geom::PolyhedronH p = io::load_polyhedron(args.polyhedron);
  const geom::PolyhedronH m = geom::min_h_description(p);
  if (args.out.empty()) {
    std::cout << io::polyhedron_to_json(m);
  } else {
    io::save_polyhedron(m, args.out);
  }
  std::cerr << "kept " << m.size() << " of " << p.size() << " halfspaces\n";
  return 0;
}

int run_bench(const BenchArgs& args) {
  bench::BenchConfig cfg;
  cfg.mode = bench::mode_from_string(args.mode);
  cfg.n_fixed = args.n;
  cfg.k_values = bench::parse_k_values(args.k);
  cfg.reps = args.reps;
  cfg.seed = args.seed;
  cfg.time_budget_per_solve = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::duration<double>(args.timeout_s));
  const auto rows = bench::run_benchmark(cfg);

  if (args.out.empty()) {
    bench::write_csv(std::cout, rows);
  } else {
    std::ofstream out(args.out);
    if (!out) fail(ErrorCode::kIo, "cannot write '" + args.out + "'");
    bench::write_csv(out, rows);
  }
  std::fprintf(stderr, "%5s %4s %14s %14s %12s %12s\n", "k", "n", "exact_s", "approx_s", "err_mean", "err_std");
  for (const auto& s : bench::summarize(rows)) {
    std::fprintf(stderr, "%5zu %4ld %14.6e %14.6e %12.4e %12.4e%s\n", s.k, static_cast<long>(s.n),
                 s.mean_exact_ns * 1e-9, s.mean_approx_ns * 1e-9, s.mean_error, s.std_error,
                 s.truncated ? " truncated" : "");
  }
  return 0;
}

int run_unmix(const UnmixArgs& args) {
  if (args.runs < 1) fail(ErrorCode::kInput, "--runs must be >= 1");
  const unmix::SpectralImage img = io::load_image(args.image);

  unmix::RunConfig cfg;
  cfg.classifier = classify::provenance_from_string(args.classifier);
  cfg.classes = args.classes;
  if (args.mode == "abundance") cfg.mode = unmix::Mode::kAbundance;
  else if (args.mode == "probability") cfg.mode = unmix::Mode::kProbability;
  else fail(ErrorCode::kInput, "--mode must be abundance or probability");
  cfg.alpha = args.alpha;
  cfg.basis_change = args.basis_change;
  cfg.clip_abundances = args.clip_abundances;
  cfg.gmm_subsample_ratio = args.subsample_ratio;
  cfg.threads = resolve_threads(args.threads);

  Matrix truth;
  if (!args.truth.empty()) {
    truth = load_maps(args.truth);
    if (truth.rows() != img.pixels() || truth.cols() != cfg.classes) {
      fail(ErrorCode::kInput, "--truth: expected " + std::to_string(img.pixels()) + " x " +
                                  std::to_string(cfg.classes) + " values");
    }
  }

  const fs::path out_dir = args.out;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create '" + out_dir.string() + "': " + ec.message());

  const std::string stem = args.mode;
  json runs = json::array();
  std::ostringstream rmse_csv;
  rmse_csv << "run,seed,rmse,permutation,classify_s,distance_s,total_s\n";
  double rmse_sum = 0.0;

  for (int r = 0; r < args.runs; ++r) {
    const std::uint64_t seed = args.seed + static_cast<std::uint64_t>(r);
    const auto result = unmix::run_once(img, cfg, seed, truth.size() ? &truth : nullptr);
    const fs::path dir = args.runs == 1 ? out_dir : out_dir / run_dir_name(r);
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());

    io::save_density(result.map, img.width, img.height, dir / (stem + ".json"));
    io::save_partition(result.partition, dir / "partition.json");
    if (result.endmembers) {
      std::vector<std::string> header;
      for (Index b = 0; b < img.bands(); ++b) header.push_back("band" + std::to_string(b));
      io::write_csv(result.endmembers->spectra, dir / "endmembers.csv", header);
    }
    if (args.pgm) {
      for (Index k = 0; k < result.map.classes(); ++k) {
        io::write_pgm(result.map.values, k, img.width, img.height,
                      dir / (stem + "_" + std::to_string(k) + ".pgm"));
      }
    }

    json run{{"run", r},
             {"seed", seed},
             {"directory", fs::relative(dir, out_dir).string()},
             {"classify_seconds", result.classify_seconds},
             {"distance_seconds", result.distance_seconds},
             {"total_seconds", result.total_seconds}};
    if (result.endmembers) run["endmember_pixels"] = result.endmembers->source_pixel;
    if (result.rmse) {
      run["rmse"] = result.rmse->value;
      run["permutation"] = result.rmse->permutation;
      rmse_sum += result.rmse->value;
      std::string perm;
      for (std::size_t i = 0; i < result.rmse->permutation.size(); ++i) {
        perm += (i ? " " : "") + std::to_string(result.rmse->permutation[i]);
      }
      char line[256];
      std::snprintf(line, sizeof line, "%d,%llu,%.17g,%s,%.9g,%.9g,%.9g\n", r, static_cast<unsigned long long>(seed),
                    result.rmse->value, perm.c_str(), result.classify_seconds, result.distance_seconds,
                    result.total_seconds);
      rmse_csv << line;
      std::fprintf(stderr, "run %d seed %llu rmse %.6f (%.2f s)\n", r, static_cast<unsigned long long>(seed),
                   result.rmse->value, result.total_seconds);
    } else {
      std::fprintf(stderr, "run %d seed %llu (%.2f s)\n", r, static_cast<unsigned long long>(seed),
                   result.total_seconds);
    }
    runs.push_back(std::move(run));
  }

  if (truth.size()) {
    io::write_text(out_dir / "rmse.csv", rmse_csv.str());
    std::fprintf(stderr, "mean rmse %.6f over %d runs\n", rmse_sum / args.runs, args.runs);
  }

  json manifest{{"tool", "polyx"},
                {"version", POLYX_VERSION},
                {"image", fs::absolute(args.image).string()},
                {"width", img.width},
                {"height", img.height},
                {"bands", img.bands()},
                {"classifier", args.classifier},
                {"classes", cfg.classes},
                {"mode", args.mode},
                {"seed", args.seed},
                {"runs", args.runs},
                {"alpha", cfg.alpha},
                {"basis_change", cfg.basis_change},
                {"clip_abundances", cfg.clip_abundances},
                {"gmm_subsample_ratio", cfg.gmm_subsample_ratio},
                {"threads", cfg.threads},
                {"truth", args.truth.empty() ? json(nullptr) : json(fs::absolute(args.truth).string())},
                {"results", runs}};
  if (truth.size()) manifest["mean_rmse"] = rmse_sum / args.runs;
  io::write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

int run_rmse(const RmseArgs& args) {
  const Matrix est = load_maps(args.est);
  const Matrix truth = load_maps(args.truth);
  const auto r = unmix::rmse(est, truth, args.permute);
  json out{{"rmse", r.value}, {"permutation", r.permutation}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace polyx::cli
