#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "polyx/error.hpp"

namespace {

int report(polyx::ErrorCode code, const std::string& message) {
  nlohmann::json j{{"error", std::string(polyx::to_string(code))}, {"message", message}};
  std::cerr << j.dump() << '\n';
  return static_cast<int>(code);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace polyx::cli;
  CLI::App app{"Exact minimum-norm points, polyhedral signed distances and spectral unmixing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", POLYX_VERSION);

  MinnormArgs mn;
  auto* minnorm = app.add_subcommand("minnorm", "Minimum-norm point and signed distance from a point to a polyhedron");
  minnorm->add_option("--polyhedron", mn.polyhedron, "Polyhedron JSON file")->required()->check(CLI::ExistingFile);
  minnorm->add_option("--point", mn.point, "Query point, e.g. \"1,2\" or \"[1,2]\"")->required();
  minnorm->add_option("--tol", mn.tol, "Containment tolerance")->capture_default_str();

  ReduceArgs rd;
  auto* reduce = app.add_subcommand("reduce", "Minimum H-description of a polyhedron");
  reduce->add_option("--polyhedron", rd.polyhedron, "Polyhedron JSON file")->required()->check(CLI::ExistingFile);
  reduce->add_option("--out", rd.out, "Output JSON file (default: stdout)");

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "Time the exact solver against the ADMM baseline");
  bench->add_option("--mode", bn.mode, "fixed-n or n-eq-k")->capture_default_str();
  bench->add_option("--k", bn.k, "k values: 1..100, 1,2,5 or 1..100:10")->capture_default_str();
  bench->add_option("--n", bn.n, "Dimension in fixed-n mode")->capture_default_str();
  bench->add_option("--reps", bn.reps, "Instances per k")->capture_default_str();
  bench->add_option("--seed", bn.seed, "Seed")->capture_default_str();
  bench->add_option("--timeout", bn.timeout_s, "Per-solve time budget in seconds")->capture_default_str();
  bench->add_option("--out", bn.out, "CSV output (default: stdout)");

  UnmixArgs um;
  auto* unmix = app.add_subcommand("unmix", "Abundance or probability maps of a spectral image");
  unmix->add_option("--image", um.image, "Image header JSON or CSV")->required()->check(CLI::ExistingFile);
  unmix->add_option("--classifier", um.classifier, "kmeans or gmm-svm")->capture_default_str();
  unmix->add_option("--classes", um.classes, "Number of classes")->capture_default_str();
  unmix->add_option("--mode", um.mode, "abundance or probability")->capture_default_str();
  unmix->add_option("--seed", um.seed, "Seed of the first run; run r uses seed + r")->capture_default_str();
  unmix->add_option("--runs", um.runs, "Number of runs")->capture_default_str();
  unmix->add_option("--alpha", um.alpha, "Softmax sharpness")->capture_default_str();
  unmix->add_flag("--basis-change", um.basis_change, "Re-express distances in the basis of deepest rows");
  unmix->add_flag("--clip-abundances", um.clip_abundances, "Clip abundances to [0,1] and renormalize");
  unmix->add_option("--subsample", um.subsample_ratio, "GMM training subsample ratio")->capture_default_str();
  unmix->add_option("--truth", um.truth, "Ground truth maps (density header JSON or CSV)");
  unmix->add_option("--out", um.out, "Output directory")->capture_default_str();
  unmix->add_flag("--pgm", um.pgm, "Also write one PGM per class");
  unmix->add_option("--threads", um.threads, "Worker threads (0: all cores; POLYX_THREADS overrides)");

  RmseArgs rm;
  auto* rmse = app.add_subcommand("rmse", "RMSE between two maps");
  rmse->add_option("--est", rm.est, "Estimated maps (density header JSON or CSV)")->required()->check(CLI::ExistingFile);
  rmse->add_option("--truth", rm.truth, "Ground truth maps")->required()->check(CLI::ExistingFile);
  rmse->add_flag("--permute", rm.permute, "Minimize over class permutations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return report(polyx::ErrorCode::kInput, e.what());
  }

  try {
    if (*minnorm) return run_minnorm(mn);
    if (*reduce) return run_reduce(rd);
    if (*bench) return run_bench(bn);
    if (*unmix) return run_unmix(um);
    if (*rmse) return run_rmse(rm);
  } catch (const polyx::Error& e) {
    return report(e.code(), e.what());
  } catch (const std::exception& e) {
    return report(polyx::ErrorCode::kInternal, e.what());
  }
  return report(polyx::ErrorCode::kInput, "no subcommand");
}
