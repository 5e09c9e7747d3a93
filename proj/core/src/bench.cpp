#include "polyx/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "polyx/error.hpp"
#include "polyx/lpfeas.hpp"
#include "polyx/minnorm.hpp"
#include "polyx/qp_baseline.hpp"
#include "polyx/rng.hpp"

namespace polyx::bench {
namespace {

using Clock = std::chrono::steady_clock;

Vector random_unit(Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  do {
    for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

// Strict-feasibility witness for halfspace j of (normals, offsets): a point
// violating j while strictly inside every other halfspace, if one exists.
std::optional<Vector> irredundancy_witness(const Matrix& normals, const Vector& offsets, Index j) {
  lp::LinearSystem sys{normals, offsets};
  sys.rows.row(j) *= -1.0;
  sys.rhs(j) *= -1.0;
  auto sol = lp::solve_max_slack(sys);
  if (sol.slack <= lp::kStrictTol) return std::nullopt;
  return std::move(sol.point);
}

}  // namespace

Instance random_polyhedron(Index n, std::size_t k, std::uint64_t seed, int max_attempts) {
  if (n < 1 || k < 1) fail(ErrorCode::kInput, "random_polyhedron: needs n >= 1 and k >= 1");
  Rng rng = make_rng(seed, "polyhedron");
  std::uniform_real_distribution<double> offset_dist(0.5, 1.5);

  // Every accepted halfspace keeps a witness of its irredundancy. A new draw
  // only invalidates witnesses it cuts off, so most draws cost a single LP.
  // A halfspace that cannot be placed restarts the whole instance.
  Matrix normals(static_cast<Index>(k), n);
  Vector offsets(static_cast<Index>(k));
  bool complete = false;
  for (int restart = 0; restart < kGeneratorRestarts && !complete; ++restart) {
    std::vector<Vector> witnesses;
    complete = true;
    for (std::size_t have = 0; have < k && complete; ++have) {
      const Index rows = static_cast<Index>(have) + 1;
      const Index last = rows - 1;
      bool accepted = false;
      for (int attempt = 0; attempt < max_attempts && !accepted; ++attempt) {
        normals.row(last) = random_unit(n, rng).transpose();
        offsets(last) = offset_dist(rng);
        const auto a = normals.topRows(rows);
        const auto b = offsets.head(rows);

        auto own = irredundancy_witness(a, b, last);
        if (!own) continue;
        std::vector<Vector> updated = witnesses;
        accepted = true;
        for (Index j = 0; j < last && accepted; ++j) {
          const Vector& w = updated[static_cast<std::size_t>(j)];
          if (w.dot(normals.row(last)) < offsets(last) - lp::kStrictTol) continue;
          auto fresh = irredundancy_witness(a, b, j);
          if (fresh) updated[static_cast<std::size_t>(j)] = std::move(*fresh);
          else accepted = false;
        }
        if (accepted) {
          updated.push_back(std::move(*own));
          witnesses = std::move(updated);
        }
      }
      complete = accepted;
    }
  }
  if (!complete) {
    fail(ErrorCode::kBudgetExceeded, "random_polyhedron: cannot place " + std::to_string(k) +
                                         " support hyperplanes in dimension " + std::to_string(n));
  }

  geom::PolyhedronH p = geom::PolyhedronH::from_matrix(normals, offsets);
  std::uniform_real_distribution<double> radius(2.0, 5.0);
  for (int attempt = 0; attempt < 100 * max_attempts; ++attempt) {
    const Vector q = radius(rng) * random_unit(n, rng);
    if (!geom::contains(p, q, 0.0)) return {std::move(p), q};
  }
  fail(ErrorCode::kBudgetExceeded, "random_polyhedron: no query point outside the polyhedron");
}

std::string to_string(Mode m) { return m == Mode::kFixedN ? "fixed-n" : "n-eq-k"; }

Mode mode_from_string(const std::string& s) {
  if (s == "fixed-n") return Mode::kFixedN;
  if (s == "n-eq-k" || s == "n-equals-k") return Mode::kNEqualsK;
  fail(ErrorCode::kInput, "unknown bench mode '" + s + "'");
}

void BenchConfig::validate() const {
  if (reps < 1) fail(ErrorCode::kInput, "bench: reps must be >= 1");
  if (k_values.empty()) fail(ErrorCode::kInput, "bench: no k values");
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    if (k_values[i] < 1) fail(ErrorCode::kInput, "bench: k must be >= 1");
    if (i > 0 && k_values[i] <= k_values[i - 1]) fail(ErrorCode::kInput, "bench: k values must increase");
  }
  if (mode == Mode::kFixedN && n_fixed < 1) fail(ErrorCode::kInput, "bench: n must be >= 1");
}

std::uint64_t instance_seed(std::uint64_t seed, Mode mode, std::size_t k, int rep) {
  std::uint64_t state = derive_seed(seed, to_string(mode));
  state ^= (static_cast<std::uint64_t>(k) << 32) ^ static_cast<std::uint64_t>(rep);
  return splitmix64(state);
}

std::vector<BenchRow> run_benchmark(const BenchConfig& config) {
  config.validate();
  std::vector<BenchRow> rows;
  for (const std::size_t k : config.k_values) {
    const Index n = config.mode == Mode::kFixedN ? config.n_fixed : static_cast<Index>(k);
    for (int rep = 0; rep < config.reps; ++rep) {
      const Instance inst = random_polyhedron(n, k, instance_seed(config.seed, config.mode, k, rep));
      BenchRow row;
      row.mode = config.mode;
      row.n = n;
      row.k = k;
      row.rep = rep;

      // The exact solver is timed end to end, irredundancy pass included.
      minnorm::SolveOptions opts;
      opts.verify = false;
      const auto t0 = Clock::now();
      opts.deadline = t0 + config.time_budget_per_solve;
      Vector exact;
      try {
        exact = minnorm::solve(inst.polyhedron, inst.query, opts).point;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kBudgetExceeded) throw;
        row.truncated = true;
      }
      const auto t1 = Clock::now();
      row.exact_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();

      const auto problem = qp::QpProblem::centered(inst.polyhedron, inst.query);
      const auto t2 = Clock::now();
      const auto approx = qp::solve_approx(problem, config.approx_rel_tol);
      const auto t3 = Clock::now();
      row.approx_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t3 - t2).count();

      row.error_norm = row.truncated ? std::numeric_limits<double>::quiet_NaN()
                                     : (inst.query + approx.point - exact).norm();
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<BenchSummary> summarize(const std::vector<BenchRow>& rows) {
  std::vector<BenchSummary> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].k == rows[i].k && rows[j].mode == rows[i].mode) ++j;
    BenchSummary s;
    s.k = rows[i].k;
    s.n = rows[i].n;
    s.instances = static_cast<int>(j - i);
    std::vector<double> exact;
    std::vector<double> errors;
    for (std::size_t r = i; r < j; ++r) {
      s.mean_exact_ns += static_cast<double>(rows[r].exact_time_ns);
      s.mean_approx_ns += static_cast<double>(rows[r].approx_time_ns);
      exact.push_back(static_cast<double>(rows[r].exact_time_ns));
      s.truncated = s.truncated || rows[r].truncated;
      if (!rows[r].truncated) errors.push_back(rows[r].error_norm);
    }
    s.mean_exact_ns /= s.instances;
    s.mean_approx_ns /= s.instances;
    std::sort(exact.begin(), exact.end());
    s.median_exact_ns = exact.size() % 2 ? exact[exact.size() / 2]
                                         : 0.5 * (exact[exact.size() / 2 - 1] + exact[exact.size() / 2]);
    if (!errors.empty()) {
      s.mean_error = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
      double var = 0.0;
      for (const double e : errors) var += (e - s.mean_error) * (e - s.mean_error);
      s.std_error = std::sqrt(var / static_cast<double>(errors.size()));
    }
    out.push_back(s);
    i = j;
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "mode,n,k,rep,exact_time_ns,approx_time_ns,error_norm,truncated\n";
  out.precision(17);
  for (const auto& r : rows) {
    out << to_string(r.mode) << ',' << r.n << ',' << r.k << ',' << r.rep << ',' << r.exact_time_ns << ','
        << r.approx_time_ns << ',';
    if (r.truncated) out << "nan";
    else out << r.error_norm;
    out << ',' << (r.truncated ? 1 : 0) << '\n';
  }
}

std::vector<std::size_t> parse_k_values(const std::string& text) {
  std::vector<std::size_t> out;
  auto parse_num = [&](const std::string& s) -> std::size_t {
    try {
      std::size_t pos = 0;
      const long v = std::stol(s, &pos);
      if (pos != s.size() || v < 1) throw std::invalid_argument(s);
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      fail(ErrorCode::kInput, "invalid k value '" + s + "'");
    }
  };
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_num(part));
      continue;
    }
    std::string stop_str = part.substr(dots + 2);
    std::size_t step = 1;
    if (const auto colon = stop_str.find(':'); colon != std::string::npos) {
      step = parse_num(stop_str.substr(colon + 1));
      stop_str = stop_str.substr(0, colon);
    }
    const std::size_t start = parse_num(part.substr(0, dots));
    const std::size_t stop = parse_num(stop_str);
    for (std::size_t k = start; k <= stop; k += step) out.push_back(k);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) fail(ErrorCode::kInput, "empty k value list '" + text + "'");
  return out;
}

}  // namespace polyx::bench
