// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion ...]   (no arguments runs 1 through 10)

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mscan.hpp"

namespace {

using namespace mscan;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

// 1. Oracle objective >= every heuristic's objective, exactly, on 200 small matrices.
Verdict oracle_dominance() {
  const auto start = Clock::now();
  Xoshiro256 rng(derive_seed(2024, 1));
  int violations = 0;
  std::string first;
  for (int t = 0; t < 200; ++t) {
    const Index M = 2 + rng.below(11), N = 2 + rng.below(13);
    const bool planted = t % 2 == 0;
    const Index m = 1 + rng.below(M - 1), n = 1 + rng.below(N - 1);
    const double theta = planted ? 1.0 + 2.0 * rng.uniform() : 0.0;
    const auto [X, truth] = generate({Family::gaussian, M, N, m, n, theta, derive_seed(7, t)});
    const double best = exhaustive_mscan(X).objective;

    std::vector<std::pair<const char*, Selection>> candidates;
    candidates.emplace_back(
        "adaptiveLas",
        adaptive_las(X, {.m0 = std::min<Index>(2, M), .n0 = std::min<Index>(2, N), .restarts = 20}, t)
            .selection);
    candidates.emplace_back("gss", gss(X, {.m_bar = M, .n_bar = N}, t).selection);
    candidates.emplace_back("las", las(X, {.m = m, .n = n}, t).selection);
    candidates.emplace_back("spectral", spectral_localize(X, {.accept_unconverged = true}));
    candidates.emplace_back("gmg", gmg_localize(X));
    for (const auto& [name, sel] : candidates) {
      const double v = mscan_objective(X, sel);
      if (v > best) {
        if (violations++ == 0) first = std::string(name) + " on instance " + std::to_string(t);
      }
    }
  }
  const double secs = seconds_since(start);
  std::string detail = std::to_string(violations) + " violations over 200 instances x 5 heuristics in " +
                       fixed(secs, 1) + " s (limit 120 s)";
  if (violations) detail += "; first: " + first;
  return {violations == 0 && secs < 120.0, detail};
}

// 2. adaptiveLas with 200 restarts attains the oracle on >= 18 of 20 planted 8 x 10 instances.
Verdict heuristic_attainment() {
  int attained = 0;
  double worst_gap = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto X = generate({Family::gaussian, 8, 10, 3, 4, 4.0, derive_seed(2024, 2, t)}).first;
    const double oracle = exhaustive_mscan(X).objective;
    const double found = adaptive_las(X, {.m0 = 2, .n0 = 2, .restarts = 200}, t).objective;
    const double gap = std::abs(oracle - found) / std::abs(oracle);
    worst_gap = std::max(worst_gap, gap);
    if (gap <= 1e-9) ++attained;
  }
  return {attained >= 18, std::to_string(attained) + "/20 attained to 1e-9 relative (need 18); worst gap " +
                              format_double(worst_gap)};
}

// 3. Per-step monotonicity of LAS sums and adaptive LAS objectives on 100 random 20 x 20 matrices.
Verdict monotone_steps() {
  struct Tracker {
    const DataMatrix* X;
    double last_sum = -INFINITY, last_objective = -INFINITY;
    bool in_las = false;
    long steps = 0, violations = 0;
    void operator()(Phase phase, const Selection& s) {
      ++steps;
      if (phase == Phase::las_columns || phase == Phase::las_rows) {
        if (!in_las) last_sum = -INFINITY;  // a new LAS run starts
        in_las = true;
        const double v = submatrix_sum(*X, s);
        if (v < last_sum) ++violations;
        last_sum = v;
      } else {
        if (in_las) last_objective = -INFINITY;  // adaptive phase of a new restart
        in_las = false;
        const double v = mscan_objective(*X, s);
        if (v < last_objective) ++violations;
        last_objective = v;
      }
    }
  };
  long steps = 0, violations = 0;
  for (int t = 0; t < 100; ++t) {
    const double theta = t % 2 ? 1.5 : 0.0;
    const auto X = generate({Family::gaussian, 20, 20, 5, 6, theta, derive_seed(2024, 3, t)}).first;
    Xoshiro256 rng(derive_seed(2024, 33, t));
    Tracker las_tracker{&X};
    las(X, {.m = 1 + rng.below(20), .n = 1 + rng.below(20)}, t, las_tracker);
    Tracker adaptive_tracker{&X};
    adaptive_las(X, {.m0 = 1 + rng.below(20), .n0 = 1 + rng.below(20), .restarts = 5}, t,
                 adaptive_tracker);
    steps += las_tracker.steps + adaptive_tracker.steps;
    violations += las_tracker.violations + adaptive_tracker.violations;
  }
  return {violations == 0, std::to_string(violations) + " decreasing half-steps out of " +
                               std::to_string(steps)};
}

// Criteria 4 and 5 share one run: balanced design, gaussian, full theta grid, 30 replications.
const std::vector<ResultRow>& paper_balanced_run() {
  static const std::vector<ResultRow> rows = [] {
    ExperimentConfig cfg = paper_error_preset(designs::balanced());
    cfg.families = {Family::gaussian};
    cfg.methods = {Method::adaptive_las, Method::gss, Method::gmg};
    const auto start = Clock::now();
    auto out = run_error_curve(cfg);
    std::cout << "  full-scale balanced run: " << out.size() << " rows in "
              << fixed(seconds_since(start), 1) << " s\n";
    return out;
  }();
  return rows;
}

// 4. err = 0 in >= 28 of 30 runs at 4 theta_crit for adaptiveLas and gss.
Verdict paper_scale_recovery() {
  int adaptive = 0, golden = 0;
  for (const ResultRow& r : paper_balanced_run()) {
    if (r.theta_mult != 4.0 || r.err != 0.0) continue;
    if (r.method == Method::adaptive_las) ++adaptive;
    if (r.method == Method::gss) ++golden;
  }
  return {adaptive >= 28 && golden >= 28, "exact recovery at 4.0 theta_crit: adaptiveLas " +
                                              std::to_string(adaptive) + "/30, gss " +
                                              std::to_string(golden) + "/30 (need 28 each)"};
}

// 5. Mean err of gmg >= mean err of adaptiveLas at every grid point.
Verdict baseline_ordering() {
  int points = 0, ordered = 0;
  double tightest = INFINITY;
  std::string worst;
  const auto summary = summarize(paper_balanced_run());
  for (const CurvePoint& g : summary) {
    if (g.method != Method::gmg) continue;
    for (const CurvePoint& a : summary) {
      if (a.method != Method::adaptive_las || a.theta_mult != g.theta_mult) continue;
      ++points;
      if (g.mean_err >= a.mean_err) ++ordered;
      if (g.mean_err - a.mean_err < tightest) {
        tightest = g.mean_err - a.mean_err;
        worst = format_double(g.theta_mult);
      }
    }
  }
  return {points > 0 && ordered == points,
          std::to_string(ordered) + "/" + std::to_string(points) +
              " grid points with mean err gmg >= adaptiveLas; smallest margin " + fixed(tightest) +
              " at " + worst + " theta_crit"};
}

// 6. Fixed point of C = 2([C/(C-1)]^1.5 + [C/(C-1)]^1.25) and the 4.32 discrepancy.
Verdict constant_solver() {
  const double c = constant_c();
  const double residual = std::abs(c - constant_c_rhs(c));
  const double off = std::abs(constant_c_rhs(4.32) - 4.32);
  return {residual < 1e-10 && c > 5.0 && c < 5.6 && off > 1.0,
          "C = " + format_double(c) + ", |C - RHS(C)| = " + format_double(residual) +
              " (< 1e-10); RHS(4.32) - 4.32 = " + fixed(off, 4) + " (> 1.0)"};
}

// 7. Penalty symmetries (exact) and the k ln(K/k) approximation within 5% for m <= M/10, n <= N/10.
Verdict penalty_checks() {
  Xoshiro256 rng(derive_seed(2024, 7));
  auto log_uniform = [&](double lo, double hi) {
    return static_cast<Index>(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform()));
  };
  int asymmetric = 0, within = 0;
  double worst = 0.0;
  std::string worst_tuple;
  for (int t = 0; t < 100; ++t) {
    const Index M = log_uniform(10, 20000), N = log_uniform(10, 20000);
    const Index m = 1 + rng.below(M / 10), n = 1 + rng.below(N / 10);
    const double exact = penalty(M, N, m, n);
    if (exact != penalty(M, N, M - m, n) || exact != penalty(M, N, m, N - n)) ++asymmetric;
    const double rel = std::abs(penalty_approx(M, N, m, n) - exact) / exact;
    if (rel <= 0.05) ++within;
    if (rel > worst) {
      worst = rel;
      worst_tuple = "(" + std::to_string(M) + "," + std::to_string(N) + "," + std::to_string(m) +
                    "," + std::to_string(n) + ")";
    }
  }
  return {asymmetric == 0 && within == 100,
          std::to_string(asymmetric) + "/100 symmetry mismatches; approximation within 5% on " +
              std::to_string(within) + "/100 tuples, worst relative gap " + fixed(worst, 4) + " at " +
              worst_tuple};
}

// 8. Standardized backgrounds and the Poisson tilt at theta = ln 2.
Verdict generator_calibration() {
  bool ok = true;
  std::string detail;
  auto moments = [](const DataMatrix& X) {
    double s = 0.0, ss = 0.0;
    for (double v : X.values()) s += v;
    const double n = static_cast<double>(X.values().size());
    const double mean = s / n;
    for (double v : X.values()) ss += (v - mean) * (v - mean);
    return std::pair{mean, ss / (n - 1.0)};
  };
  for (Family f : {Family::gaussian, Family::poisson, Family::rademacher}) {
    const auto X = generate({f, 1000, 1000, 1, 1, 0.0, derive_seed(2024, 8)}).first;
    const auto [mean, var] = moments(X);
    ok = ok && std::abs(mean) < 0.01 && std::abs(var - 1.0) < 0.02;
    detail += std::string(to_string(f)) + " mean " + fixed(mean, 4) + " var " + fixed(var, 4) + "; ";
  }
  const auto Y = generate({Family::poisson, 1000, 1000, 1000, 1000, std::log(2.0), derive_seed(2024, 9)}).first;
  const double tilted = moments(Y).first;
  ok = ok && std::abs(tilted - 1.0) < 0.01;
  detail += "poisson anomaly mean at ln 2: " + fixed(tilted, 4) + " (1 +- 0.01)";
  return {ok, detail};
}

// 9. bench-error desk preset: --threads 1 and --threads 8 write byte-identical CSV.
Verdict cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mscan_acceptance_9";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run = [&](int threads) {
    const fs::path out = dir / ("threads" + std::to_string(threads) + ".csv");
    const std::string cmd = std::string(MSCAN_CLI_PATH) + " bench-error --preset desk --threads " +
                            std::to_string(threads) + " --out " + out.string();
    const int status = std::system(cmd.c_str());
    std::ifstream in(out, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return std::pair{WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
  };
  const auto [code1, serial] = run(1);
  const auto [code8, parallel] = run(8);
  fs::remove_all(dir);
  const bool same = serial == parallel;
  const auto lines = std::count(serial.begin(), serial.end(), '\n');
  return {code1 == 0 && code8 == 0 && same && lines > 1,
          "exit codes " + std::to_string(code1) + "/" + std::to_string(code8) + "; " +
              std::to_string(lines) + " lines; " + (same ? "byte-identical" : "outputs differ")};
}

// 10. Landscape argmax within Chebyshev distance 3 of (40, 60) in >= 6 of 10 seeds, < 15 minutes.
Verdict unimodality_landscape() {
  const auto start = Clock::now();
  const LandscapeDesign d = designs::landscape_balanced();
  int near = 0;
  std::string argmaxes;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto [m, n] = unimodality_grid(d, 10, seed).argmax();
    const Index dist = std::max(m > d.m_star ? m - d.m_star : d.m_star - m,
                                n > d.n_star ? n - d.n_star : d.n_star - n);
    if (dist <= 3) ++near;
    argmaxes += "(" + std::to_string(m) + "," + std::to_string(n) + ")";
  }
  const double secs = seconds_since(start);
  return {near >= 6 && secs < 900.0, std::to_string(near) + "/10 seeds within distance 3 (need 6) in " +
                                         fixed(secs, 1) + " s (limit 900 s); argmaxes " + argmaxes};
}

struct Criterion {
  const char* name;
  std::function<Verdict()> check;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"oracle dominance", oracle_dominance},
      {"heuristic attainment", heuristic_attainment},
      {"monotone-step invariants", monotone_steps},
      {"full-scale exact recovery", paper_scale_recovery},
      {"baseline ordering", baseline_ordering},
      {"constant solver", constant_solver},
      {"penalty checks", penalty_checks},
      {"generator calibration", generator_calibration},
      {"determinism across threads", cli_determinism},
      {"unimodality landscape", unimodality_landscape},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int k = 1; k < argc; ++k) {
    const int c = std::atoi(argv[k]);
    if (c < 1 || c > static_cast<int>(criteria().size())) {
      std::cerr << "unknown criterion '" << argv[k] << "'\n";
      return 2;
    }
    selected.push_back(c);
  }
  if (selected.empty()) {
    for (int c = 1; c <= static_cast<int>(criteria().size()); ++c) selected.push_back(c);
  }
  int failures = 0;
  for (int c : selected) {
    const Criterion& crit = criteria()[c - 1];
    Verdict v;
    try {
      v = crit.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c << ": " << crit.name << ": "
              << v.detail << std::endl;
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
