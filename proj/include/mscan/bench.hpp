#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mscan/baselines.hpp"
#include "mscan/generators.hpp"
#include "mscan/io.hpp"
#include "mscan/objective.hpp"
#include "mscan/parallel.hpp"
#include "mscan/random.hpp"
#include "mscan/scanners.hpp"
#include "mscan/thresholds.hpp"

namespace mscan {

enum class Method { adaptive_las, gss, spectral, gmg };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::adaptive_las: return "adaptiveLas";
    case Method::gss: return "gss";
    case Method::spectral: return "spectral";
    case Method::gmg: return "gmg";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(std::string_view name) {
  if (name == "adaptiveLas" || name == "adaptive") return Method::adaptive_las;
  if (name == "gss") return Method::gss;
  if (name == "spectral") return Method::spectral;
  if (name == "gmg") return Method::gmg;
  return std::nullopt;
}

inline const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::adaptive_las, Method::gss, Method::spectral,
                                           Method::gmg};
  return methods;
}

/// Matrix shape and planted block size of one simulation design.
struct Design {
  std::string name;
  Index M = 0;
  Index N = 0;
  Index m_star = 0;
  Index n_star = 0;
};

namespace designs {
inline Design balanced() { return {"balanced", 1000, 1200, 170, 140}; }
inline Design imbalanced() { return {"imbalanced", 4000, 500, 70, 250}; }
inline Design timing() { return {"timing", 1000, 1000, 100, 100}; }
// Desk-scale counterparts, dimensions divided by five.
inline Design desk_balanced() { return {"desk-balanced", 200, 240, 34, 28}; }
inline Design desk_imbalanced() { return {"desk-imbalanced", 800, 100, 14, 50}; }
inline Design desk_timing() { return {"desk-timing", 200, 200, 20, 20}; }
}  // namespace designs

/// Multipliers lo, lo + step, ..., hi, rounded to 1e-9 so that 1.1 prints as 1.1.
inline std::vector<double> theta_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::domain_error("theta_grid: need step > 0 and hi >= lo");
  const auto count = static_cast<Index>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (Index k = 0; k < count; ++k) {
    grid[k] = std::round((lo + static_cast<double>(k) * step) * 1e9) / 1e9;
  }
  return grid;
}

struct ExperimentConfig {
  Design design = designs::balanced();
  std::vector<Family> families{Family::gaussian, Family::poisson, Family::rademacher};
  std::vector<double> theta_grid = mscan::theta_grid(1.0, 4.0, 0.1);
  Index replications = 30;
  std::vector<Method> methods = all_methods();
  std::uint64_t seed = 100;
  unsigned threads = 1;
  AdaptiveConfig adaptive{};
  GssConfig gss{};
  SpectralConfig spectral{.accept_unconverged = true};
};

inline void validate(const ExperimentConfig& cfg) {
  const Design& d = cfg.design;
  if (d.m_star < 1 || d.m_star >= d.M || d.n_star < 1 || d.n_star >= d.N) {
    throw std::domain_error("experiment: design needs 1 <= m* < M and 1 <= n* < N");
  }
  if (cfg.theta_grid.empty()) throw std::domain_error("experiment: empty theta grid");
  for (Index k = 0; k < cfg.theta_grid.size(); ++k) {
    if (!(cfg.theta_grid[k] >= 0.0) || (k > 0 && !(cfg.theta_grid[k] > cfg.theta_grid[k - 1]))) {
      throw std::domain_error("experiment: theta grid must be nonnegative and increasing");
    }
  }
  if (cfg.replications < 1) throw std::domain_error("experiment: replications must be >= 1");
  if (cfg.families.empty() || cfg.methods.empty()) {
    throw std::domain_error("experiment: need at least one family and one method");
  }
  for (Method m : cfg.methods) {
    if (m == Method::adaptive_las) validate(cfg.adaptive, d.M, d.N);
    if (m == Method::gss) validate(cfg.gss, d.M, d.N);
  }
}

/// Full-scale error-curve configuration for one design.
inline ExperimentConfig paper_error_preset(const Design& design = designs::balanced()) {
  ExperimentConfig cfg;
  cfg.design = design;
  return cfg;
}

/// Desk-scale error curve: dimensions / 5, 10 replications, coarser grid.
inline ExperimentConfig desk_error_preset(const Design& design = designs::desk_balanced()) {
  ExperimentConfig cfg;
  cfg.design = design;
  cfg.theta_grid = theta_grid(1.0, 4.0, 0.5);
  cfg.replications = 10;
  cfg.adaptive.m0 = 5;
  cfg.adaptive.n0 = 5;
  cfg.adaptive.restarts = 20;
  cfg.gss.m_bar = std::min<Index>(100, design.M);
  cfg.gss.n_bar = std::min<Index>(100, design.N);
  return cfg;
}

/// Computing-time experiment: gaussian only, theta = 2.5 theta_crit, 100 replications,
/// adaptive LAS started at (5, 5).
inline ExperimentConfig paper_timing_preset(const Design& design = designs::timing()) {
  ExperimentConfig cfg;
  cfg.design = design;
  cfg.families = {Family::gaussian};
  cfg.theta_grid = {2.5};
  cfg.replications = 100;
  cfg.adaptive.m0 = 5;
  cfg.adaptive.n0 = 5;
  cfg.gss.m_bar = std::min<Index>(500, design.M);
  cfg.gss.n_bar = std::min<Index>(500, design.N);
  return cfg;
}

inline ExperimentConfig desk_timing_preset(const Design& design = designs::desk_timing()) {
  ExperimentConfig cfg = paper_timing_preset(design);
  cfg.replications = 10;
  cfg.gss.m_bar = std::min<Index>(100, design.M);
  cfg.gss.n_bar = std::min<Index>(100, design.N);
  return cfg;
}

struct ResultRow {
  Method method = Method::adaptive_las;
  Family family = Family::gaussian;
  double theta_mult = 0.0;
  Index rep = 0;
  double err = 0.0;
  double millis = 0.0;
  Index family_index = 0;
  Index grid_index = 0;
};

/// Seeds of one (family, grid point, replication) cell.
struct CellSeeds {
  std::uint64_t data;
  std::uint64_t method;
};

inline CellSeeds cell_seeds(const ExperimentConfig& cfg, Index family_index, Index grid_index,
                            Index rep) {
  const std::uint64_t cell = derive_seed(cfg.seed, family_index, grid_index, rep);
  return {derive_seed(cell, 0), derive_seed(cell, 1)};
}

inline GenerationSpec cell_spec(const ExperimentConfig& cfg, Index family_index, Index grid_index,
                                Index rep) {
  const Design& d = cfg.design;
  GenerationSpec spec;
  spec.family = cfg.families.at(family_index);
  spec.M = d.M;
  spec.N = d.N;
  spec.m_star = d.m_star;
  spec.n_star = d.n_star;
  spec.theta = cfg.theta_grid.at(grid_index) * theta_crit(d.M, d.N, d.m_star, d.n_star);
  spec.seed = cell_seeds(cfg, family_index, grid_index, rep).data;
  return spec;
}

/// Runs one localization method; the same call the CLI `localize` subcommand makes.
inline Selection localize(const DataMatrix& X, Method method, const ExperimentConfig& cfg,
                          std::uint64_t seed) {
  switch (method) {
    case Method::adaptive_las: return adaptive_las(X, cfg.adaptive, seed).selection;
    case Method::gss: return gss(X, cfg.gss, seed).selection;
    case Method::spectral: return spectral_localize(X, cfg.spectral);
    case Method::gmg: return gmg_localize(X);
  }
  throw std::logic_error("unknown method");
}

/// All methods on one generated matrix. Reproducible in isolation.
inline std::vector<ResultRow> run_cell(const ExperimentConfig& cfg, Index family_index,
                                       Index grid_index, Index rep) {
  const auto [X, truth] = generate(cell_spec(cfg, family_index, grid_index, rep));
  const std::uint64_t method_seed = cell_seeds(cfg, family_index, grid_index, rep).method;
  std::vector<ResultRow> rows;
  rows.reserve(cfg.methods.size());
  for (Method m : cfg.methods) {
    const auto start = std::chrono::steady_clock::now();
    const Selection est = localize(X, m, cfg, method_seed);
    const auto stop = std::chrono::steady_clock::now();
    ResultRow row;
    row.method = m;
    row.family = cfg.families[family_index];
    row.theta_mult = cfg.theta_grid[grid_index];
    row.rep = rep;
    row.err = err_measure(est, truth);
    row.millis = std::chrono::duration<double, std::milli>(stop - start).count();
    row.family_index = family_index;
    row.grid_index = grid_index;
    rows.push_back(row);
  }
  return rows;
}

/// Error counts for every (family, theta multiplier, replication, method), ordered by
/// family, grid index, replication, then configured method order.
inline std::vector<ResultRow> run_error_curve(const ExperimentConfig& cfg) {
  validate(cfg);
  // Parallelism lives at the cell level; restarts inside a cell stay sequential.
  ExperimentConfig work = cfg;
  work.adaptive.threads = 1;
  const Index F = cfg.families.size(), G = cfg.theta_grid.size(), R = cfg.replications;
  std::vector<std::vector<ResultRow>> cells(F * G * R);
  parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    const Index f = c / (G * R), g = (c / R) % G, r = c % R;
    cells[c] = run_cell(work, f, g, r);
  });
  std::vector<ResultRow> out;
  out.reserve(cells.size() * cfg.methods.size());
  for (auto& cell : cells) out.insert(out.end(), cell.begin(), cell.end());
  return out;
}

/// Same protocol as run_error_curve; wall times are the quantity of interest here,
/// so run it with threads = 1 to avoid contention between cells.
inline std::vector<ResultRow> run_timing(const ExperimentConfig& cfg) {
  return run_error_curve(cfg);
}

inline constexpr std::string_view kResultsCsvHeader = "method,family,theta_mult,rep,err,millis";

/// Results CSV. With include_timing = false the millis column is written as 0 so
/// the file is byte-reproducible.
inline void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows,
                              bool include_timing) {
  os << kResultsCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    os << to_string(r.method) << ',' << to_string(r.family) << ',' << format_double(r.theta_mult)
       << ',' << r.rep << ',' << format_double(r.err) << ','
       << (include_timing ? format_double(r.millis) : std::string("0")) << '\n';
  }
}

struct CurvePoint {
  Method method;
  Family family;
  double theta_mult;
  double mean_err;
  double min_err;
  double max_err;
  double median_millis;
};

/// Per (method, family, theta) summary of result rows, in first-seen order.
inline std::vector<CurvePoint> summarize(const std::vector<ResultRow>& rows) {
  struct Acc {
    CurvePoint point;
    std::vector<double> errs, millis;
  };
  std::vector<Acc> accs;
  for (const ResultRow& r : rows) {
    auto it = std::find_if(accs.begin(), accs.end(), [&](const Acc& a) {
      return a.point.method == r.method && a.point.family == r.family &&
             a.point.theta_mult == r.theta_mult;
    });
    if (it == accs.end()) {
      accs.push_back({{r.method, r.family, r.theta_mult, 0, 0, 0, 0}, {}, {}});
      it = std::prev(accs.end());
    }
    it->errs.push_back(r.err);
    it->millis.push_back(r.millis);
  }
  std::vector<CurvePoint> out;
  for (Acc& a : accs) {
    double sum = 0.0;
    for (double e : a.errs) sum += e;
    a.point.mean_err = sum / static_cast<double>(a.errs.size());
    a.point.min_err = *std::min_element(a.errs.begin(), a.errs.end());
    a.point.max_err = *std::max_element(a.errs.begin(), a.errs.end());
    std::sort(a.millis.begin(), a.millis.end());
    const Index k = a.millis.size();
    a.point.median_millis =
        k % 2 ? a.millis[k / 2] : 0.5 * (a.millis[k / 2 - 1] + a.millis[k / 2]);
    out.push_back(a.point);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Unimodality landscape

struct LandscapeDesign {
  std::string name;
  Index M, N, m_star, n_star;
  Index m_bar, n_bar;
  double theta_mult;
};

namespace designs {
inline LandscapeDesign landscape_balanced() { return {"balanced", 300, 360, 40, 60, 100, 120, 2.0}; }
inline LandscapeDesign landscape_imbalanced() { return {"imbalanced", 500, 50, 10, 25, 100, 50, 2.0}; }
}  // namespace designs

/// f_X(m, n) estimates on [1, m_bar] x [1, n_bar], stored row-major by (m-1, n-1).
struct Landscape {
  Index m_bar = 0;
  Index n_bar = 0;
  std::vector<double> values;

  double at(Index m, Index n) const { return values[(m - 1) * n_bar + (n - 1)]; }

  /// 1-based (m, n) of the largest value; first in row-major order on ties.
  std::pair<Index, Index> argmax() const {
    const auto it = std::max_element(values.begin(), values.end());
    const auto k = static_cast<Index>(it - values.begin());
    return {k / n_bar + 1, k % n_bar + 1};
  }

  /// Values shifted to be nonnegative and raised to the fourth power.
  std::vector<double> display() const {
    const double lo = *std::min_element(values.begin(), values.end());
    std::vector<double> out(values.size());
    for (Index k = 0; k < values.size(); ++k) out[k] = std::pow(values[k] - lo, 4);
    return out;
  }
};

/// For each (m, n) the best LAS sum over `las_restarts` uniformly random starts,
/// normalized by sqrt(mn), minus the k ln(K/k) penalty approximation.
inline Landscape unimodality_grid(const DataMatrix& X, Index m_bar, Index n_bar,
                                  Index las_restarts, std::uint64_t seed, unsigned threads = 1) {
  if (m_bar < 1 || n_bar < 1 || m_bar > X.rows() || n_bar > X.cols()) {
    throw std::domain_error("unimodality: need 1 <= m_bar <= M and 1 <= n_bar <= N");
  }
  if (las_restarts < 1) throw std::domain_error("unimodality: las_restarts must be >= 1");
  const detail::ScanContext ctx(X);
  Landscape out{m_bar, n_bar, std::vector<double>(m_bar * n_bar)};
  parallel_for(m_bar, threads, [&](std::size_t mi) {
    const Index m = mi + 1;
    const detail::TiePriorities no_ties;
    NoObserver quiet;
    for (Index n = 1; n <= n_bar; ++n) {
      double best = -std::numeric_limits<double>::infinity();
      for (Index r = 0; r < las_restarts; ++r) {
        Xoshiro256 rng(derive_seed(seed, m, n, r));
        const auto run =
            detail::run_las(ctx, m, n, random_subset(rng, X.rows(), m), 100, no_ties, quiet);
        best = std::max(best, submatrix_sum(X, run.selection));
      }
      out.values[mi * n_bar + (n - 1)] =
          best / std::sqrt(static_cast<double>(m * n)) - penalty_approx(X.rows(), X.cols(), m, n);
    }
  });
  return out;
}

/// Gaussian data for a landscape design at theta_mult * theta_crit.
inline GenerationSpec landscape_spec(const LandscapeDesign& d, std::uint64_t seed) {
  GenerationSpec spec;
  spec.family = Family::gaussian;
  spec.M = d.M;
  spec.N = d.N;
  spec.m_star = d.m_star;
  spec.n_star = d.n_star;
  spec.theta = d.theta_mult * theta_crit(d.M, d.N, d.m_star, d.n_star);
  spec.seed = derive_seed(seed, 0);
  return spec;
}

inline Landscape unimodality_grid(const LandscapeDesign& d, Index las_restarts,
                                  std::uint64_t seed, unsigned threads = 1) {
  const auto [X, truth] = generate(landscape_spec(d, seed));
  return unimodality_grid(X, d.m_bar, d.n_bar, las_restarts, derive_seed(seed, 1), threads);
}

/// Landscape as CSV, one line per m.
inline void write_grid_csv(std::ostream& os, const std::vector<double>& values, Index n_bar) {
  for (Index k = 0; k < values.size(); ++k) {
    os << format_double(values[k]) << ((k + 1) % n_bar == 0 ? '\n' : ',');
  }
}

}  // namespace mscan
