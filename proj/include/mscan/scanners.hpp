#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <type_traits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mscan/matrix.hpp"
#include "mscan/objective.hpp"
#include "mscan/parallel.hpp"
#include "mscan/random.hpp"

namespace mscan {

/// Raised when an input exceeds what an exhaustive routine is allowed to enumerate.
class GuardViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which half-step of a scanner just finished; passed to step observers.
enum class Phase { las_columns, las_rows, adaptive_columns, adaptive_rows };

struct NoObserver {
  void operator()(Phase, const Selection&) const noexcept {}
};

struct LasConfig {
  Index m = 1;
  Index n = 1;
  std::optional<IndexSet> init_rows;  // empty: uniformly random m-subset
  Index max_iterations = 100;
  bool random_ties = false;  // default breaks top-k ties toward the smaller index
};

struct AdaptiveConfig {
  Index m0 = 25;
  Index n0 = 25;
  Index restarts = 50;
  Index max_outer_iterations = 100;
  PenaltyParams penalty{};
  bool random_ties = false;
  unsigned threads = 1;  // restarts run concurrently; 0 = auto
};

struct GssConfig {
  Index m_bar = 500;
  Index n_bar = 500;
  Index inner_las_restarts = 1;
  PenaltyParams penalty{};
  Index las_max_iterations = 100;
};

/// Search-frame history and evaluation count of one gss() call.
struct GssTrace {
  struct Frame {
    Index m_min, m_max, n_min, n_max;
  };
  std::vector<Frame> frames;
  Index evaluations = 0;  // distinct (m, n) at which f_X was computed
  Index final_m = 0;
  Index final_n = 0;
};

namespace detail {

/// Matrix plus its transpose so that both marginal directions are contiguous.
class ScanContext {
 public:
  explicit ScanContext(const DataMatrix& X) : X_(X), Xt_(X.transposed()) {}

  const DataMatrix& matrix() const noexcept { return X_; }
  Index rows() const noexcept { return X_.rows(); }
  Index cols() const noexcept { return X_.cols(); }

  /// out[j] = sum over i in rows of X(i, j), rows visited in ascending order.
  void column_sums(const IndexSet& rows, std::vector<double>& out) const {
    accumulate(X_, rows, out);
  }
  /// out[i] = sum over j in cols of X(i, j).
  void row_sums(const IndexSet& cols, std::vector<double>& out) const {
    accumulate(Xt_, cols, out);
  }

 private:
  static void accumulate(const DataMatrix& A, const IndexSet& lines, std::vector<double>& out) {
    out.assign(A.cols(), 0.0);
    double* acc = out.data();
    const Index width = A.cols();
    for (Index line : lines) {
      const double* src = A.row(line).data();
      for (Index k = 0; k < width; ++k) acc[k] += src[k];
    }
  }

  const DataMatrix& X_;
  DataMatrix Xt_;
};

/// Orders indices by value descending; ties by priority (or index) ascending.
struct DescendingOrder {
  const double* values;
  const Index* priority;  // may be null
  bool operator()(Index a, Index b) const noexcept {
    if (values[a] != values[b]) return values[a] > values[b];
    return priority ? priority[a] < priority[b] : a < b;
  }
};

/// Indices of the k largest values, returned sorted ascending.
inline IndexSet top_k(const std::vector<double>& values, Index k, const Index* priority,
                      IndexSet& scratch) {
  scratch.resize(values.size());
  for (Index i = 0; i < scratch.size(); ++i) scratch[i] = i;
  const DescendingOrder order{values.data(), priority};
  if (k < scratch.size()) {
    std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k),
                     scratch.end(), order);
  }
  IndexSet out(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

/// Full descending order of values.
inline void sort_descending(const std::vector<double>& values, const Index* priority,
                            IndexSet& order) {
  order.resize(values.size());
  for (Index i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), DescendingOrder{values.data(), priority});
}

struct TiePriorities {
  IndexSet rows;
  IndexSet cols;
  const Index* row_ptr() const noexcept { return rows.empty() ? nullptr : rows.data(); }
  const Index* col_ptr() const noexcept { return cols.empty() ? nullptr : cols.data(); }
};

inline IndexSet random_permutation(Xoshiro256& rng, Index n) {
  IndexSet p = first_indices(n);
  for (Index i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

inline TiePriorities make_priorities(bool random_ties, Xoshiro256& rng, Index M, Index N) {
  if (!random_ties) return {};
  TiePriorities t;
  t.rows = random_permutation(rng, M);
  t.cols = random_permutation(rng, N);
  return t;
}

struct LasOutcome {
  Selection selection;
  Index iterations = 0;
};

/// Alternating top-k maximization at fixed size (m, n) starting from `rows`.
template <class Observer>
LasOutcome run_las(const ScanContext& ctx, Index m, Index n, IndexSet rows, Index max_iterations,
                   const TiePriorities& ties, Observer& observer) {
  std::vector<double> sums;
  IndexSet scratch;
  Selection current{std::move(rows), {}};
  Index iter = 0;
  while (iter < max_iterations) {
    ++iter;
    ctx.column_sums(current.rows, sums);
    current.cols = top_k(sums, n, ties.col_ptr(), scratch);
    observer(Phase::las_columns, current);
    ctx.row_sums(current.cols, sums);
    IndexSet next_rows = top_k(sums, m, ties.row_ptr(), scratch);
    const bool unchanged = next_rows == current.rows;
    current.rows = std::move(next_rows);
    observer(Phase::las_rows, current);
    if (unchanged) break;
  }
  return {std::move(current), iter};
}

inline void check_las_config(const LasConfig& cfg, Index M, Index N) {
  if (cfg.m < 1 || cfg.m > M || cfg.n < 1 || cfg.n > N) {
    throw std::domain_error("las: target size (" + std::to_string(cfg.m) + ", " +
                            std::to_string(cfg.n) + ") outside the matrix");
  }
  if (cfg.max_iterations < 1) throw std::domain_error("las: max_iterations must be positive");
  if (cfg.init_rows) {
    if (cfg.init_rows->size() != cfg.m || !is_strictly_increasing(*cfg.init_rows) ||
        cfg.init_rows->back() >= M) {
      throw std::domain_error("las: initial rows must be m sorted, distinct, in-range indices");
    }
  }
}

/// Result ordering across restarts: larger objective, then smaller area, then
/// lexicographically smaller selection.
inline bool better_result(const ScanResult& a, const ScanResult& b) {
  if (a.objective != b.objective) return a.objective > b.objective;
  const Index area_a = a.selection.height() * a.selection.width();
  const Index area_b = b.selection.height() * b.selection.width();
  if (area_a != area_b) return area_a < area_b;
  return a.selection < b.selection;
}

/// Conditional maximizer of the multiscale objective over one index set: given
/// marginal sums along the free axis, returns the best prefix of their descending order.
inline IndexSet best_prefix(const std::vector<double>& sums, Index fixed_size, bool free_is_cols,
                            const PenaltyTable& pen, const Index* priority, IndexSet& order) {
  sort_descending(sums, priority, order);
  const double fixed = static_cast<double>(fixed_size);
  double prefix = 0.0;
  double best_value = 0.0;
  Index best_size = 0;
  for (Index k = 1; k <= order.size(); ++k) {
    prefix += sums[order[k - 1]];
    const double lambda = free_is_cols ? pen(fixed_size, k) : pen(k, fixed_size);
    const double value = prefix / std::sqrt(fixed * static_cast<double>(k)) - lambda;
    if (best_size == 0 || value > best_value) {
      best_value = value;
      best_size = k;
    }
  }
  IndexSet out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_size));
  std::sort(out.begin(), out.end());
  return out;
}

/// One adaptive restart: LAS at the initial size, then size-adaptive half-steps.
template <class Observer>
ScanResult run_adaptive(const ScanContext& ctx, const AdaptiveConfig& cfg, const PenaltyTable& pen,
                        std::uint64_t seed, Observer& observer) {
  Xoshiro256 rng(seed);
  const TiePriorities ties = make_priorities(cfg.random_ties, rng, ctx.rows(), ctx.cols());
  IndexSet init = random_subset(rng, ctx.rows(), cfg.m0);
  LasOutcome start = run_las(ctx, cfg.m0, cfg.n0, std::move(init), 100, ties, observer);
  Selection current = std::move(start.selection);

  std::vector<double> sums;
  IndexSet order;
  Index outer = 0;
  while (outer < cfg.max_outer_iterations) {
    ++outer;
    const Selection before = current;
    ctx.column_sums(current.rows, sums);
    current.cols = best_prefix(sums, current.height(), true, pen, ties.col_ptr(), order);
    observer(Phase::adaptive_columns, current);
    ctx.row_sums(current.cols, sums);
    current.rows = best_prefix(sums, current.width(), false, pen, ties.row_ptr(), order);
    observer(Phase::adaptive_rows, current);
    if (current == before) break;
  }
  ScanResult result;
  result.objective = mscan_objective(ctx.matrix(), current, cfg.penalty);
  result.selection = std::move(current);
  result.iterations = outer;
  result.restarts_used = 1;
  return result;
}

}  // namespace detail

/// Large Average Submatrix search at a fixed size. The objective field holds
/// the raw submatrix sum (the fixed-size scan value), not the multiscale score.
template <class Observer = NoObserver>
ScanResult las(const DataMatrix& X, const LasConfig& cfg, std::uint64_t seed = 0,
               Observer&& observer = {}) {
  detail::check_las_config(cfg, X.rows(), X.cols());
  const detail::ScanContext ctx(X);
  Xoshiro256 rng(seed);
  const detail::TiePriorities ties =
      detail::make_priorities(cfg.random_ties, rng, X.rows(), X.cols());
  IndexSet init = cfg.init_rows ? *cfg.init_rows : random_subset(rng, X.rows(), cfg.m);
  auto outcome =
      detail::run_las(ctx, cfg.m, cfg.n, std::move(init), cfg.max_iterations, ties, observer);
  ScanResult result;
  result.objective = submatrix_sum(X, outcome.selection);
  result.selection = std::move(outcome.selection);
  result.iterations = outcome.iterations;
  result.restarts_used = 1;
  return result;
}

inline void validate(const AdaptiveConfig& cfg, Index M, Index N) {
  if (cfg.m0 < 1 || cfg.m0 > M || cfg.n0 < 1 || cfg.n0 > N) {
    throw std::domain_error("adaptive_las: initial size (" + std::to_string(cfg.m0) + ", " +
                            std::to_string(cfg.n0) + ") outside the matrix");
  }
  if (cfg.restarts < 1 || cfg.max_outer_iterations < 1) {
    throw std::domain_error("adaptive_las: restarts and max_outer_iterations must be positive");
  }
  detail::check_delta(cfg.penalty);
}

/// Stream seed of restart r of adaptive_las(seed).
inline std::uint64_t restart_seed(std::uint64_t seed, Index restart) {
  return derive_seed(seed, restart);
}

/// Hill-climbing approximation of the multiscale scan, best of cfg.restarts random starts.
/// The observer sees every half-step of every restart and is only supported single-threaded.
template <class Observer = NoObserver>
ScanResult adaptive_las(const DataMatrix& X, const AdaptiveConfig& cfg, std::uint64_t seed,
                        Observer&& observer = {}) {
  validate(cfg, X.rows(), X.cols());
  const detail::ScanContext ctx(X);
  const PenaltyTable pen(X.rows(), X.cols(), cfg.penalty);
  std::vector<ScanResult> results(cfg.restarts);
  constexpr bool observed = !std::is_same_v<std::decay_t<Observer>, NoObserver>;
  const unsigned threads = observed ? 1u : cfg.threads;
  parallel_for(cfg.restarts, threads, [&](std::size_t r) {
    results[r] = detail::run_adaptive(ctx, cfg, pen, restart_seed(seed, r), observer);
  });
  auto best = std::min_element(results.begin(), results.end(), detail::better_result);
  ScanResult out = std::move(*best);
  out.restarts_used = cfg.restarts;
  return out;
}

inline void validate(const GssConfig& cfg, Index M, Index N) {
  if (cfg.m_bar < 1 || cfg.n_bar < 1) throw std::domain_error("gss: frame bounds must be positive");
  if (cfg.m_bar > M || cfg.n_bar > N) {
    throw std::domain_error("gss: frame (" + std::to_string(cfg.m_bar) + ", " +
                            std::to_string(cfg.n_bar) + ") exceeds the " + std::to_string(M) +
                            "x" + std::to_string(N) + " matrix");
  }
  if (cfg.inner_las_restarts < 1 || cfg.las_max_iterations < 1) {
    throw std::domain_error("gss: inner restarts and LAS iterations must be positive");
  }
  detail::check_delta(cfg.penalty);
}

/// Golden ratio conjugate, 0.5 (sqrt 5 - 1).
inline const double kGoldenRatio = 0.5 * (std::sqrt(5.0) - 1.0);

/// Probe pair (lower, upper) of one frame axis.
inline std::pair<Index, Index> golden_probes(Index lo, Index hi) {
  const double dlo = static_cast<double>(lo), dhi = static_cast<double>(hi);
  const auto lower = static_cast<Index>(std::ceil(dhi + (dlo - dhi) * kGoldenRatio));
  const auto upper = static_cast<Index>(std::floor(dlo + (dhi - dlo) * kGoldenRatio));
  return {lower, upper};
}

namespace detail {

/// Golden probes, except that coinciding probes (widths 4 and 6) become the
/// adjacent pair (p, p + 1): equal probes carry no direction and the shrink
/// rule would otherwise cut off one side of the optimum.
inline std::pair<Index, Index> distinct_probes(Index lo, Index hi) {
  auto [p1, p2] = golden_probes(lo, hi);
  if (p1 >= p2) {
    p1 = std::min(p1, p2);
    p2 = p1 + 1;
  }
  return {p1, p2};
}

}  // namespace detail

/// Two-dimensional golden-section search over sizes (m, n) in [1, m_bar] x [1, n_bar]
/// of f_X(m, n) = scan_{m,n}(X) / sqrt(mn) - lambda_{m,n}, with scan_{m,n} from LAS.
inline ScanResult gss(const DataMatrix& X, const GssConfig& cfg, std::uint64_t seed = 0,
                      GssTrace* trace = nullptr) {
  validate(cfg, X.rows(), X.cols());
  const detail::ScanContext ctx(X);
  const PenaltyTable pen(X.rows(), X.cols(), cfg.penalty);
  const Index M = X.rows();

  // Deterministic LAS start: the m rows with the largest full-row sums.
  std::vector<double> full_row_sums(M);
  for (Index i = 0; i < M; ++i) {
    double s = 0.0;
    for (double v : X.row(i)) s += v;
    full_row_sums[i] = s;
  }
  IndexSet row_order;
  detail::sort_descending(full_row_sums, nullptr, row_order);

  struct Evaluation {
    double value;
    Selection selection;
  };
  std::map<std::pair<Index, Index>, Evaluation> cache;
  const detail::TiePriorities no_ties;
  NoObserver quiet;

  auto f = [&](Index m, Index n) -> double {
    if (auto it = cache.find({m, n}); it != cache.end()) return it->second.value;
    IndexSet init(row_order.begin(), row_order.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(init.begin(), init.end());
    auto best = detail::run_las(ctx, m, n, std::move(init), cfg.las_max_iterations, no_ties, quiet);
    double best_sum = submatrix_sum(X, best.selection);
    for (Index r = 1; r < cfg.inner_las_restarts; ++r) {
      Xoshiro256 rng(derive_seed(seed, m, n, r));
      auto alt = detail::run_las(ctx, m, n, random_subset(rng, M, m), cfg.las_max_iterations,
                                 no_ties, quiet);
      const double s = submatrix_sum(X, alt.selection);
      if (s > best_sum) {
        best_sum = s;
        best = std::move(alt);
      }
    }
    const double value =
        best_sum / std::sqrt(static_cast<double>(m) * static_cast<double>(n)) - pen(m, n);
    cache.emplace(std::pair{m, n}, Evaluation{value, std::move(best.selection)});
    return value;
  };

  Index m_min = 1, m_max = cfg.m_bar, n_min = 1, n_max = cfg.n_bar;
  Index iterations = 0;
  if (trace) trace->frames.push_back({m_min, m_max, n_min, n_max});
  while (std::max(m_max - m_min, n_max - n_min) > 3) {
    ++iterations;
    const auto [m1, m2] = detail::distinct_probes(m_min, m_max);
    const auto [n1, n2] = detail::distinct_probes(n_min, n_max);
    const std::array<std::pair<Index, Index>, 4> probes{{{m1, n1}, {m2, n1}, {m1, n2}, {m2, n2}}};
    std::pair<Index, Index> best_probe = probes[0];
    double best_value = f(m1, n1);
    for (std::size_t p = 1; p < probes.size(); ++p) {
      const double v = f(probes[p].first, probes[p].second);
      if (v > best_value) {
        best_value = v;
        best_probe = probes[p];
      }
    }
    // Axes already at width <= 3 stay fixed; the final grid covers them.
    if (m_max - m_min > 3) {
      if (best_probe.first == m1) m_max = m2; else m_min = m1;
    }
    if (n_max - n_min > 3) {
      if (best_probe.second == n1) n_max = n2; else n_min = n1;
    }
    if (trace) trace->frames.push_back({m_min, m_max, n_min, n_max});
  }

  Index best_m = m_min, best_n = n_min;
  double best_value = f(m_min, n_min);
  for (Index m = m_min; m <= m_max; ++m) {
    for (Index n = n_min; n <= n_max; ++n) {
      const double v = f(m, n);
      if (v > best_value) {
        best_value = v;
        best_m = m;
        best_n = n;
      }
    }
  }

  ScanResult result;
  result.selection = cache.at({best_m, best_n}).selection;
  result.objective = mscan_objective(X, result.selection, cfg.penalty);
  result.iterations = iterations;
  result.restarts_used = cfg.inner_las_restarts;
  if (trace) {
    trace->evaluations = cache.size();
    trace->final_m = best_m;
    trace->final_n = best_n;
  }
  return result;
}

/// Largest row count exhaustive_mscan will enumerate (2^M - 1 row subsets).
inline constexpr Index kOracleMaxRows = 20;

/// Exact maximizer of the multiscale objective by enumerating every nonempty row
/// subset; for a fixed row set the best column set of each size is a top-n prefix.
/// Ties go to the lexicographically smallest selection. Requires M <= 20.
inline ScanResult exhaustive_mscan(const DataMatrix& X, PenaltyParams params = {}) {
  const Index M = X.rows(), N = X.cols();
  if (M > kOracleMaxRows) {
    throw GuardViolation("oracle refuses a matrix with " + std::to_string(M) +
                         " rows: exhaustive search is limited to " +
                         std::to_string(kOracleMaxRows) + " rows (transpose if N < M)");
  }
  const PenaltyTable pen(M, N, params);
  std::vector<double> col_sums(N);
  IndexSet order;
  IndexSet rows;
  rows.reserve(M);

  struct Candidate {
    std::uint64_t mask;
    Index width;
    double approx;
  };
  // Prefix sums round differently from submatrix_sum, so keep every candidate
  // within a small band of the running maximum and settle them exactly at the end.
  std::vector<Candidate> band;
  double best_approx = -std::numeric_limits<double>::infinity();
  auto tolerance = [](double v) { return 1e-9 * (1.0 + std::abs(v)); };

  const std::uint64_t subsets = std::uint64_t{1} << M;
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    rows.clear();
    for (Index i = 0; i < M; ++i)
      if (mask >> i & 1U) rows.push_back(i);
    std::fill(col_sums.begin(), col_sums.end(), 0.0);
    for (Index i : rows) {
      const auto r = X.row(i);
      for (Index j = 0; j < N; ++j) col_sums[j] += r[j];
    }
    detail::sort_descending(col_sums, nullptr, order);
    const double m = static_cast<double>(rows.size());
    double prefix = 0.0;
    for (Index n = 1; n <= N; ++n) {
      prefix += col_sums[order[n - 1]];
      const double v = prefix / std::sqrt(m * static_cast<double>(n)) - pen(rows.size(), n);
      if (v > best_approx + tolerance(best_approx)) band.clear();
      if (v >= best_approx - tolerance(best_approx)) {
        best_approx = std::max(best_approx, v);
        band.push_back({mask, n, v});
      }
    }
  }
  std::erase_if(band, [&](const Candidate& c) {
    return c.approx < best_approx - tolerance(best_approx);
  });

  ScanResult best;
  bool have = false;
  for (const Candidate& c : band) {
    Selection s;
    for (Index i = 0; i < M; ++i)
      if (c.mask >> i & 1U) s.rows.push_back(i);
    std::fill(col_sums.begin(), col_sums.end(), 0.0);
    for (Index i : s.rows) {
      const auto r = X.row(i);
      for (Index j = 0; j < N; ++j) col_sums[j] += r[j];
    }
    detail::sort_descending(col_sums, nullptr, order);
    s.cols.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(c.width));
    std::sort(s.cols.begin(), s.cols.end());
    ScanResult candidate{s, mscan_objective(X, s, params), 1, 1};
    if (!have || candidate.objective > best.objective ||
        (candidate.objective == best.objective && candidate.selection < best.selection)) {
      best = std::move(candidate);
      have = true;
    }
  }
  best.iterations = 1;
  best.restarts_used = static_cast<Index>(subsets - 1);
  return best;
}

}  // namespace mscan
