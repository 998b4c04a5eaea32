#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mscan/matrix.hpp"
#include "mscan/objective.hpp"
#include "mscan/random.hpp"

namespace mscan {

struct SpectralConfig {
  double power_iter_tolerance = 1e-8;
  Index power_iter_max = 1000;
  // When set, a non-converged iterate is used as-is instead of raising ConvergenceError.
  bool accept_unconverged = false;
  std::uint64_t degeneracy_seed = 0x5eed;
};

/// Power iteration hit its iteration cap; carries the last right-vector iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

struct SingularPair {
  std::vector<double> left;   // length M, unit norm
  std::vector<double> right;  // length N, unit norm
  double sigma = 0.0;
  Index iterations = 0;
  bool converged = false;
  // Gram product annihilated the iterate, or a singular vector is constant.
  bool degenerate = false;
};

/// Split of a 1-D sample into a low and a high cluster.
struct TwoMeans {
  IndexSet low;
  IndexSet high;
};

namespace detail {

inline double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline void multiply(const DataMatrix& X, const std::vector<double>& v, std::vector<double>& out) {
  out.assign(X.rows(), 0.0);
  for (Index i = 0; i < X.rows(); ++i) {
    const auto r = X.row(i);
    double s = 0.0;
    for (Index j = 0; j < X.cols(); ++j) s += r[j] * v[j];
    out[i] = s;
  }
}

inline void multiply_transposed(const DataMatrix& X, const std::vector<double>& u,
                                std::vector<double>& out) {
  out.assign(X.cols(), 0.0);
  for (Index i = 0; i < X.rows(); ++i) {
    const auto r = X.row(i);
    const double ui = u[i];
    for (Index j = 0; j < X.cols(); ++j) out[j] += ui * r[j];
  }
}

inline bool is_constant(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo == *hi;
}

inline std::vector<double> unit(std::vector<double> v) {
  const double n = norm2(v);
  for (double& x : v) x /= n;
  return v;
}

}  // namespace detail

/// Leading singular pair by power iteration on X^T X from the all-ones vector.
inline SingularPair leading_singular_pair(const DataMatrix& X, const SpectralConfig& cfg = {}) {
  if (!(cfg.power_iter_tolerance > 0.0)) {
    throw std::domain_error("spectral: tolerance must be positive");
  }
  const Index N = X.cols();
  double frob2 = 0.0;
  for (double x : X.values()) frob2 += x * x;

  SingularPair out;
  std::vector<double> v = detail::unit(std::vector<double>(N, 1.0));
  std::vector<double> u, w;
  Xoshiro256 rng(cfg.degeneracy_seed);
  int reseeds = 0;
  bool annihilated = false;
  for (Index it = 1; it <= cfg.power_iter_max; ++it) {
    out.iterations = it;
    detail::multiply(X, v, u);
    detail::multiply_transposed(X, u, w);
    const double wn = detail::norm2(w);
    if (!(wn > 1e-12 * frob2) || frob2 == 0.0) {
      if (reseeds < 3 && frob2 > 0.0) {
        ++reseeds;
        for (double& x : v) x = rng.normal();
        v = detail::unit(std::move(v));
        continue;
      }
      annihilated = true;
      out.converged = true;
      break;
    }
    double diff = 0.0;
    for (Index j = 0; j < N; ++j) {
      const double next = w[j] / wn;
      diff += (next - v[j]) * (next - v[j]);
      v[j] = next;
    }
    if (std::sqrt(diff) < cfg.power_iter_tolerance) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged && !cfg.accept_unconverged) {
    throw ConvergenceError("spectral: power iteration did not converge in " +
                           std::to_string(cfg.power_iter_max) + " iterations",
                           v);
  }
  detail::multiply(X, v, u);
  out.sigma = detail::norm2(u);
  if (out.sigma > 0.0) {
    for (double& x : u) x /= out.sigma;
  } else {
    u = detail::unit(std::vector<double>(X.rows(), 1.0));
  }
  out.left = std::move(u);
  out.right = std::move(v);
  out.degenerate = annihilated || reseeds > 0 || detail::is_constant(out.left) ||
                   detail::is_constant(out.right);
  return out;
}

/// Exact 2-means of 1-D data: best split of the sorted sample by between-cluster
/// sum of squares, smallest split on ties. Needs at least two points.
inline TwoMeans two_means_1d(const std::vector<double>& values) {
  const Index n = values.size();
  if (n < 2) throw std::domain_error("two_means_1d: need at least two values");
  IndexSet order = first_indices(n);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values[a] < values[b]; });
  double total = 0.0;
  for (double x : values) total += x;
  double low_sum = 0.0;
  Index best_split = 1;
  double best_score = -1.0;
  for (Index k = 1; k < n; ++k) {
    low_sum += values[order[k - 1]];
    const double kl = static_cast<double>(k), kh = static_cast<double>(n - k);
    const double gap = low_sum / kl - (total - low_sum) / kh;
    const double score = kl * kh * gap * gap;
    if (score > best_score) {
      best_score = score;
      best_split = k;
    }
  }
  TwoMeans out;
  out.low.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_split));
  out.high.assign(order.begin() + static_cast<std::ptrdiff_t>(best_split), order.end());
  std::sort(out.low.begin(), out.low.end());
  std::sort(out.high.begin(), out.high.end());
  return out;
}

/// Of the four row-cluster x column-cluster blocks, the one with the largest mean.
inline Selection largest_mean_block(const DataMatrix& X, const TwoMeans& rows,
                                    const TwoMeans& cols) {
  const std::array<const IndexSet*, 2> rs{&rows.low, &rows.high};
  const std::array<const IndexSet*, 2> cs{&cols.low, &cols.high};
  Selection best;
  double best_mean = 0.0;
  bool have = false;
  for (const IndexSet* r : rs) {
    for (const IndexSet* c : cs) {
      Selection s{*r, *c};
      const double mean = submatrix_sum(X, s) / static_cast<double>(r->size() * c->size());
      if (!have || mean > best_mean) {
        best_mean = mean;
        best = std::move(s);
        have = true;
      }
    }
  }
  return best;
}

/// Spectral baseline: 2-means on the leading singular vectors, largest-mean block.
inline Selection spectral_localize(const DataMatrix& X, const SpectralConfig& cfg = {}) {
  if (X.rows() < 2 || X.cols() < 2) throw std::domain_error("spectral: needs M, N >= 2");
  const SingularPair pair = leading_singular_pair(X, cfg);
  return largest_mean_block(X, two_means_1d(pair.left), two_means_1d(pair.right));
}

namespace detail {

/// Indices above the largest gap of the ascending-sorted sums.
inline IndexSet upper_side_of_largest_gap(const std::vector<double>& sums) {
  const Index n = sums.size();
  IndexSet order = first_indices(n);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return sums[a] < sums[b]; });
  Index split = 0;
  double best_gap = -1.0;
  for (Index k = 0; k + 1 < n; ++k) {
    const double gap = sums[order[k + 1]] - sums[order[k]];
    if (gap > best_gap) {
      best_gap = gap;
      split = k;
    }
  }
  IndexSet upper(order.begin() + static_cast<std::ptrdiff_t>(split + 1), order.end());
  std::sort(upper.begin(), upper.end());
  return upper;
}

}  // namespace detail

/// Greatest Marginal Gap baseline.
inline Selection gmg_localize(const DataMatrix& X) {
  if (X.rows() < 2 || X.cols() < 2) throw std::domain_error("gmg: needs M, N >= 2");
  std::vector<double> row_sums(X.rows(), 0.0), col_sums(X.cols(), 0.0);
  for (Index i = 0; i < X.rows(); ++i) {
    const auto r = X.row(i);
    for (Index j = 0; j < X.cols(); ++j) {
      row_sums[i] += r[j];
      col_sums[j] += r[j];
    }
  }
  return {detail::upper_side_of_largest_gap(row_sums),
          detail::upper_side_of_largest_gap(col_sums)};
}

}  // namespace mscan
