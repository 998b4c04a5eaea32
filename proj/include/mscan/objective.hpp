#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mscan/matrix.hpp"

namespace mscan {

struct PenaltyParams {
  double delta = 0.0;
};

namespace detail {

// glibc's std::lgamma writes the global signgam; lgamma_r keeps concurrent callers race-free.
// Build with -fno-builtin-lgamma_r so every call site gets the same libm value.
inline double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

inline double log_factorial(Index k) { return log_gamma(static_cast<double>(k) + 1.0); }

inline void check_size(Index K, Index k, const char* what) {
  if (k < 1 || k > K) {
    throw std::domain_error(std::string(what) + " size " + std::to_string(k) +
                            " outside [1, " + std::to_string(K) + "]");
  }
}

inline void check_delta(const PenaltyParams& p) {
  if (!(p.delta >= 0.0) || !std::isfinite(p.delta)) {
    throw std::domain_error("penalty delta must be finite and nonnegative");
  }
}

}  // namespace detail

/// ln C(K, k) via log-gamma. Written so that k and K-k give bit-identical results.
inline double log_binomial(Index K, Index k) {
  if (k > K) throw std::domain_error("log_binomial: k > K");
  return detail::log_factorial(K) - (detail::log_factorial(k) + detail::log_factorial(K - k));
}

/// sqrt((2 + delta) * ln[M N C(M,m) C(N,n)]).
inline double penalty(Index M, Index N, Index m, Index n, PenaltyParams params = {}) {
  detail::check_size(M, m, "row");
  detail::check_size(N, n, "column");
  detail::check_delta(params);
  const double row_part = std::log(static_cast<double>(M)) + log_binomial(M, m);
  const double col_part = std::log(static_cast<double>(N)) + log_binomial(N, n);
  return std::sqrt((2.0 + params.delta) * (row_part + col_part));
}

/// Penalty with ln C(K,k) replaced by k ln(K/k); only used for the landscape experiment.
inline double penalty_approx(Index M, Index N, Index m, Index n) {
  detail::check_size(M, m, "row");
  detail::check_size(N, n, "column");
  const double dm = static_cast<double>(m), dn = static_cast<double>(n);
  const double dM = static_cast<double>(M), dN = static_cast<double>(N);
  return std::sqrt(2.0 * (std::log(dM) + std::log(dN) + dm * std::log(dM / dm) +
                          dn * std::log(dN / dn)));
}

/// Penalty values for a fixed M x N, precomputed from a log-factorial table.
/// Matches penalty() bit for bit.
class PenaltyTable {
 public:
  PenaltyTable(Index M, Index N, PenaltyParams params = {})
      : M_(M), N_(N), scale_(2.0 + params.delta) {
    detail::check_delta(params);
    const Index K = std::max(M, N);
    log_fact_.resize(K + 1);
    for (Index k = 0; k <= K; ++k) log_fact_[k] = detail::log_factorial(k);
    row_part_.resize(M + 1);
    col_part_.resize(N + 1);
    const double lM = std::log(static_cast<double>(M));
    const double lN = std::log(static_cast<double>(N));
    for (Index m = 1; m <= M; ++m)
      row_part_[m] = lM + (log_fact_[M] - (log_fact_[m] + log_fact_[M - m]));
    for (Index n = 1; n <= N; ++n)
      col_part_[n] = lN + (log_fact_[N] - (log_fact_[n] + log_fact_[N - n]));
  }

  double operator()(Index m, Index n) const {
    return std::sqrt(scale_ * (row_part_[m] + col_part_[n]));
  }

  Index rows() const noexcept { return M_; }
  Index cols() const noexcept { return N_; }

 private:
  Index M_, N_;
  double scale_;
  std::vector<double> log_fact_;
  std::vector<double> row_part_;
  std::vector<double> col_part_;
};

/// Sum of X over rows x cols, accumulated in row-major order.
inline double submatrix_sum(const DataMatrix& X, const Selection& s) {
  double total = 0.0;
  for (Index i : s.rows) {
    const auto r = X.row(i);
    for (Index j : s.cols) total += r[j];
  }
  return total;
}

inline double mscan_objective(const DataMatrix& X, const Selection& s,
                              PenaltyParams params = {}) {
  validate(s, X.rows(), X.cols());
  const double m = static_cast<double>(s.height()), n = static_cast<double>(s.width());
  return submatrix_sum(X, s) / std::sqrt(m * n) -
         penalty(X.rows(), X.cols(), s.height(), s.width(), params);
}

namespace detail {

inline Index symmetric_difference_size(const IndexSet& a, const IndexSet& b) {
  Index i = 0, j = 0, count = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
      ++count;
    } else {
      ++j;
      ++count;
    }
  }
  return count + (a.size() - i) + (b.size() - j);
}

}  // namespace detail

/// ln(|rows delta| + |cols delta| + 1); zero exactly when est == truth.
inline double err_measure(const Selection& est, const Selection& truth) {
  const Index d = detail::symmetric_difference_size(est.rows, truth.rows) +
                  detail::symmetric_difference_size(est.cols, truth.cols);
  return std::log(static_cast<double>(d) + 1.0);
}

}  // namespace mscan
