#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mscan/objective.hpp"

namespace mscan {

/// Signal-strength reference levels for a planted m* x n* block in an M x N matrix.
struct Thresholds {
  double theta0 = 0.0;
  double theta1 = 0.0;
  double theta_crit = 0.0;
  double constant_c = 0.0;
};

namespace detail {

inline void check_planted_shape(Index M, Index N, Index m_star, Index n_star) {
  if (m_star < 1 || m_star >= M || n_star < 1 || n_star >= N) {
    throw std::domain_error("planted size (" + std::to_string(m_star) + ", " +
                            std::to_string(n_star) + ") must satisfy 1 <= m* < M, 1 <= n* < N");
  }
}

inline double checked_log(double x) {
  if (!(x > 1.0)) {
    throw std::domain_error("theta0: log argument " + std::to_string(x) + " is not > 1");
  }
  return std::log(x);
}

}  // namespace detail

/// Right-hand side of the fixed-point equation C = 2([C/(C-1)]^1.5 + [C/(C-1)]^1.25).
inline double constant_c_rhs(double c) {
  const double r = c / (c - 1.0);
  return 2.0 * (std::pow(r, 1.5) + std::pow(r, 1.25));
}

/// Unique fixed point of constant_c_rhs on (1, inf), by bisection on (1, 100].
/// Evaluates to about 5.3258; see README for why this is not 4.32.
inline double constant_c() {
  double lo = 1.0, hi = 100.0;
  // g(c) = c - rhs(c) is increasing: negative near 1, positive at 100.
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double g = mid - constant_c_rhs(mid);
    if (std::abs(g) < 1e-12 || mid == lo || mid == hi) break;
    (g < 0.0 ? lo : hi) = mid;
  }
  return mid;
}

inline double theta_crit(Index M, Index N, Index m_star, Index n_star) {
  detail::check_planted_shape(M, N, m_star, n_star);
  const double lM = std::log(static_cast<double>(M));
  const double lN = std::log(static_cast<double>(N));
  const double m = static_cast<double>(m_star), n = static_cast<double>(n_star);
  return std::max({std::sqrt(lM / n), std::sqrt(lN / m), std::sqrt((lM + lN) / (m + n))});
}

/// Minimax level for exact recovery when the block size is known. Needs m*, n*, M-m*, N-n* >= 2.
inline double theta0(Index M, Index N, Index m_star, Index n_star) {
  detail::check_planted_shape(M, N, m_star, n_star);
  using detail::checked_log;
  const double m = static_cast<double>(m_star), n = static_cast<double>(n_star);
  const double dM = static_cast<double>(M), dN = static_cast<double>(N);
  const double cols = (std::sqrt(2.0 * checked_log(n)) + std::sqrt(2.0 * checked_log(dN - n))) /
                      std::sqrt(m);
  const double rows = (std::sqrt(2.0 * checked_log(m)) + std::sqrt(2.0 * checked_log(dM - m))) /
                      std::sqrt(n);
  const double joint =
      std::sqrt(2.0 * n * checked_log(dN / n) + 2.0 * m * checked_log(dM / m)) /
      std::sqrt(m * n);
  return std::max({cols, rows, joint});
}

/// Sufficient level for exact recovery by the multiscale statistic (three-term maximum).
inline double theta1(Index M, Index N, Index m_star, Index n_star) {
  detail::check_planted_shape(M, N, m_star, n_star);
  const double m = static_cast<double>(m_star), n = static_cast<double>(n_star);
  const double dM = static_cast<double>(M), dN = static_cast<double>(N);
  const double rows = std::sqrt((std::log(dM - m) + std::log(m)) / n);
  const double cols = std::sqrt((std::log(dN - n) + std::log(n)) / m);
  const double joint = penalty(M, N, m_star, n_star) / std::sqrt(m * n);
  return constant_c() * std::max({rows, cols, joint});
}

inline Thresholds thresholds(Index M, Index N, Index m_star, Index n_star) {
  return {theta0(M, N, m_star, n_star), theta1(M, N, m_star, n_star),
          theta_crit(M, N, m_star, n_star), constant_c()};
}

}  // namespace mscan
