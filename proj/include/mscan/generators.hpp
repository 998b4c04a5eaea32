#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "mscan/matrix.hpp"
#include "mscan/random.hpp"

namespace mscan {

/// Base measure nu (mean 0, variance 1) and its exponential tilts f_theta.
enum class Family { gaussian, poisson, rademacher };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::poisson: return "poisson";
    case Family::rademacher: return "rademacher";
  }
  return "unknown";
}

inline std::optional<Family> parse_family(std::string_view name) {
  if (name == "gaussian" || name == "normal") return Family::gaussian;
  if (name == "poisson") return Family::poisson;
  if (name == "rademacher") return Family::rademacher;
  return std::nullopt;
}

struct GenerationSpec {
  Family family = Family::gaussian;
  Index M = 1;
  Index N = 1;
  Index m_star = 1;
  Index n_star = 1;
  double theta = 0.0;  // natural parameter of the tilt
  std::uint64_t seed = 0;
};

inline void validate(const GenerationSpec& spec) {
  if (spec.M < 1 || spec.N < 1) throw std::domain_error("generate: M and N must be positive");
  if (spec.m_star < 1 || spec.m_star > spec.M || spec.n_star < 1 || spec.n_star > spec.N) {
    throw std::domain_error("generate: planted size must satisfy 1 <= m* <= M, 1 <= n* <= N");
  }
  if (!(spec.theta >= 0.0) || std::isnan(spec.theta)) {
    throw std::domain_error("generate: theta must be nonnegative");
  }
  if (spec.family != Family::rademacher && !std::isfinite(spec.theta)) {
    throw std::domain_error("generate: theta must be finite for " +
                            std::string(to_string(spec.family)));
  }
}

/// Draws from the tilted law f_theta of one family. theta = 0 gives nu itself.
class TiltedSampler {
 public:
  TiltedSampler(Family family, double theta) : family_(family), theta_(theta) {
    switch (family_) {
      case Family::gaussian: break;
      case Family::poisson: poisson_mean_ = std::exp(theta); break;
      // e^t / (e^t + e^-t), written to stay exact at large theta
      case Family::rademacher: plus_prob_ = 1.0 / (1.0 + std::exp(-2.0 * theta)); break;
    }
  }

  double operator()(Xoshiro256& rng) const {
    switch (family_) {
      case Family::gaussian: return theta_ + rng.normal();
      case Family::poisson: return static_cast<double>(rng.poisson(poisson_mean_)) - 1.0;
      case Family::rademacher: return rng.uniform() < plus_prob_ ? 1.0 : -1.0;
    }
    return 0.0;
  }

  /// Mean of f_theta, i.e. the derivative of the log-MGF at theta.
  double mean() const {
    switch (family_) {
      case Family::gaussian: return theta_;
      case Family::poisson: return poisson_mean_ - 1.0;
      case Family::rademacher: return std::tanh(theta_);
    }
    return 0.0;
  }

 private:
  Family family_;
  double theta_;
  double poisson_mean_ = 1.0;
  double plus_prob_ = 0.5;
};

/// Seed of the RNG stream for matrix row `row`; rows are independent streams.
inline std::uint64_t row_stream_seed(std::uint64_t seed, Index row) {
  return derive_seed(seed, row);
}

/// Planted block occupies rows [0, m*) and columns [0, n*).
inline std::pair<DataMatrix, Selection> generate(const GenerationSpec& spec) {
  validate(spec);
  DataMatrix X(spec.M, spec.N);
  const TiltedSampler background(spec.family, 0.0);
  const TiltedSampler anomaly(spec.family, spec.theta);
  for (Index i = 0; i < spec.M; ++i) {
    Xoshiro256 rng(row_stream_seed(spec.seed, i));
    auto row = X.row(i);
    const bool planted_row = i < spec.m_star;
    for (Index j = 0; j < spec.N; ++j) {
      row[j] = (planted_row && j < spec.n_star) ? anomaly(rng) : background(rng);
    }
  }
  return {std::move(X), Selection{first_indices(spec.m_star), first_indices(spec.n_star)}};
}

}  // namespace mscan
