#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fleet_hlc/errors.hpp"
#include "fleet_hlc/rng.hpp"

namespace fleet_hlc {

// Confidence level p_e and the conservative support [a_min, b_max] known a
// priori. A higher p_e tightens more slowly.
struct EstimatorConfig {
  double p_e = 0.95;
  double a_min = 0.0;
  double b_max = 1.0;
};

struct BoundEstimate {
  double a_hat = 0.0;
  double b_hat = 0.0;
  std::size_t n = 0;
  double min_sample = 0.0;  // m, meaningful for n >= 1
  double max_sample = 0.0;  // M
  friend bool operator==(const BoundEstimate&, const BoundEstimate&) = default;
};

inline void validate(const EstimatorConfig& c) {
  if (!(c.p_e > 0.0 && c.p_e < 1.0)) throw ConfigError("p_e", "must lie in (0, 1)");
  if (!(c.a_min < c.b_max)) throw ConfigError("envelope", "a_min must be < b_max");
}

// Relative slack for the envelope check; observations computed through
// floating-point sums can land a few ulps outside an exact envelope.
inline constexpr double kEnvelopeSlack = 1e-9;

// Spread multiplier 1 / (1 - p_e)^(1/(n-1)) for n >= 2 samples.
inline double spread_factor(double p_e, std::size_t n) {
  return 1.0 / std::pow(1.0 - p_e, 1.0 / static_cast<double>(n - 1));
}

// Extreme-value confidence bounds for the support of a uniform distribution,
// clamped to the conservative envelope. With fewer than two samples the
// envelope itself is returned.
inline BoundEstimate estimate_bounds(std::span<const double> samples, const EstimatorConfig& cfg) {
  validate(cfg);
  const double tol = kEnvelopeSlack * std::max({1.0, std::abs(cfg.a_min), std::abs(cfg.b_max)});
  BoundEstimate out;
  out.n = samples.size();
  out.a_hat = cfg.a_min;
  out.b_hat = cfg.b_max;
  if (samples.empty()) return out;

  double m = samples.front(), M = samples.front();
  for (double x : samples) {
    if (!std::isfinite(x)) throw DataError("estimate_bounds: non-finite sample");
    if (x < cfg.a_min - tol || x > cfg.b_max + tol)
      throw DataError("estimate_bounds: sample " + std::to_string(x) + " outside envelope [" +
                      std::to_string(cfg.a_min) + ", " + std::to_string(cfg.b_max) + "]");
    m = std::min(m, x);
    M = std::max(M, x);
  }
  m = std::clamp(m, cfg.a_min, cfg.b_max);
  M = std::clamp(M, cfg.a_min, cfg.b_max);
  out.min_sample = m;
  out.max_sample = M;
  if (samples.size() < 2) return out;

  const double reach = (M - m) * spread_factor(cfg.p_e, samples.size());
  out.a_hat = std::max(cfg.a_min, M - reach);
  out.b_hat = std::min(cfg.b_max, m + reach);
  return out;
}

struct SideCoverage {
  double lower = 0.0;  // fraction of trials with a >= a_hat
  double upper = 0.0;  // fraction of trials with b <= b_hat
  double joint = 0.0;
  std::size_t trials = 0;
};

// Monte-Carlo coverage of estimate_bounds for samples drawn from U(a, b).
// Test oracle only.
inline SideCoverage coverage_probability(double a, double b, std::size_t n, double p_e,
                                         std::size_t trials, CounterRng& rng,
                                         double a_min, double b_max) {
  if (!(a < b)) throw ContractViolation("coverage_probability: need a < b");
  if (n < 2 || trials < 1) throw ContractViolation("coverage_probability: need n >= 2, trials >= 1");
  EstimatorConfig cfg{p_e, a_min, b_max};
  std::vector<double> xs(n);
  std::size_t lo = 0, hi = 0, both = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& x : xs) x = rng.uniform(a, b);
    const auto est = estimate_bounds(xs, cfg);
    const bool l = a >= est.a_hat;
    const bool u = b <= est.b_hat;
    lo += l;
    hi += u;
    both += l && u;
  }
  const double dt = static_cast<double>(trials);
  return {static_cast<double>(lo) / dt, static_cast<double>(hi) / dt,
          static_cast<double>(both) / dt, trials};
}

}  // namespace fleet_hlc
