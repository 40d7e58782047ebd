#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fleet_hlc/errors.hpp"

namespace fleet_hlc {

// Least-squares fit of alpha in soc[k+1] - soc[k] = -alpha * v[k] * dt.
inline double estimate_rate(std::span<const double> v, std::span<const double> soc, double dt) {
  if (v.size() != soc.size() || v.size() < 2)
    throw ContractViolation("estimate_rate: need two equal-length sequences of length >= 2");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    const double x = v[k] * dt;
    num += -(soc[k + 1] - soc[k]) * x;
    den += x * x;
  }
  if (den <= 0.0) throw DataError("estimate_rate: speed is identically zero, rate unidentifiable");
  return num / den;
}

// Conservative energy-rate model used by one vehicle on one edge. Until the
// first regression arrives, `alpha_hat` holds the prior (the envelope's upper
// rate); after that it is the running maximum of all regressed rates.
struct RateEstimate {
  double alpha_hat = 0.5;
  double floor = 0.0;
  std::vector<double> history;
};

inline RateEstimate make_rate_prior(double alpha_env_lo, double alpha_env_hi) {
  return RateEstimate{alpha_env_hi, alpha_env_lo, {}};
}

inline RateEstimate update_rate(const RateEstimate& prev, double regressed) {
  if (!std::isfinite(regressed) || regressed < 0.0)
    throw DataError("update_rate: regressed rate must be finite and >= 0");
  RateEstimate next = prev;
  const double base = prev.history.empty() ? prev.floor : prev.alpha_hat;
  next.alpha_hat = std::max({base, regressed, prev.floor});
  next.history.push_back(regressed);
  return next;
}

}  // namespace fleet_hlc
