#pragma once

#include <numbers>
#include <utility>
#include <vector>

#include "fleet_hlc/bound_estimation.hpp"
#include "fleet_hlc/dynamics.hpp"
#include "fleet_hlc/edge_map.hpp"
#include "fleet_hlc/scenario.hpp"

namespace fleet_hlc {

// Level-1 interval model of one edge. Planning uses the upper bounds.
struct EdgeEstimate {
  BoundEstimate time;
  BoundEstimate energy;
  double t_lo() const { return time.a_hat; }
  double t_hi() const { return time.b_hat; }
  double e_lo() const { return energy.a_hat; }
  double e_hi() const { return energy.b_hat; }
  std::size_t n_samples() const { return time.n; }
  friend bool operator==(const EdgeEstimate&, const EdgeEstimate&) = default;
};

using EdgeEstimates = EdgeMap<EdgeEstimate>;

// Observed per-traversal totals, pooled over both directions and vehicles.
struct EdgeHistory {
  std::vector<double> times;
  std::vector<double> energies;
  friend bool operator==(const EdgeHistory&, const EdgeHistory&) = default;
};

using EdgeHistories = EdgeMap<EdgeHistory>;

struct MotionEnvelope {
  InputLimits input;
  double dt = kDefaultDt;
};

// Conservative traversal-time support for an edge: cruise at the slowest or
// fastest admissible limit, plus worst-case accelerate/brake slack, plus one
// in-place turn of up to pi and one step of discretization.
inline std::pair<double, double> time_envelope(double length, const Envelopes& env,
                                               const MotionEnvelope& m = {}) {
  const double lo = length / env.v_hi;
  const double hi = length / env.v_lo + 2.0 * env.v_hi / m.input.a_max +
                    std::numbers::pi / m.input.delta_max + m.dt;
  return {lo, hi};
}

inline std::pair<double, double> energy_envelope(double length, const Envelopes& env) {
  return {env.alpha_lo * length, env.alpha_hi * length};
}

inline EstimatorConfig time_estimator(double length, double p_e, const Envelopes& env,
                                      const MotionEnvelope& m = {}) {
  const auto [lo, hi] = time_envelope(length, env, m);
  return {p_e, lo, hi};
}

inline EstimatorConfig energy_estimator(double length, double p_e, const Envelopes& env) {
  const auto [lo, hi] = energy_envelope(length, env);
  // zero-length edges still need a non-empty envelope
  return {p_e, lo, std::max(hi, lo + 1e-12)};
}

inline EdgeEstimates update_edge_estimates(const Scenario& s, const EdgeHistories& history,
                                           double p_e, const MotionEnvelope& m = {}) {
  EdgeEstimates out(s.node_count());
  s.edges.for_each([&](int i, int j, const EdgeTruth& e) {
    const auto& h = history.at(i, j);
    auto& est = out.at(i, j);
    est.time = estimate_bounds(h.times, time_estimator(e.length, p_e, s.envelopes, m));
    est.energy = estimate_bounds(h.energies, energy_estimator(e.length, p_e, s.envelopes));
  });
  return out;
}

// Day-one model: every edge at its conservative envelope.
inline EdgeEstimates envelope_estimates(const Scenario& s, const MotionEnvelope& m = {}) {
  return update_edge_estimates(s, EdgeHistories(s.node_count()), 0.95, m);
}

}  // namespace fleet_hlc
