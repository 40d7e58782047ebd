#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "fleet_hlc/dynamics.hpp"
#include "fleet_hlc/errors.hpp"
#include "fleet_hlc/scenario.hpp"

namespace fleet_hlc {

// A dynamically consistent state/input sequence: states[k + 1] is
// step(states[k], inputs[k]) under the model rate.
struct ReferenceTrajectory {
  std::vector<VehicleState> states;
  std::vector<ControlInput> inputs;
  double dt = kDefaultDt;
  double alpha = 0.0;
  Point target;

  int steps() const { return static_cast<int>(inputs.size()); }
  double duration() const { return steps() * dt; }
  const VehicleState& final_state() const { return states.back(); }
};

enum class BindingConstraint { kSoc, kTime };

inline const char* to_string(BindingConstraint b) {
  return b == BindingConstraint::kSoc ? "soc" : "time";
}

struct BatchRequest {
  Point target;
  double soc_ref = 0.0;      // required soc on arrival
  double time_budget = 1e9;  // seconds available until k_ref
  double alpha_hat = 0.5;
  EdgeLimits edge;
  InputLimits input;
  double dt = kDefaultDt;
  double eps_pos = 0.5;
  double eps_v = 0.05;
};

// The minimum-time trajectory is always returned. `infeasible` names the
// first bound the trajectory cannot meet; in that case no trajectory meets
// it, because the energy of an edge does not depend on the speed profile and
// no trajectory is faster.
struct BatchSolution {
  ReferenceTrajectory trajectory;
  std::optional<BindingConstraint> infeasible;
  double predicted_energy = 0.0;
  bool feasible() const { return !infeasible.has_value(); }
};

namespace detail {

// Speed profile on the time grid: v[0] = v0, v[K] = 0, |v[k+1]-v[k]| <= dv,
// 0 <= v[k] <= v_max. The pointwise-largest such profile is the minimum of
// the forward (accelerate), cruise and backward (brake) envelopes.
inline std::vector<double> fastest_profile(int K, double v0, double dv, double v_max) {
  std::vector<double> v(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k)
    v[static_cast<std::size_t>(k)] = std::min({v0 + k * dv, v_max, (K - k) * dv});
  v[0] = v0;
  return v;
}

inline std::vector<double> slowest_profile(int K, double v0, double dv) {
  std::vector<double> v(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) v[static_cast<std::size_t>(k)] = std::max(v0 - k * dv, 0.0);
  v[static_cast<std::size_t>(K)] = 0.0;
  return v;
}

inline double travelled(const std::vector<double>& v, double dt) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) s += v[k] * dt;
  return s;
}

// Smallest step count whose fastest rest-to-rest profile covers `length`.
inline int min_steps(double length, double v0, double dv, double v_max, double dt) {
  auto reach = [&](int K) { return travelled(fastest_profile(K, v0, dv, v_max), dt); };
  int hi = 1;
  while (reach(hi) < length) hi *= 2;
  int lo = hi / 2;  // reach(lo) < length or lo == 0
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (reach(mid) >= length ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

// Minimum-time rest-to-rest traversal along the straight segment from the
// start position to the target: turn in place onto the segment heading, then
// follow the time-optimal longitudinal profile scaled to land exactly on the
// target.
inline BatchSolution solve_batch_ocp(const VehicleState& start, const BatchRequest& req) {
  if (req.soc_ref > req.edge.soc_capacity + 1e-9)
    throw ContractViolation("solve_batch_ocp: soc_ref above capacity");
  if (start.v > req.eps_v) throw ContractViolation("solve_batch_ocp: start must be at rest");

  BatchSolution sol;
  ReferenceTrajectory& ref = sol.trajectory;
  ref.dt = req.dt;
  ref.alpha = req.alpha_hat;
  ref.target = req.target;
  ref.states.push_back(start);

  const double dz = req.target.x - start.z;
  const double dy = req.target.y - start.y;
  const double length = std::hypot(dz, dy);

  if (length > 1e-9) {
    const double heading = std::atan2(dy, dz);
    const double turn = wrap_angle(heading - start.theta);
    const double per_step = req.input.delta_max * req.dt;
    if (std::abs(turn) > 1e-12) {
      const int R = static_cast<int>(std::ceil(std::abs(turn) / per_step - 1e-9));
      ref.inputs.insert(ref.inputs.end(), static_cast<std::size_t>(R),
                        ControlInput{0.0, turn / (R * req.dt)});
    }
    const double v0 = std::max(0.0, start.v);
    const double dv = req.input.a_max * req.dt;
    const int K = detail::min_steps(length, v0, dv, req.edge.v_max, req.dt);
    const auto fast = detail::fastest_profile(K, v0, dv, req.edge.v_max);
    const auto slow = detail::slowest_profile(K, v0, dv);
    const double d_fast = detail::travelled(fast, req.dt);
    const double d_slow = detail::travelled(slow, req.dt);
    const double lambda =
        d_fast > d_slow ? std::clamp((length - d_slow) / (d_fast - d_slow), 0.0, 1.0) : 1.0;
    std::vector<double> v(fast.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = lambda * fast[k] + (1.0 - lambda) * slow[k];
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      const double a = std::clamp((v[k + 1] - v[k]) / req.dt, -req.input.a_max, req.input.a_max);
      ref.inputs.push_back({a, 0.0});
    }
  }

  for (const auto& u : ref.inputs) ref.states.push_back(step(ref.states.back(), u, req.alpha_hat, req.dt));
  sol.predicted_energy = start.soc - ref.final_state().soc;
  const double arrival_soc = ref.final_state().soc;
  if (arrival_soc < req.soc_ref - 1e-9)
    sol.infeasible = BindingConstraint::kSoc;
  else if (ref.duration() > req.time_budget + 1e-9)
    sol.infeasible = BindingConstraint::kTime;
  return sol;
}

}  // namespace fleet_hlc
