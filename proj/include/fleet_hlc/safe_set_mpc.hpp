#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "fleet_hlc/batch_ocp.hpp"
#include "fleet_hlc/dynamics.hpp"

namespace fleet_hlc {

struct MpcConfig {
  int horizon = 10;
  double dt = kDefaultDt;
  double eps_pos = 0.5;  // arrival radius
  double eps_v = 0.05;   // arrival speed
  // Terminal-state match tolerances against stored safe-set states.
  double match_pos = 1e-6;
  double match_theta = 1e-6;
  double match_v = 1e-6;
  InputLimits input;
};

inline bool at_node(const VehicleState& s, Point node, double eps_pos, double eps_v) {
  return std::hypot(s.z - node.x, s.y - node.y) <= eps_pos && std::abs(s.v) <= eps_v;
}

// Stage cost: 0 once the vehicle is at the node and stopped, 1 otherwise.
inline int stage_cost(const VehicleState& s, Point node, double eps_pos, double eps_v) {
  return at_node(s, node, eps_pos, eps_v) ? 0 : 1;
}

inline constexpr int kInfiniteValue = std::numeric_limits<int>::max();

// The current traversal's reference trajectory with time-to-go labels.
struct SafeSet {
  ReferenceTrajectory ref;
  std::vector<int> value;  // value[k]: remaining not-arrived stages from state k

  std::size_t size() const { return ref.states.size(); }
  const VehicleState& state(std::size_t k) const { return ref.states[k]; }

  // Label of a stored state; any other state is off the set.
  int value_of(const VehicleState& s) const {
    for (std::size_t k = 0; k < ref.states.size(); ++k)
      if (ref.states[k] == s) return value[k];
    return kInfiniteValue;
  }
};

inline SafeSet build_safe_set(const ReferenceTrajectory& ref, double eps_pos, double eps_v) {
  SafeSet ss;
  ss.ref = ref;
  ss.value.assign(ref.states.size(), 0);
  int acc = 0;
  for (std::size_t k = ref.states.size(); k-- > 0;) {
    // The final stored state is the arrival state by construction.
    if (k + 1 < ref.states.size()) acc += stage_cost(ref.states[k], ref.target, eps_pos, eps_v);
    ss.value[k] = acc;
  }
  return ss;
}

struct MpcDecision {
  ControlInput input;
  std::vector<ControlInput> plan;  // N-step plan followed by the stored tail
  std::vector<VehicleState> predicted;  // N+1 predicted states of the chosen plan
  std::size_t matched_index = 0;   // safe-set index of the terminal state
  int terminal_value = kInfiniteValue;
  int cost = kInfiniteValue;
  std::size_t nearest_index = 0;
  bool fallback = false;
  bool arrived = false;
};

namespace detail {

inline std::size_t nearest_state(const SafeSet& ss, const VehicleState& s, std::size_t lo,
                                 std::size_t hi) {
  std::size_t best = lo;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = lo; k < hi; ++k) {
    const auto& r = ss.state(k);
    const double d = (r.z - s.z) * (r.z - s.z) + (r.y - s.y) * (r.y - s.y) +
                     (r.v - s.v) * (r.v - s.v) +
                     wrap_angle(r.theta - s.theta) * wrap_angle(r.theta - s.theta);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

inline ControlInput stored_input(const SafeSet& ss, std::size_t k) {
  return k < ss.ref.inputs.size() ? ss.ref.inputs[k] : ControlInput{};
}

}  // namespace detail

// One receding-horizon decision. Candidate N-step input sequences are rolled
// out under the model; a candidate is admissible if every predicted state and
// input is inside the constraint sets and its terminal state matches a stored
// state in (z, y, theta, v) with predicted soc at least the stored soc. The
// admissible candidate with the lowest stage-cost sum plus terminal value is
// chosen and its first input returned. With no admissible candidate the
// stored input at the nearest-in-time state is replayed.
//
// `hint` restricts the nearest-state search to a window starting there.
inline MpcDecision mpc_step(const VehicleState& current, const SafeSet& ss, double alpha_hat,
                            const MpcConfig& cfg, const EdgeLimits& limits,
                            std::optional<std::size_t> hint = std::nullopt) {
  MpcDecision d;
  const std::size_t n_states = ss.size();
  const auto N = static_cast<std::size_t>(cfg.horizon);
  const Point target = ss.ref.target;

  const std::size_t lo = hint ? std::min(*hint, n_states - 1) : 0;
  const std::size_t hi = hint ? std::min(n_states, lo + 2 * N + 3) : n_states;
  d.nearest_index = detail::nearest_state(ss, current, lo, hi);

  if (at_node(current, target, cfg.eps_pos, cfg.eps_v)) {
    d.arrived = true;
    d.terminal_value = 0;
    d.cost = 0;
    d.matched_index = n_states - 1;
    d.predicted.assign(N + 1, current);
    return d;
  }

  struct Candidate {
    std::size_t shift_base;
    double a_offset;
    std::optional<double> a_override;
  };
  std::vector<Candidate> candidates;
  const std::size_t base = d.nearest_index;
  // Warm start (stored inputs from the nearest state) is evaluated first and
  // wins ties.
  for (std::size_t s : {base, base + 1, base > 0 ? base - 1 : base, base + 2})
    for (double off : {0.0, 0.1 * cfg.input.a_max, -0.1 * cfg.input.a_max})
      candidates.push_back({s, off, std::nullopt});
  candidates.push_back({base, 0.0, 0.0});
  candidates.push_back({base, 0.0, -cfg.input.a_max});

  std::vector<ControlInput> seq(N);
  std::vector<VehicleState> traj(N + 1);
  int best_cost = kInfiniteValue;
  std::vector<ControlInput> best_seq;
  std::vector<VehicleState> best_traj;
  std::size_t best_match = 0;

  const std::size_t win_lo = base;
  const std::size_t win_hi = std::min(n_states, base + 3 * N + 4);

  for (const auto& c : candidates) {
    for (std::size_t t = 0; t < N; ++t) {
      ControlInput u = detail::stored_input(ss, c.shift_base + t);
      u.a = c.a_override ? *c.a_override : u.a + c.a_offset;
      u.a = std::clamp(u.a, -cfg.input.a_max, cfg.input.a_max);
      seq[t] = u;
    }
    traj[0] = current;
    bool ok = true;
    int stage = 0;
    for (std::size_t t = 0; t < N && ok; ++t) {
      stage += stage_cost(traj[t], target, cfg.eps_pos, cfg.eps_v);
      traj[t + 1] = step(traj[t], seq[t], alpha_hat, cfg.dt);
      ok = check_constraints(traj[t + 1], seq[t], limits, cfg.input).empty();
    }
    if (!ok) continue;
    const auto& term = traj[N];
    int term_value = kInfiniteValue;
    std::size_t match = 0;
    for (std::size_t k = win_lo; k < win_hi; ++k) {
      const auto& r = ss.state(k);
      if (std::abs(r.z - term.z) <= cfg.match_pos && std::abs(r.y - term.y) <= cfg.match_pos &&
          std::abs(wrap_angle(r.theta - term.theta)) <= cfg.match_theta &&
          std::abs(r.v - term.v) <= cfg.match_v && term.soc >= r.soc - 1e-12 &&
          ss.value[k] < term_value) {
        term_value = ss.value[k];
        match = k;
      }
    }
    if (term_value == kInfiniteValue) continue;
    const int cost = stage + term_value;
    if (cost < best_cost) {
      best_cost = cost;
      best_seq = seq;
      best_traj = traj;
      best_match = match;
    }
  }

  if (best_cost == kInfiniteValue) {
    d.fallback = true;
    d.input = detail::stored_input(ss, base);
    d.matched_index = base;
    d.terminal_value = ss.value[base];
    d.plan.assign(ss.ref.inputs.begin() + static_cast<std::ptrdiff_t>(std::min(base, ss.ref.inputs.size())),
                  ss.ref.inputs.end());
    return d;
  }
  d.input = best_seq.front();
  d.cost = best_cost;
  d.terminal_value = ss.value[best_match];
  d.matched_index = best_match;
  d.predicted = std::move(best_traj);
  d.plan = best_seq;
  if (best_match < ss.ref.inputs.size())
    d.plan.insert(d.plan.end(), ss.ref.inputs.begin() + static_cast<std::ptrdiff_t>(best_match),
                  ss.ref.inputs.end());
  return d;
}

}  // namespace fleet_hlc
