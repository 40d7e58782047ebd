#pragma once

#include <optional>
#include <vector>

#include "fleet_hlc/batch_ocp.hpp"
#include "fleet_hlc/dynamics.hpp"
#include "fleet_hlc/rate_learning.hpp"
#include "fleet_hlc/safe_set_mpc.hpp"

namespace fleet_hlc {

// Goal handed down for one edge: the next plan row.
struct EdgeGoal {
  NodeId from;
  NodeId to;
  Point target;
  double soc_ref = 0.0;
  double k_ref = 0.0;
};

struct TrajectoryPoint {
  int k = 0;
  VehicleState state;
  ControlInput input;   // input applied from this state (zero on the last point)
  double planned_soc = 0.0;  // reference soc at the same step
};

// Everything the upper level and the logs need from one traversal.
struct TraversalRecord {
  NodeId from;
  NodeId to;
  double t_depart = 0.0;
  double k_ref = 0.0;
  double soc_ref = 0.0;
  int batch_steps = 0;
  double batch_time = 0.0;
  int realized_steps = 0;
  double realized_time = 0.0;
  double predicted_energy = 0.0;
  double realized_energy = 0.0;
  double soc_start = 0.0;
  double soc_end = 0.0;
  double min_soc = 0.0;
  double alpha_hat = 0.0;
  double alpha_plant = 0.0;
  std::optional<double> regressed_alpha;
  std::optional<BindingConstraint> ocp_infeasible;
  int fallback_count = 0;
  int constraint_violations = 0;
  bool value_descent = true;  // terminal value never increased between steps
  bool arrived = false;
  bool stranded = false;
  bool late = false;
  VehicleState final_state;
  std::vector<TrajectoryPoint> trajectory;
};

struct TraverseOptions {
  MpcConfig mpc;
  bool keep_trajectory = true;
  int max_extra_steps = 200;
};

// Solves the batch problem once, stores it as the safe set, then closes the
// loop with mpc_step against the plant until arrival, stranding or the step
// cap. When the batch problem cannot meet the plan's soc or time goal the
// minimum-time trajectory is still used and the binding constraint is
// reported for the upper level.
inline TraversalRecord traverse_edge(const VehicleState& start, const EdgeGoal& goal,
                                     double t_now, double plant_alpha,
                                     const RateEstimate& rate, const EdgeLimits& limits,
                                     const TraverseOptions& opt = {}) {
  TraversalRecord rec;
  rec.from = goal.from;
  rec.to = goal.to;
  rec.t_depart = t_now;
  rec.k_ref = goal.k_ref;
  rec.soc_ref = goal.soc_ref;
  rec.alpha_hat = rate.alpha_hat;
  rec.alpha_plant = plant_alpha;
  rec.soc_start = start.soc;
  rec.min_soc = start.soc;

  const auto& mc = opt.mpc;
  BatchRequest req;
  req.target = goal.target;
  req.soc_ref = std::min(goal.soc_ref, limits.soc_capacity);
  req.time_budget = goal.k_ref - t_now;
  req.alpha_hat = rate.alpha_hat;
  req.edge = limits;
  req.input = mc.input;
  req.dt = mc.dt;
  req.eps_pos = mc.eps_pos;
  req.eps_v = mc.eps_v;
  const BatchSolution batch = solve_batch_ocp(start, req);
  rec.ocp_infeasible = batch.infeasible;
  rec.batch_steps = batch.trajectory.steps();
  rec.batch_time = batch.trajectory.duration();
  rec.predicted_energy = batch.predicted_energy;

  const SafeSet ss = build_safe_set(batch.trajectory, mc.eps_pos, mc.eps_v);
  const auto planned_soc = [&](int k) {
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(k), ss.size() - 1);
    return ss.state(idx).soc;
  };

  VehicleState x = start;
  std::vector<double> speeds{x.v};
  std::vector<double> socs{x.soc};
  std::size_t hint = 0;
  int prev_value = kInfiniteValue;
  const int max_steps = rec.batch_steps + opt.max_extra_steps;
  int k = 0;
  for (; k <= max_steps; ++k) {
    const MpcDecision dec = mpc_step(x, ss, rate.alpha_hat, mc, limits, hint);
    if (dec.arrived) {
      rec.arrived = true;
      break;
    }
    if (k == max_steps) break;
    hint = dec.nearest_index;
    if (dec.fallback) ++rec.fallback_count;
    if (!dec.fallback) {
      if (prev_value != kInfiniteValue && dec.terminal_value > prev_value) rec.value_descent = false;
      prev_value = dec.terminal_value;
    }
    if (opt.keep_trajectory) rec.trajectory.push_back({k, x, dec.input, planned_soc(k)});
    x = step(x, dec.input, plant_alpha, mc.dt);
    // Stranding is reported separately from constraint violations.
    for (const auto& v : check_constraints(x, dec.input, limits, mc.input))
      if (v.bound != Bound::kSocLow) ++rec.constraint_violations;
    speeds.push_back(x.v);
    socs.push_back(x.soc);
    rec.min_soc = std::min(rec.min_soc, x.soc);
    if (x.soc < 0.0) {
      rec.stranded = true;
      ++k;
      break;
    }
  }
  if (opt.keep_trajectory) rec.trajectory.push_back({k, x, ControlInput{}, planned_soc(k)});

  rec.realized_steps = k;
  rec.realized_time = k * mc.dt;
  rec.final_state = x;
  rec.soc_end = x.soc;
  rec.realized_energy = rec.soc_start - rec.soc_end;
  rec.late = rec.arrived && t_now + rec.realized_time > goal.k_ref + 1e-9;
  try {
    rec.regressed_alpha = estimate_rate(speeds, socs, mc.dt);
  } catch (const DataError&) {
    // no motion, no information
  } catch (const ContractViolation&) {
  }
  return rec;
}

}  // namespace fleet_hlc
