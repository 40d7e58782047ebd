#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fleet_hlc/upper_model.hpp"

namespace fleet_hlc {

// Realized upper-level event (what a vehicle reports when it reaches a node).
struct UpperObservation {
  int vehicle = 0;
  NodeId node;
  double soc = 0.0;
  double t = 0.0;
};

struct TrackingTolerances {
  double soc = 1e-6;
  double time = 1e-6;
};

// Tracked plan: realized events so far plus the forecast of the rest of the
// plan from the latest realized state.
struct UpperPlanState {
  VehicleRoute plan;
  std::vector<UpperState> realized;
  std::vector<UpperState> forecast;  // rows after `position`, re-forecast
  std::size_t position = 0;          // plan row of the latest realized event
  bool divergent = false;
  std::string divergence;
};

inline UpperPlanState start_tracking(const VehicleRoute& plan) {
  UpperPlanState ps;
  ps.plan = plan;
  return ps;
}

// Re-forecasts the plan tail from the latest realized state.
inline std::vector<UpperState> forecast_tail(const UpperPlanState& ps, const UpperModel& m) {
  std::vector<UpperState> out;
  if (ps.realized.empty()) {
    for (const auto& r : ps.plan.rows) out.push_back({r.node, r.soc_ref, r.k_ref});
    return out;
  }
  UpperState s = ps.realized.back();
  const auto& rows = ps.plan.rows;
  for (std::size_t i = ps.position; i + 1 < rows.size(); ++i) {
    s = forecast_step(s, UpperInput{std::pair{rows[i].node, rows[i + 1].node}, rows[i].charge_time}, m);
    out.push_back(s);
  }
  return out;
}

inline UpperPlanState track_event(const UpperPlanState& prev, const UpperObservation& obs,
                                  const UpperModel& m, const TrackingTolerances& tol = {}) {
  UpperPlanState ps = prev;
  const auto& rows = ps.plan.rows;
  const std::size_t expected = ps.realized.empty() ? 0 : ps.position + 1;
  if (expected >= rows.size() || rows[expected].node != obs.node) {
    ps.divergent = true;
    ps.divergence = "node " + std::to_string(obs.node.index) + " not next in plan";
    ps.realized.push_back({obs.node, obs.soc, obs.t});
    ps.forecast.clear();
    return ps;
  }
  ps.position = expected;
  const auto& row = rows[expected];
  if (obs.soc < row.soc_ref - tol.soc) {
    ps.divergent = true;
    ps.divergence = "soc below forecast";
  } else if (obs.t > row.k_ref + tol.time) {
    ps.divergent = true;
    ps.divergence = "arrival after forecast";
  }
  ps.realized.push_back({obs.node, obs.soc, obs.t});
  ps.forecast = forecast_tail(ps, m);
  return ps;
}

struct ReplanLimits {
  double soc_floor = 0.0;
  double day_time_limit = 100.0;
  double rho = 0.2;  // relative change of a planned edge budget
};

struct ReplanDecision {
  bool replan = false;
  std::string reason;
  explicit operator bool() const { return replan; }
};

// Triggers: divergence, a forecast that breaks the soc floor or the day
// limit, or a planned, not yet travelled edge whose (t_hi, e_hi) moved by
// more than rho relative to what the plan used.
inline ReplanDecision should_replan(const UpperPlanState& ps, const EdgeEstimates& estimates,
                                    const ReplanLimits& lim) {
  if (ps.divergent) return {true, "divergence: " + ps.divergence};
  for (const auto& s : ps.forecast) {
    if (s.soc < lim.soc_floor - kSocTolerance) return {true, "forecast soc below floor"};
    if (s.t > lim.day_time_limit + 1e-9) return {true, "forecast exceeds day limit"};
  }
  const auto& rows = ps.plan.rows;
  const std::size_t from = ps.realized.empty() ? 0 : ps.position;
  for (std::size_t i = from; i + 1 < rows.size(); ++i) {
    const NodeId a = rows[i].node, b = rows[i + 1].node;
    if (a == b) continue;
    const auto& est = estimates.at(a, b);
    auto moved = [&](double now, double then) {
      return then > 0.0 && std::abs(now - then) / then > lim.rho;
    };
    if (moved(est.t_hi(), rows[i + 1].t_budget) || moved(est.e_hi(), rows[i + 1].e_budget))
      return {true, "estimate change on edge " + std::to_string(a.index) + "-" +
                        std::to_string(b.index)};
  }
  return {};
}

}  // namespace fleet_hlc
