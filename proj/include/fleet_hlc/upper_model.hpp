#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "fleet_hlc/edge_estimates.hpp"
#include "fleet_hlc/errors.hpp"
#include "fleet_hlc/scenario.hpp"

namespace fleet_hlc {

// Event-level state of one vehicle: where it is, its soc and the elapsed
// day time at the event.
struct UpperState {
  NodeId node;
  double soc = 0.0;
  double t = 0.0;
  friend bool operator==(const UpperState&, const UpperState&) = default;
};

// Charge for `charge_time` seconds at the current node, then travel `route`.
struct UpperInput {
  std::optional<std::pair<NodeId, NodeId>> route;
  double charge_time = 0.0;
};

// Event model over the learned interval estimates. Transitions use the
// upper bounds (worst case).
struct UpperModel {
  const Scenario* scenario = nullptr;
  const EdgeEstimates* estimates = nullptr;
  double service_time = 0.0;  // dwell at customer nodes

  double travel_time(NodeId a, NodeId b) const {
    return a == b ? 0.0 : estimates->at(a, b).t_hi();
  }
  double travel_energy(NodeId a, NodeId b) const {
    return a == b ? 0.0 : estimates->at(a, b).e_hi();
  }
  double dwell(NodeId n) const { return scenario->is_customer(n) ? service_time : 0.0; }
};

inline constexpr double kSocTolerance = 1e-9;

// Same arithmetic as predict_next, without the feasibility check. Used to
// forecast plans that may already be infeasible.
inline UpperState forecast_step(const UpperState& s, const UpperInput& u, const UpperModel& m) {
  UpperState n = s;
  if (u.charge_time > 0.0) {
    n.soc = std::min(m.scenario->soc_capacity, s.soc + m.scenario->charge_rate * u.charge_time);
    n.t += u.charge_time;
  }
  if (u.route && u.route->first != u.route->second) {
    const auto [a, b] = *u.route;
    n.node = b;
    n.t += m.travel_time(a, b) + m.dwell(b);
    n.soc -= m.travel_energy(a, b);
  }
  return n;
}

inline UpperState predict_next(const UpperState& s, const UpperInput& u, const UpperModel& m) {
  if (u.charge_time < 0.0) throw ContractViolation("predict_next: negative charge time");
  if (u.charge_time > 0.0 && !m.scenario->is_charger(s.node))
    throw ContractViolation("predict_next: charging requested away from a charger");
  if (u.route && u.route->first != s.node)
    throw ContractViolation("predict_next: route does not start at the current node");
  const UpperState n = forecast_step(s, u, m);
  if (n.soc < -kSocTolerance)
    throw InfeasibleTransition("predict_next: forecast soc " + std::to_string(n.soc) + " < 0");
  return n;
}

// One row of a vehicle plan: forecast arrival soc and time at `node`, and how
// long to charge there before leaving. The budgets are the (t_hi, e_hi) of the
// edge used to reach this row, as planned.
struct PlanRow {
  NodeId node;
  double soc_ref = 0.0;
  double k_ref = 0.0;
  double charge_time = 0.0;
  double t_budget = 0.0;
  double e_budget = 0.0;
  friend bool operator==(const PlanRow&, const PlanRow&) = default;
};

struct VehicleRoute {
  int vehicle = 0;
  std::vector<NodeId> cluster;
  std::vector<PlanRow> rows;
  bool exact = true;       // search finished without hitting the expansion cap
  bool emergency = false;  // no tour met the constraints; rows go straight home

  int customers_planned(const Scenario& s) const {
    int n = 0;
    for (const auto& r : rows) n += s.is_customer(r.node) ? 1 : 0;
    return n;
  }
  double min_soc_ref() const {
    double m = rows.empty() ? 0.0 : rows.front().soc_ref;
    for (const auto& r : rows) m = std::min(m, r.soc_ref);
    return m;
  }
  friend bool operator==(const VehicleRoute&, const VehicleRoute&) = default;
};

struct RoutePlan {
  int day = 0;
  std::vector<VehicleRoute> vehicles;
  friend bool operator==(const RoutePlan&, const RoutePlan&) = default;
};

// Rows for visiting `sequence[1..]` from `start`, charging charge_times[i]
// at sequence[i]. The first row is the start itself.
inline std::vector<PlanRow> forecast_rows(const UpperState& start,
                                          const std::vector<NodeId>& sequence,
                                          const std::vector<double>& charge_times,
                                          const UpperModel& m) {
  std::vector<PlanRow> rows;
  rows.reserve(sequence.size());
  UpperState s = start;
  rows.push_back({s.node, s.soc, s.t, charge_times.empty() ? 0.0 : charge_times[0], 0.0, 0.0});
  for (std::size_t i = 1; i < sequence.size(); ++i) {
    const NodeId from = sequence[i - 1];
    const NodeId to = sequence[i];
    s = forecast_step(s, UpperInput{std::pair{from, to}, charge_times[i - 1]}, m);
    rows.push_back({to, s.soc, s.t, i < charge_times.size() ? charge_times[i] : 0.0,
                    m.travel_time(from, to), m.travel_energy(from, to)});
  }
  return rows;
}

}  // namespace fleet_hlc
