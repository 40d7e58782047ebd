#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fleet_hlc/clustering.hpp"
#include "fleet_hlc/edge_estimates.hpp"
#include "fleet_hlc/motion_controller.hpp"
#include "fleet_hlc/plan_tracking.hpp"
#include "fleet_hlc/rate_learning.hpp"
#include "fleet_hlc/route_planner.hpp"
#include "fleet_hlc/scenario.hpp"

namespace fleet_hlc {

struct SimulationConfig {
  std::uint64_t seed = 1;
  int days = 20;
  int vehicles = 2;
  double p_e = 0.95;
  ScenarioConfig scenario;
  double soc_floor = 0.0;
  double service_time = 0.0;
  double rho = 0.2;
  std::int64_t max_expansions = 2'000'000;
  MpcConfig mpc;
  int max_extra_steps = 200;
  bool keep_trajectories = false;
  // Charge until the plan's departure soc is reached, rather than for the
  // planned duration regardless of the arrival soc.
  bool charge_to_plan = true;
};

inline void validate(const SimulationConfig& c) {
  validate(c.scenario);
  if (c.days < 1) throw ConfigError("days", "must be >= 1");
  if (c.vehicles < 1) throw ConfigError("vehicles", "must be >= 1");
  if (!(c.p_e > 0.0 && c.p_e < 1.0)) throw ConfigError("p_e", "must lie in (0, 1)");
  if (!(c.mpc.dt > 0.0)) throw ConfigError("dt", "must be > 0");
  if (c.mpc.horizon < 1) throw ConfigError("horizon", "must be >= 1");
  if (!(c.soc_floor >= 0.0 && c.soc_floor < c.scenario.soc_capacity))
    throw ConfigError("soc_floor", "must lie in [0, soc_capacity)");
  if (!(c.service_time >= 0.0)) throw ConfigError("service_time", "must be >= 0");
  if (!(c.rho > 0.0)) throw ConfigError("rho", "must be > 0");
  if (!(c.mpc.input.a_max > 0.0)) throw ConfigError("a_max", "must be > 0");
  if (!(c.mpc.input.delta_max > 0.0)) throw ConfigError("delta_max", "must be > 0");
  if (!(c.mpc.eps_pos > 0.0)) throw ConfigError("eps_pos", "must be > 0");
  if (!(c.mpc.eps_v > 0.0)) throw ConfigError("eps_v", "must be > 0");
  if (c.max_expansions < 1) throw ConfigError("max_expansions", "must be >= 1");
  if (c.max_extra_steps < 0) throw ConfigError("max_extra_steps", "must be >= 0");
}

inline PlannerOptions planner_options(const SimulationConfig& c) {
  return {c.soc_floor, c.scenario.day_time_limit, c.service_time, c.max_expansions};
}

inline MotionEnvelope motion_envelope(const SimulationConfig& c) { return {c.mpc.input, c.mpc.dt}; }

enum class FailureKind { kNominal, kLate, kStranded };

inline const char* to_string(FailureKind f) {
  switch (f) {
    case FailureKind::kNominal: return "nominal";
    case FailureKind::kLate: return "late";
    case FailureKind::kStranded: return "stranded";
  }
  return "?";
}

inline FailureKind detect_failure(const TraversalRecord& r) {
  if (r.stranded || r.min_soc < 0.0) return FailureKind::kStranded;
  if (r.late || (r.arrived && r.t_depart + r.realized_time > r.k_ref + 1e-9))
    return FailureKind::kLate;
  return FailureKind::kNominal;
}

struct VehicleDayResult {
  int vehicle = 0;
  int customers_visited = 0;
  int customers_planned = 0;
  double tour_time = 0.0;
  double min_soc = 0.0;
  double planned_min_soc = 0.0;
  bool stranded = false;
  bool late = false;
  bool incomplete = false;  // gave up on an edge without arriving or stranding
  int replans = 0;
  bool failure() const { return stranded || incomplete; }
};

struct DayResult {
  int day = 0;
  std::vector<VehicleDayResult> vehicles;
  int replans = 0;
  bool failure = false;
  int customers_visited() const {
    int n = 0;
    for (const auto& v : vehicles) n += v.customers_visited;
    return n;
  }
};

// Node-level events, replans and failures, in execution order.
struct Event {
  int day = 0;
  int vehicle = 0;
  std::string kind;  // arrive, charge, replan, stranded, incomplete, late
  NodeId node;
  double t = 0.0;
  double soc = 0.0;
  std::string detail;
};

struct TraversalLog {
  int day = 0;
  int vehicle = 0;
  TraversalRecord record;
};

struct EdgeSample {
  NodeId a;
  NodeId b;
  double time = 0.0;
  double energy = 0.0;
};

struct RateUpdate {
  int vehicle = 0;
  NodeId a;
  NodeId b;
  double alpha = 0.0;
};

struct DayOutcome {
  DayResult result;
  RoutePlan plan;                      // plan at the start of the day
  std::vector<VehicleRoute> replans;   // replacement tails, in order
  std::vector<TraversalLog> traversals;
  std::vector<Event> events;
  std::vector<EdgeSample> samples;     // completed traversals only
  std::vector<RateUpdate> rate_updates;
};

using VehicleRates = EdgeMap<RateEstimate>;

inline VehicleRates rate_priors(const Scenario& s) {
  VehicleRates r(s.node_count());
  const auto prior = make_rate_prior(s.envelopes.alpha_lo, s.envelopes.alpha_hi);
  s.edges.for_each([&](int i, int j, const EdgeTruth&) { r.at(i, j) = prior; });
  return r;
}

namespace detail {

inline std::vector<NodeId> tail_customers(const Scenario& s, const VehicleRoute& route,
                                          std::size_t position) {
  std::vector<NodeId> out;
  for (std::size_t i = position + 1; i < route.rows.size(); ++i)
    if (s.is_customer(route.rows[i].node)) out.push_back(route.rows[i].node);
  return out;
}

inline void run_vehicle(int v, const VehicleRoute& initial, const Scenario& s,
                        const DailyEnvironment& env, const EdgeEstimates& estimates,
                        const VehicleRates& rates, const SimulationConfig& cfg, int day,
                        DayOutcome& out, VehicleDayResult& res) {
  const UpperModel model{&s, &estimates, cfg.service_time};
  const PlannerOptions popt = planner_options(cfg);
  const ReplanLimits rl{cfg.soc_floor, s.day_time_limit, cfg.rho};
  TraverseOptions topt{cfg.mpc, cfg.keep_trajectories, cfg.max_extra_steps};

  const Point depot = s.nodes[0].position;
  VehicleState x{depot.x, depot.y, 0.0, 0.0, s.soc_capacity};
  double t = 0.0;
  res.vehicle = v;
  res.customers_planned = initial.customers_planned(s);
  res.planned_min_soc = initial.min_soc_ref();
  res.min_soc = x.soc;

  UpperPlanState ps = track_event(start_tracking(initial), {v, kDepot, x.soc, t}, model);
  auto event = [&](std::string kind, NodeId n, std::string detail = {}) {
    out.events.push_back({day, v, std::move(kind), n, t, x.soc, std::move(detail)});
  };

  while (ps.position + 1 < ps.plan.rows.size()) {
    const PlanRow& row = ps.plan.rows[ps.position];
    const PlanRow& next = ps.plan.rows[ps.position + 1];
    if (row.charge_time > 0.0) {
      double duration = row.charge_time;
      if (cfg.charge_to_plan) {
        const double goal_soc = std::min(s.soc_capacity, row.soc_ref + s.charge_rate * row.charge_time);
        duration = std::clamp((goal_soc - x.soc) / s.charge_rate, 0.0, row.charge_time);
      }
      x = charge(x, duration, s.charge_rate, s.soc_capacity);
      t += duration;
      event("charge", row.node, std::to_string(duration));
    }
    if (next.node == row.node) {
      ps = track_event(ps, {v, next.node, x.soc, t}, model);
      continue;
    }
    const NodeId a = row.node, b = next.node;
    const Point target = s.nodes[static_cast<std::size_t>(b.index)].position;
    const EdgeGoal goal{a, b, target, next.soc_ref, next.k_ref};
    TraversalRecord rec = traverse_edge(x, goal, t, env.alpha.at(a, b), rates.at(a, b),
                                        EdgeLimits{s.edges.at(a, b).v_max, s.soc_capacity}, topt);
    res.min_soc = std::min(res.min_soc, rec.min_soc);
    if (rec.regressed_alpha) out.rate_updates.push_back({v, a, b, *rec.regressed_alpha});
    const FailureKind fk = detect_failure(rec);
    const bool arrived = rec.arrived && !rec.stranded;
    t += rec.realized_time;
    x = rec.final_state;
    out.traversals.push_back({day, v, std::move(rec)});
    const TraversalRecord& r = out.traversals.back().record;

    if (!arrived) {
      // Towed: out of service for the rest of the day.
      if (r.stranded) {
        res.stranded = true;
        event("stranded", b, "soc " + std::to_string(r.min_soc));
      } else {
        res.incomplete = true;
        event("incomplete", b);
      }
      res.tour_time = t;
      return;
    }
    out.samples.push_back({a, b, r.realized_time, r.realized_energy});
    if (fk == FailureKind::kLate) {
      res.late = true;
      event("late", b, "k_ref " + std::to_string(r.k_ref));
    }

    // Full stop at the node.
    x.z = target.x;
    x.y = target.y;
    x.v = 0.0;
    if (s.is_customer(b)) {
      ++res.customers_visited;
      t += cfg.service_time;
    }
    event("arrive", b);
    ps = track_event(ps, {v, b, x.soc, t}, model);

    if (ps.position + 1 >= ps.plan.rows.size()) break;
    const ReplanDecision d = should_replan(ps, estimates, rl);
    if (!d) continue;
    TourProblem problem;
    problem.start = {b, x.soc, t};
    problem.customers = tail_customers(s, ps.plan, ps.position);
    problem.chargers = s.chargers();
    problem.options = popt;
    const TourResult tour = plan_tour(problem, model);
    VehicleRoute route = route_from_tour(v, problem, tour, model);
    route.cluster = initial.cluster;
    ++res.replans;
    event("replan", b, d.reason);
    out.replans.push_back(route);
    ps = track_event(start_tracking(route), {v, b, x.soc, t}, model);
  }
  res.tour_time = t;
}

}  // namespace detail

// One day of the closed loop. Vehicles share no state within a day, so they
// are executed one after another in vehicle order.
inline DayOutcome run_day(const Scenario& s, const DailyEnvironment& env,
                          const EdgeEstimates& estimates, const std::vector<VehicleRates>& rates,
                          const SimulationConfig& cfg) {
  DayOutcome out;
  out.result.day = env.day;
  out.plan.day = env.day;
  const auto clusters = cluster_customers(s, cfg.vehicles, cfg.seed);
  out.plan = plan_routes(clusters, estimates, s, planner_options(cfg), cfg.vehicles);
  out.plan.day = env.day;
  for (int v = 0; v < cfg.vehicles; ++v) {
    VehicleDayResult res;
    detail::run_vehicle(v, out.plan.vehicles[static_cast<std::size_t>(v)], s, env, estimates,
                        rates[static_cast<std::size_t>(v)], cfg, env.day, out, res);
    out.result.replans += res.replans;
    out.result.failure = out.result.failure || res.failure();
    out.result.vehicles.push_back(res);
  }
  return out;
}

struct RunMetrics {
  Scenario scenario;
  std::vector<DayResult> days;
  std::vector<EdgeEstimates> estimates;  // estimates used to plan each day
  std::vector<RoutePlan> plans;
  std::vector<std::vector<VehicleRoute>> replans;
  std::vector<TraversalLog> traversals;
  std::vector<Event> events;
};

struct RunState {
  EdgeHistories history;
  std::vector<VehicleRates> rates;
};

// Daily protocol: plan with the current estimates, execute, then fold the
// day's data into the estimator history and the per-vehicle rate models.
inline RunMetrics run_simulation(const SimulationConfig& cfg) {
  validate(cfg);
  RunMetrics m;
  m.scenario = generate_scenario(cfg.scenario, cfg.seed);
  const Scenario& s = m.scenario;
  RunState st{EdgeHistories(s.node_count()),
              std::vector<VehicleRates>(static_cast<std::size_t>(cfg.vehicles), rate_priors(s))};
  for (int day = 1; day <= cfg.days; ++day) {
    const EdgeEstimates estimates = update_edge_estimates(s, st.history, cfg.p_e, motion_envelope(cfg));
    DayOutcome out = run_day(s, sample_day(s, day), estimates, st.rates, cfg);
    for (const auto& smp : out.samples) {
      auto& h = st.history.at(smp.a, smp.b);
      h.times.push_back(smp.time);
      h.energies.push_back(smp.energy);
    }
    for (const auto& u : out.rate_updates) {
      auto& r = st.rates[static_cast<std::size_t>(u.vehicle)].at(u.a, u.b);
      r = update_rate(r, u.alpha);
    }
    m.days.push_back(out.result);
    m.estimates.push_back(estimates);
    m.plans.push_back(std::move(out.plan));
    m.replans.push_back(std::move(out.replans));
    for (auto& t : out.traversals) m.traversals.push_back(std::move(t));
    for (auto& e : out.events) m.events.push_back(std::move(e));
  }
  return m;
}

}  // namespace fleet_hlc
