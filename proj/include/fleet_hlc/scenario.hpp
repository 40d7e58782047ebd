#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fleet_hlc/edge_map.hpp"
#include "fleet_hlc/errors.hpp"
#include "fleet_hlc/rng.hpp"

namespace fleet_hlc {

enum class NodeKind { kDepot, kCustomer, kCharger };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::kDepot: return "depot";
    case NodeKind::kCustomer: return "customer";
    case NodeKind::kCharger: return "charger";
  }
  return "?";
}

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

struct Node {
  NodeId id;
  NodeKind kind = NodeKind::kCustomer;
  Point position;
  friend bool operator==(const Node&, const Node&) = default;
};

// Ground truth for one undirected edge. The daily energy rate is uniform on
// [alpha_lo, alpha_hi]; v_max is fixed for the whole run.
struct EdgeTruth {
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  double v_max = 0.0;
  double length = 0.0;
  friend bool operator==(const EdgeTruth&, const EdgeTruth&) = default;
};

// Global envelopes known to every controller: alpha in [alpha_lo, alpha_hi],
// speed limits in [v_lo, v_hi].
struct Envelopes {
  double alpha_lo = 0.2;
  double alpha_hi = 0.5;
  double v_lo = 3.0;
  double v_hi = 10.0;
  friend bool operator==(const Envelopes&, const Envelopes&) = default;
};

struct ScenarioConfig {
  int customers = 20;
  int chargers = 2;
  Envelopes envelopes;
  double charge_rate = 3.0;    // soc per second
  double soc_capacity = 100.0;
  double day_time_limit = 100.0;  // seconds
  double map_width = 100.0;
  double map_height = 100.0;
};

struct Scenario {
  std::vector<Node> nodes;
  EdgeMap<EdgeTruth> edges;
  double charge_rate = 3.0;
  double soc_capacity = 100.0;
  double day_time_limit = 100.0;
  Envelopes envelopes;
  double map_width = 100.0;
  double map_height = 100.0;
  std::uint64_t seed = 0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  const Node& node(NodeId id) const { return nodes.at(static_cast<std::size_t>(id.index)); }
  const EdgeTruth& edge(NodeId i, NodeId j) const { return edges.at(i, j); }

  std::vector<NodeId> customers() const { return of_kind(NodeKind::kCustomer); }
  std::vector<NodeId> chargers() const { return of_kind(NodeKind::kCharger); }
  bool is_charger(NodeId id) const { return node(id).kind == NodeKind::kCharger; }
  bool is_customer(NodeId id) const { return node(id).kind == NodeKind::kCustomer; }

  std::vector<NodeId> of_kind(NodeKind k) const {
    std::vector<NodeId> out;
    for (const auto& n : nodes)
      if (n.kind == k) out.push_back(n.id);
    return out;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Realized per-edge energy rates for one day.
struct DailyEnvironment {
  int day = 1;
  EdgeMap<double> alpha;
  double rate(NodeId i, NodeId j) const { return alpha.at(i, j); }
  friend bool operator==(const DailyEnvironment&, const DailyEnvironment&) = default;
};

inline void validate(const Envelopes& e) {
  if (!(e.alpha_lo > 0.0)) throw ConfigError("alpha_env_lo", "must be > 0");
  if (!(e.alpha_lo < e.alpha_hi)) throw ConfigError("alpha_env_hi", "must exceed alpha_env_lo");
  if (!(e.v_lo > 0.0)) throw ConfigError("v_env_lo", "must be > 0");
  if (!(e.v_lo < e.v_hi)) throw ConfigError("v_env_hi", "must exceed v_env_lo");
}

inline void validate(const ScenarioConfig& c) {
  if (c.customers < 1) throw ConfigError("customers", "must be >= 1");
  if (c.chargers < 0) throw ConfigError("chargers", "must be >= 0");
  validate(c.envelopes);
  if (!(c.charge_rate > 0.0)) throw ConfigError("charge_rate", "must be > 0");
  if (!(c.soc_capacity > 0.0)) throw ConfigError("soc_capacity", "must be > 0");
  if (!(c.day_time_limit > 0.0)) throw ConfigError("day_time_limit", "must be > 0");
  if (!(c.map_width > 0.0)) throw ConfigError("map_width", "must be > 0");
  if (!(c.map_height > 0.0)) throw ConfigError("map_height", "must be > 0");
}

inline double edge_length(const Scenario& s, NodeId i, NodeId j) {
  if (i == j) return 0.0;
  return distance(s.node(i).position, s.node(j).position);
}

// Recomputes lengths from node positions. Used after building or editing
// a scenario by hand.
inline void refresh_lengths(Scenario& s) {
  s.edges.for_each([&](int i, int j, EdgeTruth& e) {
    e.length = edge_length(s, NodeId{i}, NodeId{j});
  });
}

// Node 0 is the depot, then customers, then chargers.
inline Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  validate(config);
  Scenario s;
  s.seed = seed;
  s.charge_rate = config.charge_rate;
  s.soc_capacity = config.soc_capacity;
  s.day_time_limit = config.day_time_limit;
  s.envelopes = config.envelopes;
  s.map_width = config.map_width;
  s.map_height = config.map_height;

  const int n = 1 + config.customers + config.chargers;
  s.nodes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    CounterRng rng(seed, RngPurpose::kNodePosition, {static_cast<std::uint64_t>(i)});
    Node node;
    node.id = NodeId{i};
    node.kind = i == 0 ? NodeKind::kDepot
                : i <= config.customers ? NodeKind::kCustomer
                                        : NodeKind::kCharger;
    node.position.x = rng.uniform(0.0, config.map_width);
    node.position.y = rng.uniform(0.0, config.map_height);
    s.nodes.push_back(node);
  }

  const auto& env = config.envelopes;
  s.edges = EdgeMap<EdgeTruth>(n);
  s.edges.for_each([&](int i, int j, EdgeTruth& e) {
    const auto ui = static_cast<std::uint64_t>(i);
    const auto uj = static_cast<std::uint64_t>(j);
    CounterRng alpha_rng(seed, RngPurpose::kEdgeAlphaInterval, {ui, uj});
    double a = 0.0, b = 0.0;
    do {
      a = alpha_rng.uniform(env.alpha_lo, env.alpha_hi);
      b = alpha_rng.uniform(env.alpha_lo, env.alpha_hi);
    } while (a == b);
    e.alpha_lo = std::min(a, b);
    e.alpha_hi = std::max(a, b);
    CounterRng speed_rng(seed, RngPurpose::kEdgeSpeedLimit, {ui, uj});
    e.v_max = speed_rng.uniform(env.v_lo, env.v_hi);
  });
  refresh_lengths(s);
  return s;
}

// One realized rate per edge, drawn once per day.
inline DailyEnvironment sample_day(const Scenario& s, int day) {
  if (day < 1) throw ContractViolation("sample_day: day must be >= 1");
  DailyEnvironment env;
  env.day = day;
  env.alpha = EdgeMap<double>(s.node_count());
  s.edges.for_each([&](int i, int j, const EdgeTruth& e) {
    CounterRng rng(s.seed, RngPurpose::kDailyAlpha,
                   {static_cast<std::uint64_t>(day), static_cast<std::uint64_t>(i),
                    static_cast<std::uint64_t>(j)});
    double a = rng.uniform(e.alpha_lo, e.alpha_hi);
    env.alpha.at(i, j) = std::min(a, e.alpha_hi);
  });
  return env;
}

}  // namespace fleet_hlc
