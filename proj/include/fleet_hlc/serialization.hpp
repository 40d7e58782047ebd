#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fleet_hlc/orchestrator.hpp"

namespace fleet_hlc {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

// ---- scenario ---------------------------------------------------------------

inline Json envelopes_to_json(const Envelopes& e) {
  return {{"alpha_lo", e.alpha_lo}, {"alpha_hi", e.alpha_hi}, {"v_lo", e.v_lo}, {"v_hi", e.v_hi}};
}

inline Json to_json(const Scenario& s) {
  Json nodes = Json::array();
  for (const auto& n : s.nodes)
    nodes.push_back({{"id", n.id.index}, {"kind", to_string(n.kind)},
                     {"x", n.position.x}, {"y", n.position.y}});
  Json edges = Json::array();
  s.edges.for_each([&](int i, int j, const EdgeTruth& e) {
    edges.push_back({{"i", i}, {"j", j}, {"alpha_lo", e.alpha_lo}, {"alpha_hi", e.alpha_hi},
                     {"v_max", e.v_max}, {"length", e.length}});
  });
  return {{"format_version", kFormatVersion},
          {"seed", s.seed},
          {"charge_rate", s.charge_rate},
          {"soc_capacity", s.soc_capacity},
          {"day_time_limit", s.day_time_limit},
          {"map_size", {s.map_width, s.map_height}},
          {"envelopes", envelopes_to_json(s.envelopes)},
          {"nodes", nodes},
          {"edges", edges}};
}

namespace detail {

template <typename T>
T get_field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw DataError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(where + ": field '" + key + "' has the wrong type");
  }
}

inline NodeKind parse_kind(const std::string& k) {
  if (k == "depot") return NodeKind::kDepot;
  if (k == "customer") return NodeKind::kCustomer;
  if (k == "charger") return NodeKind::kCharger;
  throw DataError("scenario: unknown node kind '" + k + "'");
}

inline void check_version(const Json& j, const std::string& where) {
  if (get_field<int>(j, "format_version", where) != kFormatVersion)
    throw DataError(where + ": unsupported format_version");
}

}  // namespace detail

inline Scenario scenario_from_json(const Json& j) {
  using detail::get_field;
  detail::check_version(j, "scenario");
  Scenario s;
  s.seed = get_field<std::uint64_t>(j, "seed", "scenario");
  s.charge_rate = get_field<double>(j, "charge_rate", "scenario");
  s.soc_capacity = get_field<double>(j, "soc_capacity", "scenario");
  s.day_time_limit = get_field<double>(j, "day_time_limit", "scenario");
  const auto map = get_field<std::vector<double>>(j, "map_size", "scenario");
  if (map.size() != 2) throw DataError("scenario: map_size must be [width, height]");
  s.map_width = map[0];
  s.map_height = map[1];
  const Json env = get_field<Json>(j, "envelopes", "scenario");
  s.envelopes = {get_field<double>(env, "alpha_lo", "envelopes"),
                 get_field<double>(env, "alpha_hi", "envelopes"),
                 get_field<double>(env, "v_lo", "envelopes"),
                 get_field<double>(env, "v_hi", "envelopes")};
  const Json nodes = get_field<Json>(j, "nodes", "scenario");
  if (!nodes.is_array() || nodes.empty()) throw DataError("scenario: nodes must be a nonempty array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Node n;
    n.id = NodeId{get_field<int>(nodes[i], "id", "node")};
    if (n.id.index != static_cast<int>(i)) throw DataError("scenario: node ids must be 0..n-1 in order");
    n.kind = detail::parse_kind(get_field<std::string>(nodes[i], "kind", "node"));
    n.position = {get_field<double>(nodes[i], "x", "node"), get_field<double>(nodes[i], "y", "node")};
    s.nodes.push_back(n);
  }
  if (s.nodes.front().kind != NodeKind::kDepot) throw DataError("scenario: node 0 must be the depot");
  s.edges = EdgeMap<EdgeTruth>(s.node_count());
  std::vector<bool> seen(s.edges.size(), false);
  for (const auto& e : get_field<Json>(j, "edges", "scenario")) {
    const int a = get_field<int>(e, "i", "edge"), b = get_field<int>(e, "j", "edge");
    if (a == b || a < 0 || b < 0 || a >= s.node_count() || b >= s.node_count())
      throw DataError("scenario: edge endpoints out of range");
    auto& t = s.edges.at(a, b);
    t.alpha_lo = get_field<double>(e, "alpha_lo", "edge");
    t.alpha_hi = get_field<double>(e, "alpha_hi", "edge");
    t.v_max = get_field<double>(e, "v_max", "edge");
    seen[s.edges.slot(a, b)] = true;
  }
  for (bool b : seen)
    if (!b) throw DataError("scenario: edge list does not cover the complete graph");
  refresh_lengths(s);
  return s;
}

// ---- estimates --------------------------------------------------------------

inline Json bound_to_json(const BoundEstimate& b) {
  return {{"lo", b.a_hat}, {"hi", b.b_hat}, {"n", b.n}, {"m", b.min_sample}, {"M", b.max_sample}};
}

inline BoundEstimate bound_from_json(const Json& j) {
  using detail::get_field;
  return {get_field<double>(j, "lo", "bound"), get_field<double>(j, "hi", "bound"),
          get_field<std::size_t>(j, "n", "bound"), get_field<double>(j, "m", "bound"),
          get_field<double>(j, "M", "bound")};
}

inline Json to_json(const EdgeEstimates& est, int day, double p_e) {
  Json edges = Json::array();
  est.for_each([&](int i, int j, const EdgeEstimate& e) {
    edges.push_back({{"i", i}, {"j", j}, {"time", bound_to_json(e.time)},
                     {"energy", bound_to_json(e.energy)}});
  });
  return {{"format_version", kFormatVersion}, {"day", day}, {"p_e", p_e}, {"edges", edges}};
}

struct EstimatesLoad {
  EdgeEstimates estimates;
  int missing = 0;  // edges filled from the envelope
};

// Edges absent from the document default to the scenario's envelope.
inline EstimatesLoad estimates_from_json(const Json& j, const Scenario& s,
                                         const MotionEnvelope& m = {}) {
  using detail::get_field;
  if (j.contains("format_version")) detail::check_version(j, "estimates");
  EstimatesLoad out{envelope_estimates(s, m), 0};
  std::vector<bool> seen(out.estimates.size(), false);
  for (const auto& e : get_field<Json>(j, "edges", "estimates")) {
    const int a = get_field<int>(e, "i", "estimate"), b = get_field<int>(e, "j", "estimate");
    if (a == b || a < 0 || b < 0 || a >= s.node_count() || b >= s.node_count())
      throw DataError("estimates: edge endpoints out of range for the scenario");
    auto& est = out.estimates.at(a, b);
    est.time = bound_from_json(get_field<Json>(e, "time", "estimate"));
    est.energy = bound_from_json(get_field<Json>(e, "energy", "estimate"));
    seen[out.estimates.slot(a, b)] = true;
  }
  for (bool b : seen) out.missing += b ? 0 : 1;
  return out;
}

// ---- plans ------------------------------------------------------------------

inline Json to_json(const VehicleRoute& r) {
  Json cluster = Json::array();
  for (auto n : r.cluster) cluster.push_back(n.index);
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"node_ref", row.node.index}, {"soc_ref", row.soc_ref}, {"k_ref", row.k_ref},
                    {"charge_time", row.charge_time}, {"t_budget", row.t_budget},
                    {"e_budget", row.e_budget}});
  return {{"vehicle", r.vehicle}, {"cluster", cluster}, {"exact", r.exact},
          {"emergency", r.emergency}, {"rows", rows}};
}

inline Json to_json(const RoutePlan& p, const std::vector<VehicleRoute>& replans = {}) {
  Json vehicles = Json::array();
  for (const auto& v : p.vehicles) vehicles.push_back(to_json(v));
  Json re = Json::array();
  for (const auto& v : replans) re.push_back(to_json(v));
  return {{"format_version", kFormatVersion}, {"day", p.day}, {"vehicles", vehicles},
          {"replans", re}};
}

inline VehicleRoute route_from_json(const Json& j) {
  using detail::get_field;
  VehicleRoute r;
  r.vehicle = get_field<int>(j, "vehicle", "route");
  for (int n : get_field<std::vector<int>>(j, "cluster", "route")) r.cluster.push_back(NodeId{n});
  r.exact = get_field<bool>(j, "exact", "route");
  r.emergency = get_field<bool>(j, "emergency", "route");
  for (const auto& row : get_field<Json>(j, "rows", "route"))
    r.rows.push_back({NodeId{get_field<int>(row, "node_ref", "row")},
                      get_field<double>(row, "soc_ref", "row"), get_field<double>(row, "k_ref", "row"),
                      get_field<double>(row, "charge_time", "row"),
                      get_field<double>(row, "t_budget", "row"),
                      get_field<double>(row, "e_budget", "row")});
  return r;
}

inline RoutePlan plan_from_json(const Json& j) {
  if (j.contains("format_version")) detail::check_version(j, "plan");
  RoutePlan p;
  p.day = detail::get_field<int>(j, "day", "plan");
  for (const auto& v : detail::get_field<Json>(j, "vehicles", "plan")) p.vehicles.push_back(route_from_json(v));
  return p;
}

// ---- logs -------------------------------------------------------------------

inline Json to_json(const TraversalLog& t) {
  const auto& r = t.record;
  Json j = {{"day", t.day},
            {"vehicle", t.vehicle},
            {"edge", {r.from.index, r.to.index}},
            {"t_depart", r.t_depart},
            {"k_ref", r.k_ref},
            {"soc_ref", r.soc_ref},
            {"batch_steps", r.batch_steps},
            {"batch_time", r.batch_time},
            {"realized_steps", r.realized_steps},
            {"realized_time", r.realized_time},
            {"predicted_energy", r.predicted_energy},
            {"realized_energy", r.realized_energy},
            {"soc_start", r.soc_start},
            {"soc_end", r.soc_end},
            {"min_soc", r.min_soc},
            {"alpha_hat", r.alpha_hat},
            {"alpha_plant", r.alpha_plant}};
  j["regressed_alpha"] = r.regressed_alpha ? Json(*r.regressed_alpha) : Json(nullptr);
  j["ocp_infeasible"] = r.ocp_infeasible ? Json(to_string(*r.ocp_infeasible)) : Json(nullptr);
  j["fallback_count"] = r.fallback_count;
  j["constraint_violations"] = r.constraint_violations;
  j["value_descent"] = r.value_descent;
  j["arrived"] = r.arrived;
  j["failure"] = to_string(detect_failure(r));
  return j;
}

inline Json trajectory_to_json(const TraversalLog& t, double dt) {
  Json k = Json::array(), z = Json::array(), y = Json::array(), th = Json::array(),
       v = Json::array(), soc = Json::array(), a = Json::array(), d = Json::array(),
       plan = Json::array();
  for (const auto& p : t.record.trajectory) {
    k.push_back(p.k);
    z.push_back(p.state.z);
    y.push_back(p.state.y);
    th.push_back(p.state.theta);
    v.push_back(p.state.v);
    soc.push_back(p.state.soc);
    a.push_back(p.input.a);
    d.push_back(p.input.delta);
    plan.push_back(p.planned_soc);
  }
  return {{"day", t.day}, {"vehicle", t.vehicle}, {"edge", {t.record.from.index, t.record.to.index}},
          {"t_depart", t.record.t_depart}, {"dt", dt}, {"k", k}, {"z", z}, {"y", y},
          {"theta", th}, {"v", v}, {"soc", soc}, {"a", a}, {"delta", d}, {"soc_plan", plan}};
}

inline Json to_json(const Event& e) {
  return {{"day", e.day}, {"vehicle", e.vehicle}, {"kind", e.kind}, {"node", e.node.index},
          {"t", e.t}, {"soc", e.soc}, {"detail", e.detail}};
}

// ---- files ------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json read_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

inline void write_json(const std::string& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline constexpr const char* kMetricsHeader =
    "day,vehicle,visited,tour_time,min_soc,planned_min_soc,failure";

inline std::string metrics_csv(const RunMetrics& m) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& d : m.days)
    for (const auto& v : d.vehicles)
      out += std::to_string(d.day) + "," + std::to_string(v.vehicle) + "," +
             std::to_string(v.customers_visited) + "," + format_double(v.tour_time) + "," +
             format_double(v.min_soc) + "," + format_double(v.planned_min_soc) + "," +
             (v.failure() ? "1" : "0") + "\n";
  return out;
}

}  // namespace fleet_hlc
