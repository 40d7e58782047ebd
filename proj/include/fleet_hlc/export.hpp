#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fleet_hlc/artifacts.hpp"
#include "fleet_hlc/serialization.hpp"

namespace fleet_hlc {

inline constexpr const char* kVisitedHeader = "day,vehicle,planned,visited";
inline constexpr const char* kMinSocHeader = "day,planned_min_soc,realized_min_soc,visited";
inline constexpr const char* kEdgeTraceHeader = "day,vehicle,direction,k,time,soc_planned,soc_realized";
inline constexpr const char* kToursHeader = "day,vehicle,position,node,kind,x,y";

struct MetricsRow {
  int day = 0;
  int vehicle = 0;
  int visited = 0;
  double tour_time = 0.0;
  double min_soc = 0.0;
  double planned_min_soc = 0.0;
  bool failure = false;
};

inline std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) throw DataError("metrics.csv: bad header");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw DataError("metrics.csv: expected 7 columns");
    try {
      rows.push_back({std::stoi(f[0]), std::stoi(f[1]), std::stoi(f[2]), std::stod(f[3]),
                      std::stod(f[4]), std::stod(f[5]), f[6] == "1"});
    } catch (const std::exception&) {
      throw DataError("metrics.csv: malformed row '" + line + "'");
    }
  }
  return rows;
}

struct ExportOptions {
  int vehicle = 0;                        // vehicle for the min-soc series
  std::optional<std::pair<int, int>> edge;  // default: the edge seen on most days
};

struct ExportReport {
  std::vector<std::string> written;
  std::vector<std::string> warnings;
  std::pair<int, int> edge{0, 0};
};

inline std::vector<std::string> missing_artifacts(const std::string& run_dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> missing;
  const fs::path root(run_dir);
  for (const char* f : {"metrics.csv", "scenario.json", "traversals.jsonl", "trajectories.jsonl"})
    if (!fs::exists(root / f)) missing.emplace_back(f);
  if (fs::exists(root / "metrics.csv")) {
    int days = 0;
    for (const auto& r : parse_metrics_csv(read_file((root / "metrics.csv").string())))
      days = std::max(days, r.day);
    for (int d = 1; d <= days; ++d)
      if (!fs::exists(root / plan_file(d))) missing.push_back(plan_file(d));
  }
  return missing;
}

inline std::vector<Json> read_jsonl(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<Json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(path + ": " + e.what());
    }
  }
  return out;
}

// Writes the four plot tables into `out_dir`. Throws DataError listing the
// missing artifacts when the run directory is incomplete.
inline ExportReport export_plots(const std::string& run_dir, const std::string& out_dir,
                                 const ExportOptions& opt = {}) {
  namespace fs = std::filesystem;
  const auto missing = missing_artifacts(run_dir);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw DataError("incomplete run directory, missing: " + list);
  }
  const fs::path root(run_dir), out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  ExportReport rep;

  const auto metrics = parse_metrics_csv(read_file((root / "metrics.csv").string()));
  const Scenario scenario = scenario_from_json(read_json((root / "scenario.json").string()));
  int days = 0;
  for (const auto& r : metrics) days = std::max(days, r.day);
  std::vector<RoutePlan> plans;
  for (int d = 1; d <= days; ++d) plans.push_back(plan_from_json(read_json((root / plan_file(d)).string())));

  // visited per day, per vehicle
  std::string visited = std::string(kVisitedHeader) + "\n";
  for (const auto& r : metrics) {
    const auto& plan = plans[static_cast<std::size_t>(r.day - 1)];
    int planned = 0;
    for (const auto& v : plan.vehicles)
      if (v.vehicle == r.vehicle) planned = v.customers_planned(scenario);
    visited += std::to_string(r.day) + "," + std::to_string(r.vehicle) + "," +
               std::to_string(planned) + "," + std::to_string(r.visited) + "\n";
  }
  write_file((out / "visited_per_day.csv").string(), visited);
  rep.written.push_back("visited_per_day.csv");

  // planned vs realized min soc for one vehicle
  std::string minsoc = std::string(kMinSocHeader) + "\n";
  for (const auto& r : metrics)
    if (r.vehicle == opt.vehicle)
      minsoc += std::to_string(r.day) + "," + format_double(r.planned_min_soc) + "," +
                format_double(r.min_soc) + "," + std::to_string(r.visited) + "\n";
  write_file((out / "min_soc_per_day.csv").string(), minsoc);
  rep.written.push_back("min_soc_per_day.csv");

  // per-step trace for one edge
  const auto traj = read_jsonl((root / "trajectories.jsonl").string());
  auto key = [](const Json& t) {
    const int a = t.at("edge")[0].get<int>(), b = t.at("edge")[1].get<int>();
    return std::pair{std::min(a, b), std::max(a, b)};
  };
  if (opt.edge) {
    rep.edge = {std::min(opt.edge->first, opt.edge->second), std::max(opt.edge->first, opt.edge->second)};
  } else {
    std::map<std::pair<int, int>, std::set<int>> days_seen;
    for (const auto& t : traj) days_seen[key(t)].insert(t.at("day").get<int>());
    std::size_t best = 0;
    for (const auto& [e, ds] : days_seen)
      if (ds.size() > best) {
        best = ds.size();
        rep.edge = e;
      }
  }
  std::string trace = std::string(kEdgeTraceHeader) + "\n";
  int rows = 0;
  for (const auto& t : traj) {
    if (key(t) != rep.edge) continue;
    const double dt = t.at("dt").get<double>();
    const auto& ks = t.at("k");
    const std::string dir = t.at("edge")[0].get<int>() == rep.edge.first ? "forward" : "reverse";
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const int k = ks[i].get<int>();
      trace += std::to_string(t.at("day").get<int>()) + "," + std::to_string(t.at("vehicle").get<int>()) +
               "," + dir + "," + std::to_string(k) + "," + format_double(k * dt) + "," +
               format_double(t.at("soc_plan")[i].get<double>()) + "," +
               format_double(t.at("soc")[i].get<double>()) + "\n";
      ++rows;
    }
  }
  if (rows == 0)
    rep.warnings.push_back("edge " + std::to_string(rep.edge.first) + "-" +
                           std::to_string(rep.edge.second) + " was never traversed");
  write_file((out / "edge_trace.csv").string(), trace);
  rep.written.push_back("edge_trace.csv");

  // day-1 and last-day planned tours
  std::string tours = std::string(kToursHeader) + "\n";
  std::vector<int> tour_days{1};
  if (days > 1) tour_days.push_back(days);
  for (int d : tour_days)
    for (const auto& v : plans[static_cast<std::size_t>(d - 1)].vehicles)
      for (std::size_t i = 0; i < v.rows.size(); ++i) {
        const Node& n = scenario.node(v.rows[i].node);
        tours += std::to_string(d) + "," + std::to_string(v.vehicle) + "," + std::to_string(i) + "," +
                 std::to_string(n.id.index) + "," + to_string(n.kind) + "," +
                 format_double(n.position.x) + "," + format_double(n.position.y) + "\n";
      }
  write_file((out / "tours.csv").string(), tours);
  rep.written.push_back("tours.csv");
  return rep;
}

}  // namespace fleet_hlc
