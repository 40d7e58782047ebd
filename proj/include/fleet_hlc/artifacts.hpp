#pragma once

#include <filesystem>
#include <string>

#include "fleet_hlc/config.hpp"
#include "fleet_hlc/orchestrator.hpp"
#include "fleet_hlc/serialization.hpp"

namespace fleet_hlc {

inline std::string plan_file(int day) { return "plan_day_" + std::to_string(day) + ".json"; }
inline std::string estimates_file(int day) { return "estimates_day_" + std::to_string(day) + ".json"; }

inline std::string jsonl(const Json& j) { return j.dump() + "\n"; }

// Writes every run artifact into `dir`, creating it if needed.
inline void write_run(const std::string& dir, const RunConfig& cfg, const RunMetrics& m) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  const fs::path root(dir);
  write_json((root / "config.json").string(), to_json(cfg));
  write_json((root / "scenario.json").string(), to_json(m.scenario));
  write_file((root / "metrics.csv").string(), metrics_csv(m));
  for (std::size_t d = 0; d < m.days.size(); ++d) {
    const int day = m.days[d].day;
    write_json((root / plan_file(day)).string(), to_json(m.plans[d], m.replans[d]));
    write_json((root / estimates_file(day)).string(), to_json(m.estimates[d], day, cfg.sim.p_e));
  }
  std::string trav, traj, events;
  for (const auto& t : m.traversals) {
    trav += jsonl(to_json(t));
    if (cfg.write_trajectories) traj += jsonl(trajectory_to_json(t, cfg.sim.mpc.dt));
  }
  for (const auto& e : m.events) events += jsonl(to_json(e));
  write_file((root / "traversals.jsonl").string(), trav);
  write_file((root / "events.jsonl").string(), events);
  if (cfg.write_trajectories) write_file((root / "trajectories.jsonl").string(), traj);
}

}  // namespace fleet_hlc
