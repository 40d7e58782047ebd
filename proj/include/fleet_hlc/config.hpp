#pragma once

#include <cstdlib>
#include <set>
#include <string>

#include "fleet_hlc/orchestrator.hpp"
#include "fleet_hlc/serialization.hpp"

namespace fleet_hlc {

// Everything a `simulate` run needs. Every field has a key in the JSON
// config file; command-line flags override file values.
struct RunConfig {
  SimulationConfig sim;
  std::string output_dir;
  bool write_trajectories = true;
};

namespace detail {

template <typename T>
void read_key(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  bool ok = false;
  if constexpr (std::is_same_v<T, bool>) {
    ok = v.is_boolean();
  } else if constexpr (std::is_same_v<T, std::string>) {
    ok = v.is_string();
  } else if constexpr (std::is_integral_v<T>) {
    ok = v.is_number_integer() && (std::is_signed_v<T> || v.get<std::int64_t>() >= 0);
  } else {
    ok = v.is_number();
  }
  if (!ok) throw ConfigError(key, "wrong type");
  out = v.get<T>();
}

}  // namespace detail

inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys = {
      "seed", "days", "vehicles", "customers", "chargers", "p_e", "dt", "horizon",
      "day_time_limit", "soc_floor", "map_size", "envelopes", "charge_rate", "soc_capacity",
      "service_time", "rho", "a_max", "delta_max", "eps_pos", "eps_v", "max_expansions",
      "max_extra_steps", "charge_to_plan", "trajectories", "output_dir"};
  return keys;
}

// Applies the keys present in `j` on top of `cfg`. Unknown keys are errors.
inline void apply_config_json(const Json& j, RunConfig& cfg) {
  using detail::read_key;
  if (!j.is_object()) throw ConfigError("config", "top level must be an object");
  for (const auto& [k, _] : j.items())
    if (!config_keys().contains(k)) throw ConfigError(k, "unknown configuration key");
  auto& s = cfg.sim;
  auto& sc = s.scenario;
  read_key(j, "seed", s.seed);
  read_key(j, "days", s.days);
  read_key(j, "vehicles", s.vehicles);
  read_key(j, "customers", sc.customers);
  read_key(j, "chargers", sc.chargers);
  read_key(j, "p_e", s.p_e);
  read_key(j, "dt", s.mpc.dt);
  read_key(j, "horizon", s.mpc.horizon);
  read_key(j, "day_time_limit", sc.day_time_limit);
  read_key(j, "soc_floor", s.soc_floor);
  if (j.contains("map_size")) {
    const Json& m = j.at("map_size");
    if (m.is_number()) {
      sc.map_width = sc.map_height = m.get<double>();
    } else if (m.is_array() && m.size() == 2 && m[0].is_number() && m[1].is_number()) {
      sc.map_width = m[0].get<double>();
      sc.map_height = m[1].get<double>();
    } else {
      throw ConfigError("map_size", "must be a number or [width, height]");
    }
  }
  if (j.contains("envelopes")) {
    const Json& e = j.at("envelopes");
    if (!e.is_object()) throw ConfigError("envelopes", "must be an object");
    for (const auto& [k, _] : e.items())
      if (k != "alpha_lo" && k != "alpha_hi" && k != "v_lo" && k != "v_hi")
        throw ConfigError("envelopes." + k, "unknown configuration key");
    read_key(e, "alpha_lo", sc.envelopes.alpha_lo);
    read_key(e, "alpha_hi", sc.envelopes.alpha_hi);
    read_key(e, "v_lo", sc.envelopes.v_lo);
    read_key(e, "v_hi", sc.envelopes.v_hi);
  }
  read_key(j, "charge_rate", sc.charge_rate);
  read_key(j, "soc_capacity", sc.soc_capacity);
  read_key(j, "service_time", s.service_time);
  read_key(j, "rho", s.rho);
  read_key(j, "a_max", s.mpc.input.a_max);
  read_key(j, "delta_max", s.mpc.input.delta_max);
  read_key(j, "eps_pos", s.mpc.eps_pos);
  read_key(j, "eps_v", s.mpc.eps_v);
  read_key(j, "max_expansions", s.max_expansions);
  read_key(j, "max_extra_steps", s.max_extra_steps);
  read_key(j, "charge_to_plan", s.charge_to_plan);
  read_key(j, "trajectories", cfg.write_trajectories);
  read_key(j, "output_dir", cfg.output_dir);
}

inline Json to_json(const RunConfig& cfg) {
  const auto& s = cfg.sim;
  const auto& sc = s.scenario;
  return {{"seed", s.seed},
          {"days", s.days},
          {"vehicles", s.vehicles},
          {"customers", sc.customers},
          {"chargers", sc.chargers},
          {"p_e", s.p_e},
          {"dt", s.mpc.dt},
          {"horizon", s.mpc.horizon},
          {"day_time_limit", sc.day_time_limit},
          {"soc_floor", s.soc_floor},
          {"map_size", {sc.map_width, sc.map_height}},
          {"envelopes", envelopes_to_json(sc.envelopes)},
          {"charge_rate", sc.charge_rate},
          {"soc_capacity", sc.soc_capacity},
          {"service_time", s.service_time},
          {"rho", s.rho},
          {"a_max", s.mpc.input.a_max},
          {"delta_max", s.mpc.input.delta_max},
          {"eps_pos", s.mpc.eps_pos},
          {"eps_v", s.mpc.eps_v},
          {"max_expansions", s.max_expansions},
          {"max_extra_steps", s.max_extra_steps},
          {"charge_to_plan", s.charge_to_plan},
          {"trajectories", cfg.write_trajectories},
          {"output_dir", cfg.output_dir}};
}

inline void validate(const RunConfig& cfg) {
  validate(cfg.sim);
  if (cfg.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
}

// Simulation settings with trajectory recording matched to the output flag.
inline SimulationConfig simulation_config(const RunConfig& cfg) {
  SimulationConfig s = cfg.sim;
  s.keep_trajectories = cfg.write_trajectories;
  return s;
}

// Default output root: $FLEET_HLC_OUT if set, else ./runs.
inline std::string default_output_root() {
  const char* env = std::getenv("FLEET_HLC_OUT");
  return env && *env ? std::string(env) : std::string("runs");
}

}  // namespace fleet_hlc
