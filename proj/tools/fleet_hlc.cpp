// Command-line front end: simulate, estimate, plan, export-plots.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fleet_hlc.hpp"

namespace {

using namespace fleet_hlc;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;

// Flag values for `simulate`; only flags given on the command line are
// applied on top of the config file.
struct SimulateFlags {
  std::string config_file;
  std::uint64_t seed = 0;
  int days = 0, vehicles = 0, customers = 0, chargers = 0, horizon = 0;
  double p_e = 0, dt = 0, day_time_limit = 0, soc_floor = 0, charge_rate = 0, soc_capacity = 0;
  double service_time = 0, rho = 0, a_max = 0, delta_max = 0, eps_pos = 0, eps_v = 0;
  double alpha_lo = 0, alpha_hi = 0, v_lo = 0, v_hi = 0;
  std::vector<double> map_size;
  std::int64_t max_expansions = 0;
  int max_extra_steps = 0;
  bool charge_to_plan = true;
  bool trajectories = true;
  std::string out;
};

template <typename T>
void set_if(const CLI::App& app, const char* name, const T& value, T& target) {
  if (app.count(name) > 0) target = value;
}

RunConfig resolve(const CLI::App& app, const SimulateFlags& f) {
  RunConfig cfg;
  if (!f.config_file.empty()) apply_config_json(read_json(f.config_file), cfg);
  auto& s = cfg.sim;
  auto& sc = s.scenario;
  set_if(app, "--seed", f.seed, s.seed);
  set_if(app, "--days", f.days, s.days);
  set_if(app, "--vehicles", f.vehicles, s.vehicles);
  set_if(app, "--customers", f.customers, sc.customers);
  set_if(app, "--chargers", f.chargers, sc.chargers);
  set_if(app, "--pe", f.p_e, s.p_e);
  set_if(app, "--dt", f.dt, s.mpc.dt);
  set_if(app, "--horizon", f.horizon, s.mpc.horizon);
  set_if(app, "--day-time-limit", f.day_time_limit, sc.day_time_limit);
  set_if(app, "--soc-floor", f.soc_floor, s.soc_floor);
  set_if(app, "--charge-rate", f.charge_rate, sc.charge_rate);
  set_if(app, "--soc-capacity", f.soc_capacity, sc.soc_capacity);
  set_if(app, "--service-time", f.service_time, s.service_time);
  set_if(app, "--rho", f.rho, s.rho);
  set_if(app, "--a-max", f.a_max, s.mpc.input.a_max);
  set_if(app, "--delta-max", f.delta_max, s.mpc.input.delta_max);
  set_if(app, "--eps-pos", f.eps_pos, s.mpc.eps_pos);
  set_if(app, "--eps-v", f.eps_v, s.mpc.eps_v);
  set_if(app, "--alpha-lo", f.alpha_lo, sc.envelopes.alpha_lo);
  set_if(app, "--alpha-hi", f.alpha_hi, sc.envelopes.alpha_hi);
  set_if(app, "--v-lo", f.v_lo, sc.envelopes.v_lo);
  set_if(app, "--v-hi", f.v_hi, sc.envelopes.v_hi);
  set_if(app, "--max-expansions", f.max_expansions, s.max_expansions);
  set_if(app, "--max-extra-steps", f.max_extra_steps, s.max_extra_steps);
  set_if(app, "--charge-to-plan", f.charge_to_plan, s.charge_to_plan);
  set_if(app, "--trajectories", f.trajectories, cfg.write_trajectories);
  set_if(app, "--out", f.out, cfg.output_dir);
  if (app.count("--map-size") > 0) {
    sc.map_width = f.map_size.front();
    sc.map_height = f.map_size.size() > 1 ? f.map_size[1] : f.map_size.front();
  }
  if (cfg.output_dir.empty())
    cfg.output_dir = (std::filesystem::path(default_output_root()) /
                      ("seed" + std::to_string(s.seed)))
                         .string();
  validate(cfg);
  return cfg;
}

int run_simulate(const CLI::App& app, const SimulateFlags& f) {
  const RunConfig cfg = resolve(app, f);
  const RunMetrics m = run_simulation(simulation_config(cfg));
  write_run(cfg.output_dir, cfg, m);
  int strandings = 0;
  for (const auto& d : m.days)
    for (const auto& v : d.vehicles) strandings += v.stranded ? 1 : 0;
  std::printf("wrote %s (%zu days, %d strandings)\n", cfg.output_dir.c_str(), m.days.size(), strandings);
  return kExitOk;
}

struct EstimateFlags {
  std::string samples;
  double p_e = 0.95;
  std::vector<double> envelope;
};

int run_estimate(const EstimateFlags& f) {
  if (f.envelope.size() != 2) throw ConfigError("envelope", "expects two values: lo hi");
  const EstimatorConfig cfg{f.p_e, f.envelope[0], f.envelope[1]};
  validate(cfg);
  std::istringstream in(read_file(f.samples));
  std::vector<double> xs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(line, &used);
    } catch (const std::exception&) {
      throw DataError(f.samples + ":" + std::to_string(line_no) + ": not a number");
    }
    if (line.find_first_not_of(" \t\r", used) != std::string::npos)
      throw DataError(f.samples + ":" + std::to_string(line_no) + ": trailing characters");
    xs.push_back(x);
  }
  if (xs.size() < 2)
    std::fprintf(stderr, "warning: %zu sample(s); reporting the envelope\n", xs.size());
  const BoundEstimate b = estimate_bounds(xs, cfg);
  std::printf("a_hat %.12g\nb_hat %.12g\nn %zu\nm %.12g\nM %.12g\n", b.a_hat, b.b_hat, b.n,
              b.min_sample, b.max_sample);
  return kExitOk;
}

struct PlanFlags {
  std::string scenario;
  std::string estimates;
  int vehicles = 2;
  double soc_floor = 0.0;
  double service_time = 0.0;
  int day = 1;
};

int run_plan(const PlanFlags& f) {
  if (f.vehicles < 1) throw ConfigError("vehicles", "must be >= 1");
  if (f.soc_floor < 0.0) throw ConfigError("soc_floor", "must be >= 0");
  if (f.service_time < 0.0) throw ConfigError("service_time", "must be >= 0");
  const Scenario s = scenario_from_json(read_json(f.scenario));
  EdgeEstimates est = envelope_estimates(s);
  if (!f.estimates.empty()) {
    const EstimatesLoad load = estimates_from_json(read_json(f.estimates), s);
    est = load.estimates;
    if (load.missing > 0)
      std::fprintf(stderr, "warning: %d edge(s) missing from %s; using envelope estimates\n",
                   load.missing, f.estimates.c_str());
  }
  PlannerOptions opt;
  opt.soc_floor = f.soc_floor;
  opt.service_time = f.service_time;
  opt.day_time_limit = s.day_time_limit;
  const auto clusters = cluster_customers(s, f.vehicles, s.seed);
  RoutePlan plan = plan_routes(clusters, est, s, opt, f.vehicles);
  plan.day = f.day;
  std::cout << to_json(plan).dump(2) << "\n";
  return kExitOk;
}

struct ExportFlags {
  std::string run;
  std::string out;
  std::vector<int> edge;
  int vehicle = 0;
};

int run_export(const ExportFlags& f) {
  ExportOptions opt;
  opt.vehicle = f.vehicle;
  if (!f.edge.empty()) {
    if (f.edge.size() != 2) throw ConfigError("edge", "expects two node ids");
    opt.edge = std::pair{f.edge[0], f.edge[1]};
  }
  const std::string out = f.out.empty() ? (std::filesystem::path(f.run) / "plots").string() : f.out;
  const ExportReport rep = export_plots(f.run, out, opt);
  for (const auto& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  for (const auto& w : rep.written) std::printf("%s\n", (std::filesystem::path(out) / w).string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical fleet planning and control simulator"};
  app.require_subcommand(1);

  SimulateFlags sf;
  auto* sim = app.add_subcommand("simulate", "run the day-by-day closed loop and write a run directory");
  sim->add_option("--config", sf.config_file, "JSON config file");
  sim->add_option("--seed", sf.seed);
  sim->add_option("--days", sf.days);
  sim->add_option("--vehicles", sf.vehicles);
  sim->add_option("--customers", sf.customers);
  sim->add_option("--chargers", sf.chargers);
  sim->add_option("--pe,--p-e", sf.p_e, "estimator confidence level");
  sim->add_option("--dt", sf.dt);
  sim->add_option("--horizon", sf.horizon);
  sim->add_option("--day-time-limit", sf.day_time_limit);
  sim->add_option("--soc-floor", sf.soc_floor);
  sim->add_option("--map-size", sf.map_size, "width [height]")->expected(1, 2);
  sim->add_option("--alpha-lo", sf.alpha_lo);
  sim->add_option("--alpha-hi", sf.alpha_hi);
  sim->add_option("--v-lo", sf.v_lo);
  sim->add_option("--v-hi", sf.v_hi);
  sim->add_option("--charge-rate", sf.charge_rate);
  sim->add_option("--soc-capacity", sf.soc_capacity);
  sim->add_option("--service-time", sf.service_time);
  sim->add_option("--rho", sf.rho);
  sim->add_option("--a-max", sf.a_max);
  sim->add_option("--delta-max", sf.delta_max);
  sim->add_option("--eps-pos", sf.eps_pos);
  sim->add_option("--eps-v", sf.eps_v);
  sim->add_option("--max-expansions", sf.max_expansions);
  sim->add_option("--max-extra-steps", sf.max_extra_steps);
  sim->add_option("--charge-to-plan", sf.charge_to_plan, "true|false");
  sim->add_option("--trajectories", sf.trajectories, "write trajectories.jsonl (true|false)");
  sim->add_option("--out", sf.out, "run directory (default $FLEET_HLC_OUT/seed<seed>)");

  EstimateFlags ef;
  auto* est = app.add_subcommand("estimate", "bound estimate from a file of samples");
  est->add_option("samples", ef.samples, "one value per line")->required();
  est->add_option("--pe,--p-e", ef.p_e);
  est->add_option("--envelope", ef.envelope, "lo hi")->expected(2)->required();

  PlanFlags pf;
  auto* plan = app.add_subcommand("plan", "one planning pass; prints the plan JSON");
  plan->add_option("--scenario", pf.scenario)->required();
  plan->add_option("--estimates", pf.estimates);
  plan->add_option("--vehicles", pf.vehicles);
  plan->add_option("--soc-floor", pf.soc_floor);
  plan->add_option("--service-time", pf.service_time);
  plan->add_option("--day", pf.day);

  ExportFlags xf;
  auto* exp = app.add_subcommand("export-plots", "write plot-ready CSV tables for a run directory");
  exp->add_option("run", xf.run)->required();
  exp->add_option("--out", xf.out, "output directory (default <run>/plots)");
  exp->add_option("--edge", xf.edge, "i j")->expected(2);
  exp->add_option("--vehicle", xf.vehicle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sim) return run_simulate(*sim, sf);
    if (*est) return run_estimate(ef);
    if (*plan) return run_plan(pf);
    if (*exp) return run_export(xf);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitConfig;
}
