#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "fixtures.hpp"
#include "fleet_hlc/orchestrator.hpp"
#include "fleet_hlc/serialization.hpp"

using namespace fleet_hlc;

namespace {

SimulationConfig small_config(std::uint64_t seed, int days) {
  SimulationConfig c;
  c.seed = seed;
  c.days = days;
  return c;
}

}  // namespace

// ---------------------------------------------------------------- detect_failure

TEST(DetectFailure, Classification) {
  TraversalRecord r;
  r.arrived = true;
  r.k_ref = 10;
  r.t_depart = 2;
  r.realized_time = 5;
  r.min_soc = 20;
  EXPECT_EQ(detect_failure(r), FailureKind::kNominal);
  r.realized_time = 10;  // arrival at k_ref + 2
  EXPECT_EQ(detect_failure(r), FailureKind::kLate);
  r.realized_time = 5;
  r.min_soc = -0.1;
  EXPECT_EQ(detect_failure(r), FailureKind::kStranded);
  EXPECT_STREQ(to_string(FailureKind::kStranded), "stranded");
}

// ---------------------------------------------------------------- config

TEST(SimulationConfig, ValidationNamesField) {
  auto field_of = [](SimulationConfig c) {
    try {
      validate(c);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("none");
  };
  SimulationConfig c;
  EXPECT_EQ(field_of(c), "none");
  c.p_e = 1.5;
  EXPECT_EQ(field_of(c), "p_e");
  c = {};
  c.days = 0;
  EXPECT_EQ(field_of(c), "days");
  c = {};
  c.vehicles = 0;
  EXPECT_EQ(field_of(c), "vehicles");
  c = {};
  c.mpc.dt = 0;
  EXPECT_EQ(field_of(c), "dt");
  c = {};
  c.soc_floor = 100;
  EXPECT_EQ(field_of(c), "soc_floor");
}

// ---------------------------------------------------------------- run_day

TEST(RunDay, ZeroCustomers) {
  Scenario s = fixture::line_scenario({50, 50}, {{NodeKind::kCharger, {60, 60}}});
  SimulationConfig cfg;
  const auto est = envelope_estimates(s);
  const std::vector<VehicleRates> rates(2, rate_priors(s));
  const auto out = run_day(s, sample_day(s, 1), est, rates, cfg);
  EXPECT_EQ(out.result.customers_visited(), 0);
  EXPECT_FALSE(out.result.failure);
  ASSERT_EQ(out.result.vehicles.size(), 2u);
  for (const auto& v : out.result.vehicles) EXPECT_DOUBLE_EQ(v.tour_time, 0.0);
  EXPECT_TRUE(out.traversals.empty());
}

TEST(RunDay, ConservativeDayHasNoReplanOrFailure) {
  // Day one: envelope estimates and envelope-max rates dominate every
  // realized rate and time.
  const SimulationConfig cfg = small_config(3, 1);
  const Scenario s = generate_scenario(cfg.scenario, cfg.seed);
  const auto est = update_edge_estimates(s, EdgeHistories(s.node_count()), cfg.p_e, motion_envelope(cfg));
  const std::vector<VehicleRates> rates(2, rate_priors(s));
  const auto out = run_day(s, sample_day(s, 1), est, rates, cfg);
  EXPECT_EQ(out.result.replans, 0);
  EXPECT_FALSE(out.result.failure);
  EXPECT_GT(out.result.customers_visited(), 0);
  for (const auto& t : out.traversals) {
    EXPECT_LE(t.record.alpha_plant, t.record.alpha_hat);
    EXPECT_LE(t.record.realized_energy, t.record.predicted_energy + 1e-9);
    EXPECT_EQ(detect_failure(t.record), FailureKind::kNominal);
  }
  for (const auto& v : out.result.vehicles) EXPECT_GE(v.min_soc, v.planned_min_soc - 1e-9);
}

TEST(RunDay, OptimisticModelReplansOrStrands) {
  // Estimates and rate models claim 0.05 per unit; the plant spends at least 0.2.
  SimulationConfig cfg = small_config(5, 1);
  cfg.vehicles = 1;
  const Scenario s = generate_scenario(cfg.scenario, cfg.seed);
  EdgeEstimates est = envelope_estimates(s);
  s.edges.for_each([&](int i, int j, const EdgeTruth& e) {
    est.at(i, j).energy.a_hat = 0.01 * e.length;
    est.at(i, j).energy.b_hat = 0.05 * e.length;
  });
  VehicleRates r(s.node_count(), RateEstimate{0.05, 0.0, {0.05}});
  const auto out = run_day(s, sample_day(s, 1), est, {r}, cfg);
  const auto& v = out.result.vehicles[0];
  EXPECT_TRUE(v.replans > 0 || v.stranded);
  bool stranded_event = false, replan_event = false;
  for (const auto& e : out.events) {
    stranded_event |= e.kind == "stranded";
    replan_event |= e.kind == "replan";
  }
  EXPECT_TRUE(stranded_event || replan_event);
}

TEST(RunDay, SamplesOnlyFromCompletedTraversals) {
  SimulationConfig cfg = small_config(5, 1);
  cfg.vehicles = 1;
  const Scenario s = generate_scenario(cfg.scenario, cfg.seed);
  EdgeEstimates est = envelope_estimates(s);
  s.edges.for_each([&](int i, int j, const EdgeTruth& e) { est.at(i, j).energy.b_hat = 0.05 * e.length; });
  VehicleRates r(s.node_count(), RateEstimate{0.05, 0.0, {0.05}});
  const auto out = run_day(s, sample_day(s, 1), est, {r}, cfg);
  std::size_t completed = 0, regressed = 0;
  for (const auto& t : out.traversals) {
    completed += t.record.arrived && !t.record.stranded;
    regressed += t.record.regressed_alpha.has_value();
  }
  EXPECT_EQ(out.samples.size(), completed);
  EXPECT_EQ(out.rate_updates.size(), regressed);
}

// ---------------------------------------------------------------- run_simulation

TEST(RunSimulation, DayOnePlansUseEnvelope) {
  const SimulationConfig cfg = small_config(2, 2);
  const auto m = run_simulation(cfg);
  EXPECT_EQ(m.estimates[0], envelope_estimates(m.scenario, motion_envelope(cfg)));
  EXPECT_NE(m.estimates[1], m.estimates[0]);
}

TEST(RunSimulation, Deterministic) {
  const SimulationConfig cfg = small_config(7, 4);
  const auto a = run_simulation(cfg);
  const auto b = run_simulation(cfg);
  EXPECT_EQ(metrics_csv(a), metrics_csv(b));
  ASSERT_EQ(a.traversals.size(), b.traversals.size());
  for (std::size_t i = 0; i < a.traversals.size(); ++i)
    EXPECT_EQ(to_json(a.traversals[i]).dump(), to_json(b.traversals[i]).dump());
  EXPECT_EQ(a.plans, b.plans);
  EXPECT_EQ(a.estimates, b.estimates);
}

TEST(RunSimulation, HistoryGrowsByCompletedTraversals) {
  const SimulationConfig cfg = small_config(4, 3);
  const auto m = run_simulation(cfg);
  std::size_t seen_before_day3 = 0;
  for (const auto& t : m.traversals)
    if (t.day < 3 && t.record.arrived && !t.record.stranded) ++seen_before_day3;
  std::size_t samples = 0;
  m.estimates[2].for_each([&](int, int, const EdgeEstimate& e) { samples += e.n_samples(); });
  EXPECT_EQ(samples, seen_before_day3);
}

TEST(RunSimulation, HighConfidenceRunIsSafeAndImproves) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto m = run_simulation(small_config(seed, 20));
    int peak = 0;
    for (const auto& d : m.days) {
      EXPECT_FALSE(d.failure) << "seed " << seed << " day " << d.day;
      const int v = d.customers_visited();
      EXPECT_GE(v, peak - 1) << "seed " << seed << " day " << d.day;
      peak = std::max(peak, v);
    }
    EXPECT_GT(m.days.back().customers_visited(), m.days.front().customers_visited());
  }
}

TEST(RunSimulation, RejectsInvalidConfig) {
  SimulationConfig c;
  c.p_e = 0.0;
  EXPECT_THROW(run_simulation(c), ConfigError);
}
