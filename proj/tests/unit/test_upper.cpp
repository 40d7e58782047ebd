#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "fixtures.hpp"
#include "fleet_hlc/task_planner.hpp"
#include "oracles.hpp"

using namespace fleet_hlc;
using fixture::line_scenario;
using fixture::linear_estimates;
using fixture::Spot;

namespace {

constexpr NodeKind C = NodeKind::kCustomer;
constexpr NodeKind H = NodeKind::kCharger;

std::vector<NodeId> ids(std::initializer_list<int> xs) {
  std::vector<NodeId> out;
  for (int x : xs) out.push_back(NodeId{x});
  return out;
}

}  // namespace

// ---------------------------------------------------------------- edge estimates

TEST(EdgeEstimates, UntraversedEdgesKeepEnvelope) {
  const Scenario s = generate_scenario({}, 4);
  const auto est = envelope_estimates(s);
  s.edges.for_each([&](int i, int j, const EdgeTruth& e) {
    const auto [tlo, thi] = time_envelope(e.length, s.envelopes);
    EXPECT_DOUBLE_EQ(est.at(i, j).t_lo(), tlo);
    EXPECT_DOUBLE_EQ(est.at(i, j).t_hi(), thi);
    EXPECT_DOUBLE_EQ(est.at(i, j).e_lo(), 0.2 * e.length);
    EXPECT_DOUBLE_EQ(est.at(i, j).e_hi(), 0.5 * e.length);
    EXPECT_EQ(est.at(i, j).n_samples(), 0u);
  });
}

TEST(EdgeEstimates, TimeEnvelopeCoversSlowestDrive) {
  // slowest cruise plus full accelerate/brake slack, half turn, one step
  const auto [lo, hi] = time_envelope(30.0, Envelopes{});
  EXPECT_DOUBLE_EQ(lo, 3.0);
  EXPECT_NEAR(hi, 10.0 + 4.0 + 2.0 + 0.1, 1e-12);
}

TEST(EdgeEstimates, IdenticalTotalsCollapse) {
  const Scenario s = generate_scenario({}, 4);
  EdgeHistories h(s.node_count());
  const double L = s.edges.at(0, 1).length;
  h.at(0, 1).times = {L / 5.0, L / 5.0};
  h.at(0, 1).energies = {0.3 * L, 0.3 * L};
  const auto est = update_edge_estimates(s, h, 0.95);
  EXPECT_DOUBLE_EQ(est.at(0, 1).t_lo(), L / 5.0);
  EXPECT_DOUBLE_EQ(est.at(0, 1).t_hi(), L / 5.0);
  EXPECT_DOUBLE_EQ(est.at(0, 1).e_hi(), 0.3 * L);
}

TEST(EdgeEstimates, FixedExtremesTighten) {
  const Scenario s = generate_scenario({}, 4);
  EdgeHistories h(s.node_count());
  const double L = s.edges.at(2, 5).length;
  h.at(2, 5).times = {L / 6.0, L / 5.0};
  h.at(2, 5).energies = {0.3 * L, 0.33 * L};
  double prev_t = update_edge_estimates(s, h, 0.95).at(2, 5).t_hi();
  double prev_e = update_edge_estimates(s, h, 0.95).at(2, 5).e_hi();
  for (int k = 0; k < 15; ++k) {
    h.at(2, 5).times.push_back(L / 5.5);
    h.at(2, 5).energies.push_back(0.31 * L);
    const auto est = update_edge_estimates(s, h, 0.95).at(2, 5);
    EXPECT_LE(est.t_hi(), prev_t);
    EXPECT_LE(est.e_hi(), prev_e);
    prev_t = est.t_hi();
    prev_e = est.e_hi();
  }
}

// ---------------------------------------------------------------- upper model

namespace {

struct TwoNode {
  Scenario s = line_scenario({0, 0}, {{C, {10, 0}}, {H, {0, 10}}});
  EdgeEstimates est{s.node_count()};
  TwoNode() {
    s.edges.for_each([&](int i, int j, const EdgeTruth&) {
      est.at(i, j).time.b_hat = 12;
      est.at(i, j).energy.b_hat = 10;
    });
  }
  UpperModel model() const { return {&s, &est, 0.0}; }
};

}  // namespace

TEST(UpperModel, PredictNextTravels) {
  TwoNode f;
  const auto n = predict_next({kDepot, 80, 0}, {std::pair{kDepot, NodeId{1}}, 0.0}, f.model());
  EXPECT_EQ(n.node, NodeId{1});
  EXPECT_DOUBLE_EQ(n.soc, 70);
  EXPECT_DOUBLE_EQ(n.t, 12);
}

TEST(UpperModel, PredictNextCharges) {
  TwoNode f;
  const auto n = predict_next({NodeId{2}, 50, 3}, {std::nullopt, 5.0}, f.model());
  EXPECT_DOUBLE_EQ(n.soc, 65);
  EXPECT_DOUBLE_EQ(n.t, 8);
  EXPECT_DOUBLE_EQ(predict_next({NodeId{2}, 95, 3}, {std::nullopt, 5.0}, f.model()).soc, 100);
}

TEST(UpperModel, PredictNextIdentityAndErrors) {
  TwoNode f;
  const UpperState s{NodeId{1}, 40, 7};
  EXPECT_EQ(predict_next(s, {}, f.model()), s);
  EXPECT_THROW(predict_next({kDepot, 5, 0}, {std::pair{kDepot, NodeId{1}}, 0.0}, f.model()),
               InfeasibleTransition);
  EXPECT_THROW(predict_next(s, {std::nullopt, 2.0}, f.model()), ContractViolation);
  EXPECT_THROW(predict_next(s, {std::pair{kDepot, NodeId{2}}, 0.0}, f.model()), ContractViolation);
}

// ---------------------------------------------------------------- tracking

namespace {

struct Tracked {
  Scenario s = line_scenario({0, 0}, {{C, {10, 0}}, {C, {20, 0}}});
  EdgeEstimates est = linear_estimates(s, 5.0, 1.0, 0.4);
  UpperModel model() const { return {&s, &est, 0.0}; }
  VehicleRoute route() const {
    VehicleRoute r;
    r.rows = forecast_rows({kDepot, 100, 0}, ids({0, 1, 2, 0}), {0, 0, 0, 0}, model());
    return r;
  }
};

}  // namespace

TEST(PlanTracking, FirstEventIsDeparture) {
  Tracked f;
  const auto ps = track_event(start_tracking(f.route()), {0, kDepot, 100, 0}, f.model());
  EXPECT_EQ(ps.realized.size(), 1u);
  EXPECT_FALSE(ps.divergent);
  ASSERT_EQ(ps.forecast.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(ps.forecast[i].soc, f.route().rows[i + 1].soc_ref);
    EXPECT_DOUBLE_EQ(ps.forecast[i].t, f.route().rows[i + 1].k_ref);
  }
}

TEST(PlanTracking, MatchingArrivalIsNotDivergent) {
  Tracked f;
  const auto r = f.route();
  auto ps = track_event(start_tracking(r), {0, kDepot, 100, 0}, f.model());
  ps = track_event(ps, {0, NodeId{1}, r.rows[1].soc_ref, r.rows[1].k_ref}, f.model());
  EXPECT_FALSE(ps.divergent);
  EXPECT_EQ(ps.position, 1u);
  EXPECT_FALSE(should_replan(ps, f.est, {0.0, 1000.0, 0.2}));
}

TEST(PlanTracking, SocShortfallDiverges) {
  Tracked f;
  const auto r = f.route();
  auto ps = track_event(start_tracking(r), {0, kDepot, 100, 0}, f.model());
  ps = track_event(ps, {0, NodeId{1}, r.rows[1].soc_ref - 10, r.rows[1].k_ref}, f.model());
  EXPECT_TRUE(ps.divergent);
  EXPECT_TRUE(should_replan(ps, f.est, {0.0, 1000.0, 0.2}));
}

TEST(PlanTracking, UnexpectedNodeDiverges) {
  Tracked f;
  auto ps = track_event(start_tracking(f.route()), {0, kDepot, 100, 0}, f.model());
  ps = track_event(ps, {0, NodeId{2}, 90, 5}, f.model());
  EXPECT_TRUE(ps.divergent);
}

TEST(ShouldReplan, ForecastBelowFloor) {
  Tracked f;
  auto ps = track_event(start_tracking(f.route()), {0, kDepot, 100, 0}, f.model());
  // the whole tour uses 0.4 * 40 = 16 units; floor 90 breaks it
  const auto d = should_replan(ps, f.est, {90.0, 1000.0, 0.2});
  EXPECT_TRUE(d);
  EXPECT_NE(d.reason.find("floor"), std::string::npos);
}

TEST(ShouldReplan, ForecastPastDayLimit) {
  Tracked f;
  auto ps = track_event(start_tracking(f.route()), {0, kDepot, 100, 0}, f.model());
  EXPECT_TRUE(should_replan(ps, f.est, {0.0, 5.0, 0.2}));
}

TEST(ShouldReplan, EstimateGrowthAboveRho) {
  Tracked f;
  auto ps = track_event(start_tracking(f.route()), {0, kDepot, 100, 0}, f.model());
  EdgeEstimates grown = f.est;
  grown.at(1, 2).time.b_hat *= 1.3;
  EXPECT_TRUE(should_replan(ps, grown, {0.0, 1000.0, 0.2}));
  EdgeEstimates small = f.est;
  small.at(1, 2).time.b_hat *= 1.1;
  EXPECT_FALSE(should_replan(ps, small, {0.0, 1000.0, 0.2}));
}

// ---------------------------------------------------------------- clustering

TEST(Clustering, DefaultPartitionIsBalanced) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const Scenario s = generate_scenario({}, seed);
    const auto cl = cluster_customers(s, 2, seed);
    ASSERT_EQ(cl.size(), 2u);
    std::set<NodeId> all;
    for (const auto& c : cl) {
      EXPECT_LE(std::abs(static_cast<int>(c.size()) - 10), 4);
      for (auto n : c) EXPECT_TRUE(all.insert(n).second);
    }
    EXPECT_EQ(all.size(), 20u);
    EXPECT_EQ(cl, cluster_customers(s, 2, seed));
  }
}

TEST(Clustering, Singleton) {
  ScenarioConfig c;
  c.customers = 1;
  const Scenario s = generate_scenario(c, 1);
  const auto cl = cluster_customers(s, 1, 1);
  ASSERT_EQ(cl.size(), 1u);
  EXPECT_EQ(cl[0], ids({1}));
}

TEST(Clustering, SeparatedBlobs) {
  std::vector<Spot> spots;
  for (int k = 0; k < 6; ++k) spots.push_back({C, {5.0 + k % 3, 5.0 + k / 3}});
  for (int k = 0; k < 6; ++k) spots.push_back({C, {90.0 + k % 3, 90.0 + k / 3}});
  const Scenario s = line_scenario({50, 50}, spots);
  const auto cl = cluster_customers(s, 2, 9);
  EXPECT_EQ(cl[0], ids({1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(cl[1], ids({7, 8, 9, 10, 11, 12}));
}

TEST(Clustering, MoreVehiclesThanCustomers) {
  const Scenario s = line_scenario({0, 0}, {{C, {1, 1}}, {C, {9, 9}}});
  const auto cl = cluster_customers(s, 3, 1);
  ASSERT_EQ(cl.size(), 3u);
  EXPECT_EQ(cl[0].size() + cl[1].size(), 2u);
  EXPECT_TRUE(cl[2].empty());
  EXPECT_THROW(cluster_customers(s, 0, 1), ContractViolation);
}

// ---------------------------------------------------------------- routing

namespace {

struct Routing {
  Scenario s;
  EdgeEstimates est;
  PlannerOptions opt;
  UpperModel model() const { return {&s, &est, opt.service_time}; }
  TourProblem problem(std::vector<NodeId> customers) const {
    return {{kDepot, s.soc_capacity, 0.0}, std::move(customers), s.chargers(), opt};
  }
};

}  // namespace

TEST(PlanRoutes, TwoCustomersOnALine) {
  Routing f{line_scenario({0, 0}, {{C, {10, 0}}, {C, {20, 0}}}), {}, {0.0, 1000.0, 0.0, 1000000}};
  f.est = linear_estimates(f.s, 5.0, 1.0, 0.3);
  const auto tour = plan_tour(f.problem(ids({1, 2})), f.model());
  ASSERT_TRUE(tour.feasible);
  EXPECT_EQ(tour.customers_visited, 2);
  // both directions around the line cost the same; nearest-first keeps c1 first
  EXPECT_EQ(tour.sequence, ids({0, 1, 2, 0}));
  const auto want = oracle::exhaustive_tour({kDepot, 100, 0}, ids({1, 2}), {}, f.model(), 0.0, 1000.0);
  EXPECT_EQ(want.customers, 2);
  EXPECT_NEAR(tour.end_time, want.end_time, 1e-9);
  EXPECT_NEAR(tour.end_time, 40.0 / 5.0 + 3.0, 1e-12);
}

TEST(PlanRoutes, ZeroCustomers) {
  Routing f{line_scenario({0, 0}, {{H, {10, 0}}}), {}, {}};
  f.est = linear_estimates(f.s, 5.0, 1.0, 0.3);
  const auto plan = plan_routes({{}}, f.est, f.s, f.opt, 2);
  ASSERT_EQ(plan.vehicles.size(), 2u);
  for (const auto& v : plan.vehicles) {
    ASSERT_EQ(v.rows.size(), 2u);
    EXPECT_EQ(v.rows[0].node, kDepot);
    EXPECT_EQ(v.rows[1].node, kDepot);
    EXPECT_EQ(v.customers_planned(f.s), 0);
    EXPECT_FALSE(v.emergency);
  }
}

TEST(PlanRoutes, NothingReachable) {
  Routing f{line_scenario({0, 0}, {{C, {30, 0}}, {C, {0, 40}}}), {}, {0.0, 5.0, 0.0, 1000000}};
  f.est = linear_estimates(f.s, 5.0, 1.0, 0.3);
  const auto plan = plan_routes({ids({1, 2})}, f.est, f.s, f.opt);
  EXPECT_EQ(plan.vehicles[0].customers_planned(f.s), 0);
  EXPECT_EQ(plan.vehicles[0].rows.size(), 2u);
  const auto want = oracle::exhaustive_tour({kDepot, 100, 0}, ids({1, 2}), {}, f.model(), 0.0, 5.0);
  EXPECT_EQ(want.customers, 0);
}

TEST(PlanRoutes, InsertsChargerWhenNeeded) {
  // 80 units of driving at 0.5 per unit is 40 soc against a capacity of 30
  Routing f{line_scenario({0, 0}, {{C, {40, 0}}, {H, {20, 0}}}, 30.0), {}, {0.0, 1000.0, 0.0, 1000000}};
  f.est = linear_estimates(f.s, 5.0, 1.0, 0.5);
  const auto plan = plan_routes({ids({1})}, f.est, f.s, f.opt);
  const auto& v = plan.vehicles[0];
  EXPECT_EQ(v.customers_planned(f.s), 1);
  bool charged = false;
  for (const auto& r : v.rows) {
    if (r.charge_time > 0) {
      EXPECT_TRUE(f.s.is_charger(r.node));
      charged = true;
    }
    EXPECT_GE(r.soc_ref, -1e-9);
  }
  EXPECT_TRUE(charged);
  const auto want = oracle::exhaustive_tour({kDepot, 30, 0}, ids({1}), ids({2}), f.model(), 0.0, 1000.0);
  EXPECT_EQ(want.customers, 1);
  EXPECT_NEAR(v.rows.back().k_ref, want.end_time, 1e-9);
}

TEST(PlanRoutes, PlanIsFixedPointOfForecast) {
  const Scenario s = generate_scenario({}, 6);
  const auto est = envelope_estimates(s);
  PlannerOptions opt;
  opt.service_time = 1.0;
  const auto plan = plan_routes(cluster_customers(s, 2, 6), est, s, opt);
  const UpperModel m{&s, &est, 1.0};
  for (const auto& v : plan.vehicles) {
    UpperState st{kDepot, s.soc_capacity, 0.0};
    for (std::size_t i = 0; i + 1 < v.rows.size(); ++i) {
      EXPECT_TRUE(v.rows[i].charge_time == 0.0 || s.is_charger(v.rows[i].node));
      st = predict_next(st, {std::pair{v.rows[i].node, v.rows[i + 1].node}, v.rows[i].charge_time}, m);
      EXPECT_EQ(st.node, v.rows[i + 1].node);
      EXPECT_NEAR(st.soc, v.rows[i + 1].soc_ref, 1e-9);
      EXPECT_NEAR(st.t, v.rows[i + 1].k_ref, 1e-9);
      EXPECT_GE(st.soc, opt.soc_floor - 1e-9);
    }
    EXPECT_LE(v.rows.back().k_ref, opt.day_time_limit + 1e-9);
    EXPECT_EQ(v.rows.back().node, kDepot);
    EXPECT_GE(v.customers_planned(s), 1);
  }
}

TEST(PlanRoutes, MatchesExhaustiveOnSmallInstances) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    ScenarioConfig c;
    c.customers = 5;
    c.chargers = seed % 2 ? 1 : 0;
    c.soc_capacity = 40.0;
    const Scenario s = generate_scenario(c, seed);
    const auto est = envelope_estimates(s);
    const UpperModel m{&s, &est, 0.0};
    TourProblem p{{kDepot, s.soc_capacity, 0.0}, s.customers(), s.chargers(), {}};
    const auto got = plan_tour(p, m);
    const auto want = oracle::exhaustive_tour(p.start, p.customers, p.chargers, m, 0.0, 100.0);
    ASSERT_TRUE(got.feasible);
    EXPECT_EQ(got.customers_visited, want.customers) << seed;
    EXPECT_NEAR(got.end_time, want.end_time, 1e-6) << seed;
  }
}

TEST(PlanRoutes, StartAwayFromDepot) {
  Routing f{line_scenario({0, 0}, {{C, {10, 0}}, {C, {20, 0}}, {H, {15, 5}}}), {}, {0.0, 1000.0, 0.0, 1000000}};
  f.est = linear_estimates(f.s, 5.0, 1.0, 0.3);
  TourProblem p{{NodeId{1}, 50, 10}, ids({2}), f.s.chargers(), f.opt};
  const auto tour = plan_tour(p, f.model());
  ASSERT_TRUE(tour.feasible);
  EXPECT_EQ(tour.sequence.front(), NodeId{1});
  EXPECT_EQ(tour.sequence.back(), kDepot);
  const auto want = oracle::exhaustive_tour(p.start, p.customers, p.chargers, f.model(), 0.0, 1000.0);
  EXPECT_EQ(tour.customers_visited, want.customers);
  EXPECT_NEAR(tour.end_time, want.end_time, 1e-9);
}

TEST(PlanRoutes, StrandedStartGivesEmergencyRoute) {
  Routing f{line_scenario({0, 0}, {{C, {10, 0}}, {C, {20, 0}}}), {}, {}};
  f.est = linear_estimates(f.s, 5.0, 1.0, 0.3);
  TourProblem p{{NodeId{2}, 1.0, 10}, ids({1}), {}, f.opt};
  const auto tour = plan_tour(p, f.model());
  EXPECT_FALSE(tour.feasible);
  const auto route = route_from_tour(0, p, tour, f.model());
  EXPECT_TRUE(route.emergency);
  ASSERT_EQ(route.rows.size(), 2u);
  EXPECT_EQ(route.rows[1].node, kDepot);
}

TEST(PlanRoutes, ExpansionCapIsReported) {
  const Scenario s = generate_scenario({}, 3);
  const auto est = envelope_estimates(s);
  const UpperModel m{&s, &est, 0.0};
  PlannerOptions opt;
  opt.max_expansions = 10;
  TourProblem p{{kDepot, 100, 0}, s.customers(), s.chargers(), opt};
  const auto tour = plan_tour(p, m);
  EXPECT_FALSE(tour.exact);
  EXPECT_TRUE(tour.feasible);
}

TEST(ChargeToNeed, WholeSeconds) {
  EXPECT_DOUBLE_EQ(charge_to_need(10, 5, 0, 3), 0.0);
  EXPECT_DOUBLE_EQ(charge_to_need(10, 20, 0, 3), 4.0);
  EXPECT_DOUBLE_EQ(charge_to_need(10, 19, 2, 3), 4.0);
  EXPECT_DOUBLE_EQ(charge_to_need(0, 9, 0, 3), 3.0);
}
