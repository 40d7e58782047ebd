#pragma once

#include <vector>

#include "fleet_hlc/edge_estimates.hpp"
#include "fleet_hlc/scenario.hpp"

namespace fleet_hlc::fixture {

struct Spot {
  NodeKind kind;
  Point at;
};

// Hand-built scenario. The depot is always node 0 at `depot`; every edge gets
// the same truth interval and speed limit.
inline Scenario line_scenario(Point depot, const std::vector<Spot>& spots, double capacity = 100.0,
                              double alpha_lo = 0.25, double alpha_hi = 0.35, double v_max = 8.0) {
  Scenario s;
  s.soc_capacity = capacity;
  s.nodes.push_back({NodeId{0}, NodeKind::kDepot, depot});
  for (const auto& sp : spots)
    s.nodes.push_back({NodeId{static_cast<int>(s.nodes.size())}, sp.kind, sp.at});
  s.edges = EdgeMap<EdgeTruth>(s.node_count(), EdgeTruth{alpha_lo, alpha_hi, v_max, 0.0});
  refresh_lengths(s);
  return s;
}

// Estimates with t_hi = length / speed + overhead and e_hi = rate * length.
inline EdgeEstimates linear_estimates(const Scenario& s, double speed, double overhead, double rate) {
  EdgeEstimates est(s.node_count());
  s.edges.for_each([&](int i, int j, const EdgeTruth& e) {
    auto& x = est.at(i, j);
    x.time.a_hat = e.length / (2.0 * speed);
    x.time.b_hat = e.length / speed + overhead;
    x.energy.a_hat = 0.5 * rate * e.length;
    x.energy.b_hat = rate * e.length;
  });
  return est;
}

}  // namespace fleet_hlc::fixture
