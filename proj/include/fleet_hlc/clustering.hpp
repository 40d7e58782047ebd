#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fleet_hlc/rng.hpp"
#include "fleet_hlc/scenario.hpp"

namespace fleet_hlc {

struct ClusteringOptions {
  int max_iterations = 100;
  // Largest cluster may hold at most ceil(C / m) + balance_slack customers.
  int balance_slack = 2;
};

namespace detail {

inline double sq(double x) { return x * x; }

inline std::vector<Point> kmeanspp_seeds(const std::vector<Point>& pts, int k, CounterRng& rng) {
  std::vector<Point> centers;
  centers.push_back(pts[rng.below(pts.size())]);
  std::vector<double> d2(pts.size());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, sq(pts[i].x - c.x) + sq(pts[i].y - c.y));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (; pick + 1 < pts.size(); ++pick) {
        r -= d2[pick];
        if (r < 0.0) break;
      }
    } else {
      pick = rng.below(pts.size());
    }
    centers.push_back(pts[pick]);
  }
  return centers;
}

}  // namespace detail

// Seeded k-means (k-means++ initialisation, Lloyd iterations) on customer
// positions, followed by a balancing pass that moves the cheapest boundary
// customers out of oversized clusters. Clusters are returned ordered by their
// smallest customer id, members sorted.
inline std::vector<std::vector<NodeId>> cluster_customers(const Scenario& s, int m_vehicles,
                                                          std::uint64_t seed,
                                                          const ClusteringOptions& opt = {}) {
  if (m_vehicles < 1) throw ContractViolation("cluster_customers: need at least one vehicle");
  const auto customers = s.customers();
  std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(m_vehicles));
  if (customers.empty()) return out;
  const int k = std::min<int>(m_vehicles, static_cast<int>(customers.size()));

  std::vector<Point> pts;
  for (auto c : customers) pts.push_back(s.node(c).position);
  CounterRng rng(seed, RngPurpose::kClustering);
  auto centers = detail::kmeanspp_seeds(pts, k, rng);

  std::vector<int> label(pts.size(), -1);
  auto dist2 = [&](std::size_t i, int c) {
    return detail::sq(pts[i].x - centers[c].x) + detail::sq(pts[i].y - centers[c].y);
  };
  for (int it = 0; it < opt.max_iterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      int best = 0;
      for (int c = 1; c < k; ++c)
        if (dist2(i, c) < dist2(i, best)) best = c;
      if (label[i] != best) {
        label[i] = best;
        changed = true;
      }
    }
    std::vector<Point> sum(static_cast<std::size_t>(k));
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sum[label[i]].x += pts[i].x;
      sum[label[i]].y += pts[i].y;
      ++count[label[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) {
        centers[c] = {sum[c].x / count[c], sum[c].y / count[c]};
      } else {
        // Re-seed an empty cluster at the point farthest from its center.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
          if (dist2(i, label[i]) > far_d) {
            far_d = dist2(i, label[i]);
            far = i;
          }
        centers[c] = pts[far];
        changed = true;
      }
    }
    if (!changed) break;
  }

  const int n = static_cast<int>(pts.size());
  const int cap = (n + k - 1) / k + opt.balance_slack;
  auto sizes = [&] {
    std::vector<int> sz(static_cast<std::size_t>(k), 0);
    for (int l : label) ++sz[l];
    return sz;
  };
  for (auto sz = sizes();; sz = sizes()) {
    const int big = static_cast<int>(std::max_element(sz.begin(), sz.end()) - sz.begin());
    const bool has_empty = std::find(sz.begin(), sz.end(), 0) != sz.end();
    if (sz[big] <= cap && !has_empty) break;
    // Cheapest move of a member of the largest cluster into a cluster with room.
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    int best_c = -1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (label[i] != big) continue;
      for (int c = 0; c < k; ++c) {
        if (c == big || sz[c] >= cap) continue;
        if (has_empty && sz[c] != 0) continue;
        const double cost = std::sqrt(dist2(i, c)) - std::sqrt(dist2(i, big));
        if (cost < best_cost) {
          best_cost = cost;
          best_i = i;
          best_c = c;
        }
      }
    }
    if (best_c < 0) break;
    label[best_i] = best_c;
  }

  std::vector<std::vector<NodeId>> groups(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < pts.size(); ++i) groups[label[i]].push_back(customers[i]);
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    if (a.empty() || b.empty()) return !a.empty() && b.empty();
    return a.front() < b.front();
  });
  for (int c = 0; c < k; ++c) out[c] = std::move(groups[c]);
  return out;
}

}  // namespace fleet_hlc
