#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "fleet_hlc/clustering.hpp"
#include "fleet_hlc/upper_model.hpp"

namespace fleet_hlc {

struct PlannerOptions {
  double soc_floor = 0.0;
  double day_time_limit = 100.0;
  double service_time = 0.0;
  std::int64_t max_expansions = 2'000'000;
};

// Tour model shared by the search and its tests:
//  * a tour leaves `start`, visits distinct customers and chargers, then ends
//    at the depot; each charger at most once, never two chargers in a row;
//  * at a charger the vehicle charges the fewest whole seconds that keep the
//    soc >= floor until the next charger or the end of the tour (the start
//    counts as a charger when it is one); the tour is infeasible if even a
//    full battery cannot cover that segment;
//  * soc must stay >= floor at every event and the end time <= day limit;
//  * best = most customers, then earliest end time.
struct TourProblem {
  UpperState start;
  std::vector<NodeId> customers;
  std::vector<NodeId> chargers;
  PlannerOptions options;
};

struct TourResult {
  std::vector<NodeId> sequence;      // start ... depot
  std::vector<double> charge_times;  // per sequence position
  int customers_visited = 0;
  double end_time = 0.0;
  bool feasible = false;
  bool exact = true;
  std::int64_t expansions = 0;
};

// Whole seconds of charge so that min(cap, arrival + rate * c) - drain >= floor.
inline double charge_to_need(double arrival_soc, double drain, double floor, double rate) {
  const double need = floor + drain - arrival_soc;
  if (need <= 0.0) return 0.0;
  return std::ceil(need / rate - 1e-9);
}

namespace detail {

class TourSearch {
 public:
  TourSearch(const TourProblem& p, const UpperModel& m) : p_(p), m_(m) {
    nodes_.push_back(p.start.node);
    for (auto c : p.customers) nodes_.push_back(c);
    first_charger_ = nodes_.size();
    for (auto c : p.chargers)
      if (c != p.start.node) nodes_.push_back(c);
    depot_ = nodes_.size();
    nodes_.push_back(kDepot);
    const std::size_t n = nodes_.size();
    cap_ = m.scenario->soc_capacity;
    rate_ = m.scenario->charge_rate;
    floor_ = p.options.soc_floor;
    limit_ = p.options.day_time_limit;

    time_.assign(n * n, 0.0);
    energy_.assign(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        time_[a * n + b] = m.travel_time(nodes_[a], nodes_[b]) + m.dwell(nodes_[b]);
        energy_[a * n + b] = m.travel_energy(nodes_[a], nodes_[b]);
      }
    // All-pairs shortest times for admissible reachability bounds.
    shortest_ = time_;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          shortest_[a * n + b] =
              std::min(shortest_[a * n + b], shortest_[a * n + k] + shortest_[k * n + b]);
    min_in_.assign(n, std::numeric_limits<double>::infinity());
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t a = 0; a < n; ++a)
        if (a != b && a != depot_) min_in_[b] = std::min(min_in_[b], time_[a * n + b]);
    visited_.assign(n, false);
    charge_.assign(n, 0.0);
  }

  TourResult run() {
    TourResult r;
    const bool start_is_depot = p_.start.node == kDepot;
    const bool start_is_charger = m_.scenario->is_charger(p_.start.node);
    visited_[0] = true;
    path_.push_back(0);
    charge_[0] = 0.0;
    State s{0, p_.start.t, p_.start.soc, start_is_charger ? 0 : -1, p_.start.soc, 0.0, 0};
    if (start_is_depot) {
      // Empty tour: never leave.
      record_empty();
    }
    search(s);
    r.expansions = expansions_;
    r.exact = expansions_ < p_.options.max_expansions;
    if (best_count_ < 0) return r;
    r.feasible = true;
    r.customers_visited = best_count_;
    r.end_time = best_time_;
    for (auto i : best_path_) r.sequence.push_back(nodes_[i]);
    r.charge_times = best_charge_;
    return r;
  }

 private:
  struct State {
    std::size_t node;
    double t;
    double soc;               // soc on arrival, including charges so far
    int charger_pos;          // index into path_ of the last charger, -1 if none
    double charger_arrival;   // soc on arrival at that charger
    double drain;             // energy used since leaving it
    int customers;
  };

  double T(std::size_t a, std::size_t b) const { return time_[a * nodes_.size() + b]; }
  double E(std::size_t a, std::size_t b) const { return energy_[a * nodes_.size() + b]; }
  double SP(std::size_t a, std::size_t b) const { return shortest_[a * nodes_.size() + b]; }
  bool is_charger(std::size_t i) const { return i >= first_charger_ && i < depot_; }

  // Moves from s to node b. Returns false when infeasible.
  bool advance(const State& s, std::size_t b, State& out) {
    const double e = E(s.node, b);
    out = s;
    out.node = b;
    out.t = s.t + T(s.node, b);
    out.soc = s.soc - e;
    out.drain = s.drain + e;
    if (out.soc < floor_ - kSocTolerance) {
      if (s.charger_pos < 0) return false;
      if (cap_ - out.drain < floor_ - kSocTolerance) return false;
      const auto pos = static_cast<std::size_t>(s.charger_pos);
      const double old_c = charge_[pos];
      const double new_c = charge_to_need(s.charger_arrival, out.drain, floor_, rate_);
      out.t += new_c - old_c;
      out.soc = std::min(cap_, s.charger_arrival + rate_ * new_c) - out.drain;
      charge_[pos] = new_c;
    }
    if (b == depot_ ? out.t > limit_ + 1e-9 : out.t + SP(b, depot_) > limit_ + 1e-9) return false;
    if (m_.scenario->is_customer(nodes_[b])) ++out.customers;
    if (is_charger(b)) {
      out.charger_pos = static_cast<int>(path_.size());
      out.charger_arrival = out.soc;
      out.drain = 0.0;
    }
    return true;
  }

  void record_empty() {
    best_count_ = 0;
    best_time_ = p_.start.t;
    best_path_ = {0, depot_};
    best_charge_ = {0.0, 0.0};
  }

  void record(const State& end) {
    if (end.customers > best_count_ ||
        (end.customers == best_count_ && end.t < best_time_ - 1e-9)) {
      best_count_ = end.customers;
      best_time_ = end.t;
      best_path_ = path_;
      best_path_.push_back(depot_);
      best_charge_.clear();
      for (std::size_t k = 0; k < path_.size(); ++k) best_charge_.push_back(charge_[k]);
      best_charge_.push_back(0.0);
    }
  }

  bool prune(const State& s) {
    // Customers still reachable within the day, each with its cheapest entry.
    reach_.clear();
    for (std::size_t i = 1; i < first_charger_; ++i) {
      if (visited_[i]) continue;
      if (s.t + SP(s.node, i) + SP(i, depot_) <= limit_ + 1e-9) reach_.push_back(min_in_[i]);
    }
    const int upper = s.customers + static_cast<int>(reach_.size());
    if (upper < best_count_) return true;
    if (upper > best_count_) return false;
    const auto need = static_cast<std::size_t>(best_count_ - s.customers);
    std::partial_sort(reach_.begin(), reach_.begin() + static_cast<std::ptrdiff_t>(need),
                      reach_.end());
    double lb = s.t + (need == 0 ? SP(s.node, depot_) : min_in_[depot_]);
    for (std::size_t k = 0; k < need; ++k) lb += reach_[k];
    lb = std::max(lb, s.t + SP(s.node, depot_));
    return lb >= best_time_ - 1e-9;
  }

  void search(const State& s) {
    if (expansions_ >= p_.options.max_expansions) return;
    ++expansions_;

    // Option: go home now.
    if (s.node != 0 || p_.start.node != kDepot) {
      const double saved = s.charger_pos >= 0 ? charge_[static_cast<std::size_t>(s.charger_pos)] : 0.0;
      State end;
      if (advance(s, depot_, end)) record(end);
      if (s.charger_pos >= 0) charge_[static_cast<std::size_t>(s.charger_pos)] = saved;
    }
    if (prune(s)) return;

    std::vector<std::size_t> order;
    for (std::size_t b = 1; b < depot_; ++b) {
      if (visited_[b]) continue;
      if (is_charger(b) && (is_charger(s.node) || s.charger_pos == static_cast<int>(path_.size()) - 1))
        continue;
      order.push_back(b);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return T(s.node, a) < T(s.node, b); });

    for (std::size_t b : order) {
      const double saved = s.charger_pos >= 0 ? charge_[static_cast<std::size_t>(s.charger_pos)] : 0.0;
      State next;
      if (advance(s, b, next)) {
        visited_[b] = true;
        path_.push_back(b);
        charge_.resize(std::max(charge_.size(), path_.size()));
        charge_[path_.size() - 1] = 0.0;
        search(next);
        path_.pop_back();
        visited_[b] = false;
      }
      if (s.charger_pos >= 0) charge_[static_cast<std::size_t>(s.charger_pos)] = saved;
      if (expansions_ >= p_.options.max_expansions) return;
    }
  }

  const TourProblem& p_;
  const UpperModel& m_;
  std::vector<NodeId> nodes_;
  std::size_t first_charger_ = 0;
  std::size_t depot_ = 0;
  double cap_ = 100.0, rate_ = 3.0, floor_ = 0.0, limit_ = 100.0;
  std::vector<double> time_, energy_, shortest_, min_in_;
  std::vector<bool> visited_;
  std::vector<std::size_t> path_;
  std::vector<double> charge_;  // charge seconds per path position
  std::vector<double> reach_;
  std::int64_t expansions_ = 0;

  int best_count_ = -1;
  double best_time_ = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_path_;
  std::vector<double> best_charge_;
};

}  // namespace detail

// Depth-first branch and bound over the tour model above.
inline TourResult plan_tour(const TourProblem& problem, const UpperModel& model) {
  detail::TourSearch search(problem, model);
  return search.run();
}

// Rows for a found tour, or a straight run home when nothing is feasible.
inline VehicleRoute route_from_tour(int vehicle, const TourProblem& problem,
                                    const TourResult& tour, const UpperModel& model) {
  VehicleRoute route;
  route.vehicle = vehicle;
  route.cluster = problem.customers;
  route.exact = tour.exact;
  if (tour.feasible) {
    route.rows = forecast_rows(problem.start, tour.sequence, tour.charge_times, model);
  } else {
    route.emergency = true;
    std::vector<NodeId> seq{problem.start.node, kDepot};
    route.rows = forecast_rows(problem.start, seq, {0.0, 0.0}, model);
  }
  return route;
}

// One tour per cluster; cluster i goes to vehicle i. Vehicles without a
// cluster get a depot-only plan.
inline RoutePlan plan_routes(const std::vector<std::vector<NodeId>>& clusters,
                             const EdgeEstimates& estimates, const Scenario& scenario,
                             const PlannerOptions& options, int vehicles = -1) {
  UpperModel model{&scenario, &estimates, options.service_time};
  RoutePlan plan;
  const int m = vehicles < 0 ? static_cast<int>(clusters.size()) : vehicles;
  for (int v = 0; v < m; ++v) {
    TourProblem problem;
    problem.start = {kDepot, scenario.soc_capacity, 0.0};
    if (v < static_cast<int>(clusters.size())) problem.customers = clusters[static_cast<std::size_t>(v)];
    problem.chargers = scenario.chargers();
    problem.options = options;
    const TourResult tour = plan_tour(problem, model);
    plan.vehicles.push_back(route_from_tour(v, problem, tour, model));
  }
  return plan;
}

}  // namespace fleet_hlc
