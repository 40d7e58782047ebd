#pragma once

#include <cassert>
#include <compare>
#include <cstddef>
#include <utility>
#include <vector>

namespace fleet_hlc {

struct NodeId {
  int index = 0;
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

inline constexpr NodeId kDepot{0};

// Dense storage for a value per unordered node pair {i, j}, i != j, of a
// complete graph. Lookups are order-insensitive.
template <typename T>
class EdgeMap {
 public:
  EdgeMap() = default;
  explicit EdgeMap(int node_count, const T& init = T{})
      : n_(node_count),
        data_(static_cast<std::size_t>(node_count) *
                  static_cast<std::size_t>(node_count > 0 ? node_count - 1 : 0) / 2,
              init) {}

  int node_count() const noexcept { return n_; }
  std::size_t size() const noexcept { return data_.size(); }

  // Position of {i, j} in canonical (i < j, row-major) order.
  std::size_t slot(int i, int j) const noexcept {
    assert(i != j && i >= 0 && j >= 0 && i < n_ && j < n_);
    if (i > j) std::swap(i, j);
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(j);
    const auto n = static_cast<std::size_t>(n_);
    return a * n - a * (a + 1) / 2 + (b - a - 1);
  }

  T& at(int i, int j) { return data_[slot(i, j)]; }
  const T& at(int i, int j) const { return data_[slot(i, j)]; }
  T& at(NodeId i, NodeId j) { return at(i.index, j.index); }
  const T& at(NodeId i, NodeId j) const { return at(i.index, j.index); }

  T& by_slot(std::size_t s) { return data_[s]; }
  const T& by_slot(std::size_t s) const { return data_[s]; }

  // Calls f(i, j, value) for each unordered pair with i < j.
  template <typename F>
  void for_each(F&& f) const {
    std::size_t s = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) f(i, j, data_[s++]);
  }
  template <typename F>
  void for_each(F&& f) {
    std::size_t s = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) f(i, j, data_[s++]);
  }

  friend bool operator==(const EdgeMap&, const EdgeMap&) = default;

 private:
  int n_ = 0;
  std::vector<T> data_;
};

}  // namespace fleet_hlc
