#pragma once

#include <cstdint>
#include <initializer_list>

namespace fleet_hlc {

// Draw purposes. Each purpose gets an independent stream family so that
// adding days, vehicles or nodes never shifts unrelated draws. Values are
// part of the replay contract; do not renumber.
enum class RngPurpose : std::uint64_t {
  kNodePosition = 1,
  kEdgeAlphaInterval = 2,
  kEdgeSpeedLimit = 3,
  kDailyAlpha = 4,
  kClustering = 5,
  kTest = 99,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based generator: output i of stream `key` is a pure function of
// (key, i). Version 1 of the stream layout.
class CounterRng {
 public:
  static constexpr int kVersion = 1;

  CounterRng(std::uint64_t seed, RngPurpose purpose,
             std::initializer_list<std::uint64_t> coords = {}) noexcept
      : key_(splitmix64(seed ^ 0x6a09e667f3bcc908ULL)) {
    key_ = splitmix64(key_ ^ static_cast<std::uint64_t>(purpose));
    for (auto c : coords) key_ = splitmix64(key_ ^ splitmix64(c + 0x3c6ef372fe94f82bULL));
  }

  std::uint64_t next_u64() noexcept {
    return splitmix64(key_ ^ splitmix64(counter_++ * 0xd1b54a32d192ed03ULL));
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace fleet_hlc
