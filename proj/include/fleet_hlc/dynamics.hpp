#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fleet_hlc/errors.hpp"

namespace fleet_hlc {

// Continuous state of one vehicle: planar position (z, y), heading, speed
// and state of charge. soc < 0 is representable and means the vehicle is
// stranded.
struct VehicleState {
  double z = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double soc = 0.0;
  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct ControlInput {
  double a = 0.0;      // longitudinal acceleration
  double delta = 0.0;  // turn rate
  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

struct InputLimits {
  double a_max = 5.0;
  double delta_max = 0.5 * std::numbers::pi;
};

struct EdgeLimits {
  double v_max = 10.0;
  double soc_capacity = 100.0;
};

inline constexpr double kDefaultDt = 0.1;

inline double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::remainder(theta, two_pi);
  if (w < -std::numbers::pi) w += two_pi;
  if (w > std::numbers::pi) w -= two_pi;
  return w;
}

// Forward-Euler step of the unicycle + battery model. Energy drawn in the
// step is alpha * v * dt using the speed at the start of the step.
inline VehicleState step(const VehicleState& s, const ControlInput& u, double alpha, double dt) {
  VehicleState n;
  n.z = s.z + s.v * std::cos(s.theta) * dt;
  n.y = s.y + s.v * std::sin(s.theta) * dt;
  n.theta = wrap_angle(s.theta + u.delta * dt);
  n.v = s.v + u.a * dt;
  n.soc = s.soc - alpha * s.v * dt;
  return n;
}

// Stationary charging, capped at capacity.
inline VehicleState charge(const VehicleState& s, double duration, double rate, double capacity) {
  if (duration < 0.0) throw ContractViolation("charge: negative duration");
  if (s.v != 0.0) throw ContractViolation("charge: vehicle must be stationary");
  VehicleState n = s;
  n.soc = std::min(capacity, s.soc + rate * duration);
  return n;
}

enum class Bound { kThetaLow, kThetaHigh, kSpeedLow, kSpeedHigh, kSocLow, kSocHigh,
                   kAccelLow, kAccelHigh, kTurnLow, kTurnHigh };

inline const char* to_string(Bound b) {
  switch (b) {
    case Bound::kThetaLow: return "theta_low";
    case Bound::kThetaHigh: return "theta_high";
    case Bound::kSpeedLow: return "v_low";
    case Bound::kSpeedHigh: return "v_high";
    case Bound::kSocLow: return "soc_low";
    case Bound::kSocHigh: return "soc_high";
    case Bound::kAccelLow: return "a_low";
    case Bound::kAccelHigh: return "a_high";
    case Bound::kTurnLow: return "delta_low";
    case Bound::kTurnHigh: return "delta_high";
  }
  return "?";
}

struct Violation {
  Bound bound;
  double margin;  // how far past the bound, > 0
};

// Bounds are closed. `slack` absorbs floating-point noise (e.g. a speed of
// -1e-16 after braking to rest).
inline std::vector<Violation> check_constraints(const VehicleState& s, const ControlInput& u,
                                                const EdgeLimits& lim,
                                                const InputLimits& in = {},
                                                double slack = 1e-9) {
  std::vector<Violation> out;
  auto lower = [&](double value, double bound, Bound which) {
    if (value < bound - slack) out.push_back({which, bound - value});
  };
  auto upper = [&](double value, double bound, Bound which) {
    if (value > bound + slack) out.push_back({which, value - bound});
  };
  lower(s.theta, -std::numbers::pi, Bound::kThetaLow);
  upper(s.theta, std::numbers::pi, Bound::kThetaHigh);
  lower(s.v, 0.0, Bound::kSpeedLow);
  upper(s.v, lim.v_max, Bound::kSpeedHigh);
  lower(s.soc, 0.0, Bound::kSocLow);
  upper(s.soc, lim.soc_capacity, Bound::kSocHigh);
  lower(u.a, -in.a_max, Bound::kAccelLow);
  upper(u.a, in.a_max, Bound::kAccelHigh);
  lower(u.delta, -in.delta_max, Bound::kTurnLow);
  upper(u.delta, in.delta_max, Bound::kTurnHigh);
  return out;
}

}  // namespace fleet_hlc
