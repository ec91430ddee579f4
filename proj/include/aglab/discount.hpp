#pragma once

#include <cmath>
#include <string>

#include "aglab/errors.hpp"

namespace aglab {

/// Temporal discount taxonomy. The weight w(t, t') multiplies utility
/// received at time t' as seen from time t.
///
///   geometric(g)      w = g^(t'-t)
///   horizon_window(m) w = 1 if t'-t <= m else 0
///   goal_geometric    w = 2^(t-t')
///   spike(m)          w = 1 iff t'-t == m
struct DiscountSpec {
  enum class Kind { geometric, horizon_window, goal_geometric, spike };

  Kind kind = Kind::geometric;
  double gamma = 0.5;  // geometric only
  int window = 0;      // horizon_window / spike

  static DiscountSpec geometric(double gamma) {
    require(gamma > 0.0 && gamma < 1.0, Errc::parameter, "geometric discount requires 0 < gamma < 1");
    return {Kind::geometric, gamma, 0};
  }
  static DiscountSpec horizon_window(int m) {
    require(m >= 0, Errc::parameter, "window requires m >= 0");
    return {Kind::horizon_window, 0.0, m};
  }
  static DiscountSpec goal_geometric() { return {Kind::goal_geometric, 0.0, 0}; }
  static DiscountSpec spike(int m) {
    require(m >= 0, Errc::parameter, "spike requires m >= 0");
    return {Kind::spike, 0.0, m};
  }
};

inline double discount_weight(const DiscountSpec& spec, int t, int t_future) {
  require(t_future >= t, Errc::index, "discount_weight needs t' >= t");
  int lag = t_future - t;
  switch (spec.kind) {
    case DiscountSpec::Kind::geometric:
      return std::pow(spec.gamma, lag);
    case DiscountSpec::Kind::horizon_window:
      return lag <= spec.window ? 1.0 : 0.0;
    case DiscountSpec::Kind::goal_geometric:
      return std::pow(2.0, -lag);
    case DiscountSpec::Kind::spike:
      return lag == spec.window ? 1.0 : 0.0;
  }
  fail(Errc::parameter, "unknown discount kind");
}

}  // namespace aglab
