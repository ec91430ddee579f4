#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "aglab/errors.hpp"

namespace aglab {

/// Per-person utility values in [0,1], with optional alive flags and
/// optional aggregation weights.
struct ValueProfile {
  struct Member {
    std::string id;
    double value = 0.0;
    bool alive = true;
    double weight = -1.0;  // < 0 means no weight given
  };

  std::vector<Member> members;

  void add(std::string id, double value, bool alive = true, double weight = -1.0) {
    require(value >= 0.0 && value <= 1.0, Errc::parameter, "values lie in [0,1]");
    members.push_back({std::move(id), value, alive, weight});
  }

  bool has_weights() const {
    return !members.empty() && std::all_of(members.begin(), members.end(),
                                           [](const Member& m) { return m.weight >= 0.0; });
  }
};

/// Dead members keep their slots with value forced to 0; nobody is removed.
inline ValueProfile apply_death_rule(const ValueProfile& profile) {
  ValueProfile out = profile;
  for (auto& m : out.members)
    if (!m.alive) m.value = 0.0;
  return out;
}

inline double aggregate_mean(const ValueProfile& profile) {
  require(!profile.members.empty(), Errc::empty_input, "aggregate over an empty profile");
  double total = 0.0;
  for (const auto& m : profile.members) total += m.value;
  return total / profile.members.size();
}

inline double aggregate_maximin(const ValueProfile& profile) {
  require(!profile.members.empty(), Errc::empty_input, "aggregate over an empty profile");
  double worst = 1.0;
  for (const auto& m : profile.members) worst = std::min(worst, m.value);
  return worst;
}

/// Shaping function f: [0,1] -> [0,1] with f(0)=0, f(1)=1, strictly
/// increasing and midpoint-concave on the 1/1024 grid. Checked at load.
class ConcaveShaper {
 public:
  ConcaveShaper(std::string name, std::function<double(double)> f) : name_(std::move(name)), f_(std::move(f)) {
    check();
  }

  static ConcaveShaper sqrt_shaper() {
    return ConcaveShaper("sqrt", [](double x) { return std::sqrt(x); });
  }
  /// 1 - (1 - x)^2
  static ConcaveShaper complement_square() {
    return ConcaveShaper("one_minus_square", [](double x) { return 1.0 - (1.0 - x) * (1.0 - x); });
  }

  /// Piecewise-linear shaper through the given grid values (index k maps to
  /// x = k/(n-1)); the same invariants are enforced.
  static ConcaveShaper from_table(std::string name, std::vector<double> ys) {
    require(ys.size() >= 2, Errc::parameter, "shaper table needs at least two points");
    auto f = [ys = std::move(ys)](double x) {
      double pos = x * (ys.size() - 1);
      int lo = std::clamp(static_cast<int>(pos), 0, static_cast<int>(ys.size()) - 2);
      double frac = pos - lo;
      return ys[lo] * (1.0 - frac) + ys[lo + 1] * frac;
    };
    return ConcaveShaper(std::move(name), std::move(f));
  }

  const std::string& name() const { return name_; }
  double operator()(double x) const { return f_(x); }

 private:
  void check() const {
    const int grid = 1024;
    require(std::abs(f_(0.0)) <= 1e-12 && std::abs(f_(1.0) - 1.0) <= 1e-12, Errc::parameter,
            "shaper must fix 0 and 1");
    double prev = f_(0.0);
    for (int k = 1; k <= grid; ++k) {
      double x = static_cast<double>(k) / grid;
      double y = f_(x);
      require(y > prev, Errc::parameter, "shaper must be strictly increasing");
      prev = y;
    }
    for (int i = 0; i <= grid; ++i) {
      // midpoint concavity on grid pairs a fixed stride apart
      for (int stride : {2, 64, 512}) {
        int j = i + stride;
        if (j > grid) break;
        double a = static_cast<double>(i) / grid;
        double b = static_cast<double>(j) / grid;
        require(f_((a + b) / 2) >= (f_(a) + f_(b)) / 2 - 1e-12, Errc::parameter,
                "shaper must be midpoint-concave");
      }
    }
  }

  std::string name_;
  std::function<double(double)> f_;
};

inline double aggregate_concave(const ValueProfile& profile, const ConcaveShaper& f) {
  require(!profile.members.empty(), Errc::empty_input, "aggregate over an empty profile");
  double total = 0.0;
  for (const auto& m : profile.members) total += f(m.value);
  return total / profile.members.size();
}

inline double aggregate_weighted(const ValueProfile& profile) {
  require(!profile.members.empty(), Errc::empty_input, "aggregate over an empty profile");
  require(profile.has_weights(), Errc::parameter, "weighted aggregate needs a weight per member");
  double wsum = 0.0, total = 0.0;
  for (const auto& m : profile.members) {
    wsum += m.weight;
    total += m.weight * m.value;
  }
  require(std::abs(wsum - 1.0) <= 1e-9, Errc::normalization, "weights must sum to 1");
  return total;
}

/// Profile file: one `person_id value [alive] [weight]` row per line,
/// `#` starts a comment.
inline ValueProfile parse_profile(const std::string& text) {
  ValueProfile out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string id;
    if (!(ls >> id) || id[0] == '#') continue;
    double value;
    require(static_cast<bool>(ls >> value), Errc::syntax, "profile row needs a value");
    int alive = 1;
    double weight = -1.0;
    ls >> alive;
    ls >> weight;
    out.add(id, value, alive != 0, weight);
  }
  return out;
}

}  // namespace aglab
