#pragma once

#include <cmath>
#include <vector>

#include "aglab/errors.hpp"

namespace aglab {

/// Probability-weighted sum of mutually exclusive outcome values.
struct Lottery {
  struct Entry {
    double probability;
    double value;
  };
  std::vector<Entry> entries;

  static Lottery of(std::initializer_list<Entry> es) { return Lottery{std::vector<Entry>(es)}; }
};

inline constexpr double kProbabilityTolerance = 1e-9;

inline void validate(const Lottery& lottery) {
  double total = 0.0;
  for (const auto& e : lottery.entries) {
    require(e.probability >= 0.0, Errc::normalization, "negative lottery probability");
    total += e.probability;
  }
  require(std::abs(total - 1.0) <= kProbabilityTolerance, Errc::normalization,
          "lottery probabilities must sum to 1");
}

inline double lottery_expected_value(const Lottery& lottery) {
  validate(lottery);
  double v = 0.0;
  for (const auto& e : lottery.entries) v += e.probability * e.value;
  return v;
}

/// Preference comparator induced by expected value: negative means the left
/// lottery is dispreferred, zero means indifference.
inline int compare_lotteries(const Lottery& a, const Lottery& b) {
  double va = lottery_expected_value(a);
  double vb = lottery_expected_value(b);
  if (va < vb) return -1;
  if (va > vb) return 1;
  return 0;
}

/// p*A + (1-p)*B as a single lottery.
inline Lottery mix(double p, const Lottery& a, const Lottery& b) {
  require(p >= 0.0 && p <= 1.0, Errc::parameter, "mixture weight outside [0,1]");
  Lottery out;
  for (const auto& e : a.entries) out.entries.push_back({p * e.probability, e.value});
  for (const auto& e : b.entries) out.entries.push_back({(1.0 - p) * e.probability, e.value});
  return out;
}

}  // namespace aglab
