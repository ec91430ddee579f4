#pragma once

#include <cstdint>
#include <random>

namespace aglab {

/// Deterministic random stream. All stochastic routines take one of these
/// explicitly so runs are reproducible per seed; the draw order of each
/// consumer is part of its documented contract.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Sample an index from an unnormalized nonnegative weight row.
  template <typename Row>
  int sample_row(const Row& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double x = uniform() * total;
    double acc = 0.0;
    int last = 0;
    for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
      if (weights[i] <= 0.0) continue;
      acc += weights[i];
      last = i;
      if (x < acc) return i;
    }
    return last;  // guard against accumulated rounding at the top end
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace aglab
