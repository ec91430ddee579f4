#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "aglab/discount.hpp"
#include "aglab/envmodel.hpp"
#include "aglab/history.hpp"
#include "aglab/lottery.hpp"
#include "aglab/utility.hpp"

using namespace aglab;

namespace {

// Table of outcome values for the nine hitman/victim outcomes, ordered
// (Hd,Vd) (Hd,Vw) (Hd,V+) (Hw,Vd) (Hw,Vw) (Hw,V+) (H+,Vd) (H+,Vw) (H+,V+).
const double kOutcomeValue[9] = {0.0, 0.4, 0.8, 0.1, 0.5, 0.9, 0.2, 0.6, 1.0};
const double kShootProb[9] = {0.0, 0.0, 0.7, 0.01, 0.01, 0.18, 0.07, 0.02, 0.01};
const double kHoldProb[9] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.7, 0.2, 0.1};

Lottery column(const double* probs) {
  Lottery l;
  for (int i = 0; i < 9; ++i) l.entries.push_back({probs[i], kOutcomeValue[i]});
  return l;
}

}  // namespace

TEST_CASE("extend_history basics") {
  History h(Alphabets{2, 2});
  History h1 = h.extended(0, 1);
  REQUIRE(h1.length() == 1);
  REQUIRE(h1.action(1) == 0);
  REQUIRE(h1.observation(1) == 1);

  History h2 = h1.extended(1, 0);
  REQUIRE(h2.length() == 2);
  REQUIRE(h1.is_prefix_of(h2));
  REQUIRE(h2.action(1) == 0);
  REQUIRE(h2.observation(1) == 1);

  REQUIRE_THROWS_MATCHES(h.extended(7, 0), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == Errc::alphabet_violation;
                         }));
}

TEST_CASE("flagged history projections") {
  FlaggedHistory fh(Alphabets{3, 2});
  fh = fh.extended(1, false, 0);
  fh = fh.extended(2, true, 1);

  History plain = fh.y();
  REQUIRE(plain.length() == 2);
  REQUIRE(plain.action(2) == 2);

  History concealed = fh.x();
  REQUIRE(concealed.alphabets().actions == 4);
  REQUIRE(concealed.action(1) == 1);
  REQUIRE(concealed.action(2) == 3);  // a^s
}

TEST_CASE("discount_weight per kind") {
  REQUIRE(discount_weight(DiscountSpec::geometric(0.9), 5, 5) == 1.0);
  REQUIRE(discount_weight(DiscountSpec::goal_geometric(), 0, 3) == Catch::Approx(0.125));
  REQUIRE(discount_weight(DiscountSpec::horizon_window(2), 1, 4) == 0.0);
  REQUIRE(discount_weight(DiscountSpec::horizon_window(2), 1, 3) == 1.0);
  REQUIRE(discount_weight(DiscountSpec::spike(2), 1, 3) == 1.0);
  REQUIRE(discount_weight(DiscountSpec::spike(2), 1, 2) == 0.0);

  SECTION("zero lag is 0 or 1, and 1 for geometric/window") {
    for (const auto& spec : {DiscountSpec::geometric(0.3), DiscountSpec::horizon_window(0),
                             DiscountSpec::goal_geometric(), DiscountSpec::spike(3), DiscountSpec::spike(0)}) {
      double w = discount_weight(spec, 4, 4);
      REQUIRE((w == 0.0 || w == 1.0));
    }
    REQUIRE(discount_weight(DiscountSpec::geometric(0.3), 4, 4) == 1.0);
    REQUIRE(discount_weight(DiscountSpec::horizon_window(0), 4, 4) == 1.0);
  }

  REQUIRE_THROWS_AS(DiscountSpec::geometric(1.0), Error);
  REQUIRE_THROWS_AS(DiscountSpec::geometric(0.0), Error);
}

TEST_CASE("lottery expected values reproduce the decision table") {
  REQUIRE(lottery_expected_value(column(kShootProb)) == Catch::Approx(0.764).margin(1e-12));
  REQUIRE(lottery_expected_value(column(kHoldProb)) == Catch::Approx(0.36).margin(1e-12));
  REQUIRE(lottery_expected_value(Lottery::of({{1.0, 0.37}})) == 0.37);

  Lottery bad = Lottery::of({{0.5, 1.0}, {0.2, 0.0}});
  REQUIRE_THROWS_MATCHES(lottery_expected_value(bad), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == Errc::normalization;
                         }));
}

TEST_CASE("lottery linearity and constancy") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  auto random_lottery = [&](int n) {
    Lottery l;
    std::vector<double> w(n);
    double total = 0.0;
    for (double& x : w) {
      x = std::uniform_real_distribution<double>(0.01, 1.0)(gen);
      total += x;
    }
    for (double x : w) l.entries.push_back({x / total, val(gen)});
    return l;
  };

  for (int trial = 0; trial < 50; ++trial) {
    Lottery a = random_lottery(4);
    Lottery b = random_lottery(3);
    double p = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    double mixed = lottery_expected_value(mix(p, a, b));
    double direct = p * lottery_expected_value(a) + (1.0 - p) * lottery_expected_value(b);
    REQUIRE(mixed == Catch::Approx(direct).margin(1e-12));
  }

  Lottery constant = Lottery::of({{0.25, 0.6}, {0.5, 0.6}, {0.25, 0.6}});
  REQUIRE(lottery_expected_value(constant) == Catch::Approx(0.6).margin(1e-12));
}

TEST_CASE("expected-value comparison is a total preorder") {
  std::mt19937 gen(11);
  std::vector<Lottery> pool;
  for (int i = 0; i < 20; ++i) {
    Lottery l;
    double w0 = std::uniform_real_distribution<double>(0.05, 0.95)(gen);
    l.entries.push_back({w0, std::uniform_real_distribution<double>(0.0, 1.0)(gen)});
    l.entries.push_back({1.0 - w0, std::uniform_real_distribution<double>(0.0, 1.0)(gen)});
    pool.push_back(l);
  }
  // exactly one of <, >, ~ holds pairwise
  for (const auto& a : pool)
    for (const auto& b : pool) {
      int ab = compare_lotteries(a, b);
      int ba = compare_lotteries(b, a);
      REQUIRE(ab == -ba);
    }
  // sorting by the comparator leaves a transitively ordered sequence
  std::sort(pool.begin(), pool.end(),
            [](const Lottery& a, const Lottery& b) { return compare_lotteries(a, b) < 0; });
  for (std::size_t i = 0; i + 2 < pool.size(); ++i) {
    if (compare_lotteries(pool[i], pool[i + 1]) <= 0 && compare_lotteries(pool[i + 1], pool[i + 2]) <= 0)
      REQUIRE(compare_lotteries(pool[i], pool[i + 2]) <= 0);
  }
}

TEST_CASE("utility kinds") {
  SECTION("reward reads the factored observation") {
    RewardCodec codec{{0.0, 0.7, 1.0}};
    // |O| = 6: o' in {0,1}, reward grid of 3
    History h(Alphabets{2, 6});
    h = h.extended(0, codec.encode(1, 1));
    UtilitySpec u = UtilitySpec::reward(codec);
    REQUIRE(u.eval(h) == Catch::Approx(0.7));

    History bad(Alphabets{2, 5});
    bad = bad.extended(0, 4);
    REQUIRE_THROWS_MATCHES(u.eval(bad), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::codec;
                           }));
  }

  SECTION("goal pays out once") {
    UtilitySpec u = UtilitySpec::goal(
        [](const History& h) { return h.observation(h.length()) == 1; });
    History h(Alphabets{1, 2});
    History h0 = h.extended(0, 0);
    REQUIRE(u.eval(h0) == 0.0);
    History h1 = h0.extended(0, 1);
    REQUIRE(u.eval(h1) == 1.0);
    History h2 = h1.extended(0, 1);
    REQUIRE(u.eval(h2) == 0.0);  // already achieved earlier
  }

  SECTION("knowledge is minus the history probability") {
    auto q = bernoulli(0.5, 1);
    UtilitySpec u = UtilitySpec::knowledge(q);
    History h(Alphabets{1, 2});
    h = h.extended(0, 1).extended(0, 0);  // P = 0.25
    REQUIRE(u.eval(h) == Catch::Approx(-0.25));
  }

  SECTION("prediction scores tie-set hits") {
    auto q = bernoulli(0.8, 1);
    UtilitySpec u = UtilitySpec::prediction(q);
    History h(Alphabets{1, 2});
    REQUIRE(u.eval(h.extended(0, 1)) == 1.0);
    REQUIRE(u.eval(h.extended(0, 0)) == 0.0);

    auto fair = bernoulli(0.5, 1);
    UtilitySpec uf = UtilitySpec::prediction(fair);
    REQUIRE(uf.eval(h.extended(0, 0)) == 1.0);  // both observations tie
    REQUIRE(uf.eval(h.extended(0, 1)) == 1.0);
  }
}
