#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "aglab/markov.hpp"

using namespace aglab;

namespace {

// Expected chain from the two-state benchmark table under uniform random
// actions, rows s0 and s1, entry order (next, action, obs).
const double kChainRow0[8] = {0.1, 0.15, 0.15, 0.0, 0.0, 0.25, 0.15, 0.2};
const double kChainRow1[8] = {0.5, 0.0, 0.15, 0.15, 0.0, 0.0, 0.1, 0.1};

std::vector<std::vector<double>> period2_chain() { return {{0.0, 1.0}, {1.0, 0.0}}; }

}  // namespace

TEST_CASE("mdp_to_chain reproduces the published chain") {
  MarkovChain mc = mdp_to_chain(*table_4_1());
  const double* expect[2] = {kChainRow0, kChainRow1};
  for (int s = 0; s < 2; ++s) {
    int k = 0;
    for (int next = 0; next < 2; ++next)
      for (Action a = 0; a < 2; ++a)
        for (Obs o = 0; o < 2; ++o)
          REQUIRE(mc.labeled_prob(s, next, a, o) == Catch::Approx(expect[s][k++]).margin(1e-12));
  }

  SECTION("rows sum to 1") {
    auto m = mc.matrix();
    for (const auto& row : m) {
      double total = 0.0;
      for (double x : row) total += x;
      REQUIRE(std::abs(total - 1.0) <= 1e-9);
    }
  }

  SECTION("single-action model maps to its own rows") {
    auto q = bernoulli(0.8, 1);
    MarkovChain one = mdp_to_chain(*q);
    REQUIRE(one.labeled_prob(0, 0, 0, 1) == Catch::Approx(0.8));
    REQUIRE(one.labeled_prob(0, 0, 0, 0) == Catch::Approx(0.2));
  }
}

TEST_CASE("communicating classes") {
  SECTION("the period-2 chain forms one essential class") {
    auto cp = communicating_classes(period2_chain());
    REQUIRE(cp.classes.size() == 1);
    REQUIRE(cp.classes[0] == std::vector<int>{0, 1});
    REQUIRE(cp.essential[0]);
  }

  SECTION("identity matrix gives singleton essential classes") {
    std::vector<std::vector<double>> eye = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    auto cp = communicating_classes(eye);
    REQUIRE(cp.classes.size() == 3);
    for (bool e : cp.essential) REQUIRE(e);
  }

  SECTION("absorbing state splits essential from inessential") {
    std::vector<std::vector<double>> p = {{0.0, 1.0}, {0.0, 1.0}};
    auto cp = communicating_classes(p);
    REQUIRE(cp.classes.size() == 2);
    REQUIRE_FALSE(cp.essential[cp.class_of_state[0]]);
    REQUIRE(cp.essential[cp.class_of_state[1]]);
  }

  SECTION("classes partition the states and at least one is essential") {
    auto p = mdp_to_chain(*table_4_1()).matrix();
    auto cp = communicating_classes(p);
    std::vector<int> seen(p.size(), 0);
    for (const auto& cls : cp.classes)
      for (int s : cls) seen[s]++;
    for (int c : seen) REQUIRE(c == 1);
    REQUIRE(std::count(cp.essential.begin(), cp.essential.end(), true) >= 1);
  }

  SECTION("class-level reachability is acyclic on random chains") {
    SeedStream s(23);
    for (int trial = 0; trial < 25; ++trial) {
      int n = 2 + static_cast<int>(s.below(5));
      std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
      for (int i = 0; i < n; ++i) {
        // sparse random rows on a quarter grid
        for (int g = 0; g < 4; ++g) p[i][s.below(n)] += 0.25;
      }
      auto cp = communicating_classes(p);
      int m = static_cast<int>(cp.classes.size());
      // class graph must have no cycle: every arc between distinct classes,
      // followed transitively, may never return to its source class
      std::vector<std::vector<int>> adj(m);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (p[i][j] > 0 && cp.class_of_state[i] != cp.class_of_state[j])
            adj[cp.class_of_state[i]].push_back(cp.class_of_state[j]);
      auto reaches = [&](int from, int target) {
        std::vector<char> visited(m, 0);
        std::vector<int> stack{from};
        while (!stack.empty()) {
          int v = stack.back();
          stack.pop_back();
          for (int next : adj[v]) {
            if (next == target) return true;
            if (!visited[next]) {
              visited[next] = 1;
              stack.push_back(next);
            }
          }
        }
        return false;
      };
      for (int c = 0; c < m; ++c) REQUIRE_FALSE(reaches(c, c));
      REQUIRE(std::count(cp.essential.begin(), cp.essential.end(), true) >= 1);
    }
  }
}

TEST_CASE("class period") {
  SECTION("published period-2 example") {
    auto p = period2_chain();
    auto cp = communicating_classes(p);
    REQUIRE(period(p, cp.classes[0]) == 2);
  }

  SECTION("self-loop forces period 1") {
    std::vector<std::vector<double>> p = {{0.5, 0.5}, {1.0, 0.0}};
    auto cp = communicating_classes(p);
    REQUIRE(period(p, cp.classes[cp.class_of_state[0]]) == 1);
  }

  SECTION("deterministic 3-cycle has period 3") {
    std::vector<std::vector<double>> p = {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
    auto cp = communicating_classes(p);
    REQUIRE(cp.classes.size() == 1);
    REQUIRE(period(p, cp.classes[0]) == 3);

    // return-time oracle: gcd of { n <= 12 : P^n(0,0) > 0 }
    std::vector<std::vector<double>> power = p;
    int g = 0;
    for (int n = 1; n <= 12; ++n) {
      if (n > 1) {
        std::vector<std::vector<double>> next(3, std::vector<double>(3, 0.0));
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j) next[i][j] += power[i][k] * p[k][j];
        power = next;
      }
      if (power[0][0] > 0) g = std::gcd(g, n);
    }
    REQUIRE(g == 3);
  }

  SECTION("no return is an error") {
    std::vector<std::vector<double>> p = {{0.0, 1.0}, {0.0, 1.0}};
    REQUIRE_THROWS_MATCHES(period(p, {0}), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::undefined_period;
                           }));
  }
}

TEST_CASE("stationary distribution") {
  SECTION("period-2 chain splits evenly") {
    auto theta = stationary_distribution(period2_chain());
    REQUIRE(theta[0] == Catch::Approx(0.5).margin(1e-9));
    REQUIRE(theta[1] == Catch::Approx(0.5).margin(1e-9));
  }

  SECTION("doubly stochastic is uniform") {
    std::vector<std::vector<double>> p = {{0.2, 0.3, 0.5}, {0.5, 0.2, 0.3}, {0.3, 0.5, 0.2}};
    auto theta = stationary_distribution(p);
    for (double x : theta) REQUIRE(x == Catch::Approx(1.0 / 3).margin(1e-9));
  }

  SECTION("two essential classes are rejected") {
    std::vector<std::vector<double>> p = {{1.0, 0.0}, {0.0, 1.0}};
    REQUIRE_THROWS_MATCHES(stationary_distribution(p), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::non_unique_stationary;
                           }));
  }

  SECTION("fixed point, and agreement with Cesaro power iteration") {
    auto p = mdp_to_chain(*table_4_1()).matrix();
    auto theta = stationary_distribution(p);
    double total = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      double tp = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) tp += theta[i] * p[i][j];
      REQUIRE(std::abs(tp - theta[j]) <= 1e-9);
      total += theta[j];
    }
    REQUIRE(std::abs(total - 1.0) <= 1e-9);

    auto power = stationary_by_power_iteration(p);
    for (std::size_t i = 0; i < p.size(); ++i) REQUIRE(std::abs(power[i] - theta[i]) <= 1e-7);

    auto theta2 = stationary_distribution(period2_chain());
    auto power2 = stationary_by_power_iteration(period2_chain());
    for (int i = 0; i < 2; ++i) REQUIRE(std::abs(power2[i] - theta2[i]) <= 1e-7);
  }

  SECTION("states outside the essential class receive zero") {
    std::vector<std::vector<double>> p = {{0.0, 1.0}, {0.0, 1.0}};
    auto theta = stationary_distribution(p);
    REQUIRE(theta[0] == 0.0);
    REQUIRE(theta[1] == Catch::Approx(1.0));
  }
}

TEST_CASE("subsequence frequency") {
  History h(Alphabets{2, 2});
  h = h.extended(0, 1).extended(0, 1).extended(0, 0);
  History pat = History(Alphabets{2, 2}).extended(0, 1);

  REQUIRE(subsequence_frequency(h, h) == 1.0);
  REQUIRE(subsequence_frequency(h, pat) == 0.0);  // pattern longer than history
  REQUIRE(subsequence_frequency(pat, h) == Catch::Approx(2.0 / 3));

  SECTION("count times window total is an integer") {
    SeedStream s(21);
    for (int trial = 0; trial < 30; ++trial) {
      History big(Alphabets{2, 2});
      for (int t = 0; t < 10; ++t)
        big = big.extended(static_cast<Action>(s.below(2)), static_cast<Obs>(s.below(2)));
      History p2 =
          History(Alphabets{2, 2}).extended(static_cast<Action>(s.below(2)), static_cast<Obs>(s.below(2)));
      double f = subsequence_frequency(p2, big);
      double scaled = f * (big.length() - p2.length() + 1);
      REQUIRE(std::abs(scaled - std::round(scaled)) < 1e-9);
    }
  }
}

TEST_CASE("expected long-run frequency") {
  auto q = table_4_1();

  SECTION("impossible continuation gives zero") {
    // after (a,1) the chain can be in s0 or s1; from s1, (a,1) has zero
    // probability, from s0 it does not: but (a,1)(a,1)(a,1) forces a
    // contradiction only when every path dies; use a pair that is globally
    // impossible instead: action a observing 1 from s1 has probability 0 and
    // the pattern below forces that path
    History pat = History(Alphabets{2, 2}).extended(0, 1).extended(0, 1).extended(0, 1);
    // paths: s0 -(a,1)-> s0 or s1; only s0 -(a,1)-> s0 -(a,1)-> ... survives
    double expect = expected_frequency(*q, pat);
    double direct = 0.0;
    {
      MarkovChain mc = mdp_to_chain(*q);
      auto theta = stationary_distribution(mc.matrix());
      // brute force over labeled paths of length 3
      for (int s0 = 0; s0 < 2; ++s0)
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s2 = 0; s2 < 2; ++s2)
            for (int s3 = 0; s3 < 2; ++s3)
              direct += theta[s0] * mc.labeled_prob(s0, s1, 0, 1) * mc.labeled_prob(s1, s2, 0, 1) *
                        mc.labeled_prob(s2, s3, 0, 1);
    }
    REQUIRE(expect == Catch::Approx(direct).margin(1e-12));

    // a genuinely impossible pattern: observation 0 after action a from any
    // state is possible, but (b,1) then (a,1) then (a,1) requires an (a,1)
    // step out of s1 when the (b,1) step lands there; check zero case via a
    // model with a dead pair
    auto dead = bernoulli(1.0);  // o=0 never happens
    History zero_pat = History(Alphabets{2, 2}).extended(0, 0);
    REQUIRE(expected_frequency(*dead, zero_pat) == 0.0);
  }

  SECTION("one-step pattern equals the stationary-weighted row sum") {
    MarkovChain mc = mdp_to_chain(*q);
    auto theta = stationary_distribution(mc.matrix());
    History pat = History(Alphabets{2, 2}).extended(0, 1);
    double direct = 0.0;
    for (int s = 0; s < 2; ++s)
      for (int next = 0; next < 2; ++next) direct += theta[s] * mc.labeled_prob(s, next, 0, 1);
    REQUIRE(expected_frequency(*q, pat) == Catch::Approx(direct).margin(1e-12));
  }

  SECTION("matches empirical frequency over a long uniform-action rollout") {
    SeedStream s(22);
    const int n = 100000;
    History h = sample_history(*q, n, s);
    // every labeled pattern of length 1 and 2
    for (Action a = 0; a < 2; ++a)
      for (Obs o = 0; o < 2; ++o) {
        History pat = History(Alphabets{2, 2}).extended(a, o);
        REQUIRE(std::abs(subsequence_frequency(pat, h) - expected_frequency(*q, pat)) < 0.01);
        for (Action a2 = 0; a2 < 2; ++a2)
          for (Obs o2 = 0; o2 < 2; ++o2) {
            History pat2 = pat.extended(a2, o2);
            REQUIRE(std::abs(subsequence_frequency(pat2, h) - expected_frequency(*q, pat2)) < 0.01);
          }
      }
  }
}

TEST_CASE("discrimination statistics") {
  auto freq_of_one = [](const History& h) {
    int ones = 0;
    for (int t = 1; t <= h.length(); ++t) ones += h.observation(t) == 1;
    return h.length() ? static_cast<double>(ones) / h.length() : 0.0;
  };

  SECTION("constant function fails the premise") {
    auto r = discrimination_stats(*bernoulli(0.2), *bernoulli(0.8), [](const History&) { return 0.5; }, 64,
                                  200, 31);
    REQUIRE(r.mean_a == Catch::Approx(r.mean_b));
    REQUIRE(r.sd_a == 0.0);
    REQUIRE_FALSE(r.premise_separated);
    REQUIRE_FALSE(r.premise_holds);
  }

  SECTION("distinguishable sources separate, with shrinking deviations") {
    auto r = discrimination_stats(*bernoulli(0.2), *bernoulli(0.8), freq_of_one, 256, 400, 32);
    REQUIRE(std::abs(r.mean_a - 0.2) < 0.02);
    REQUIRE(std::abs(r.mean_b - 0.8) < 0.02);
    // binomial closed form: sd of the frequency is sqrt(p(1-p)/n)
    REQUIRE(r.sd_a == Catch::Approx(std::sqrt(0.2 * 0.8 / 256)).margin(0.01));
    REQUIRE(r.premise_separated);
    REQUIRE(r.premise_shrinking);
    REQUIRE(r.premise_holds);
  }

  SECTION("identical models stay within noise") {
    auto r = discrimination_stats(*bernoulli(0.5), *bernoulli(0.5), freq_of_one, 128, 400, 33);
    REQUIRE(std::abs(r.mean_a - r.mean_b) <= 3.0 * (r.se_a + r.se_b));
    REQUIRE_FALSE(r.premise_separated);
  }
}
