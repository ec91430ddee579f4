#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "aglab/arena.hpp"
#include "aglab/envmodel.hpp"
#include "aglab/learner.hpp"
#include "aglab/markov.hpp"
#include "aglab/planner.hpp"

namespace aglab::experiments {

// ---------------------------------------------------------------------------
// Decision-table scenario.
// ---------------------------------------------------------------------------

inline const double kOutcomeValue[9] = {0.0, 0.4, 0.8, 0.1, 0.5, 0.9, 0.2, 0.6, 1.0};
inline const double kShootProb[9] = {0.0, 0.0, 0.7, 0.01, 0.01, 0.18, 0.07, 0.02, 0.01};
inline const double kHoldProb[9] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.7, 0.2, 0.1};

inline std::shared_ptr<const TransitionTable> hitman_model() {
  Dynamics d;
  d.n_states = 1;
  d.n_actions = 2;
  d.n_obs = 9;
  d.start = 0;
  d.rows.resize(2);
  for (int o = 0; o < 9; ++o) {
    if (kShootProb[o] > 0) d.rows[0].push_back({0, o, kShootProb[o]});
    if (kHoldProb[o] > 0) d.rows[1].push_back({0, o, kHoldProb[o]});
  }
  return std::make_shared<TransitionTable>(std::move(d));
}

inline UtilitySpec hitman_utility() {
  return UtilitySpec::external(
      [](const History& h) { return h.empty() ? 0.0 : kOutcomeValue[h.observation(h.length())]; });
}

struct HitmanResult {
  double shoot_value = 0.0;
  double hold_value = 0.0;
  Action decision = 0;
};

inline HitmanResult run_hitman() {
  auto q = hitman_model();
  UtilitySpec u = hitman_utility();
  auto vals = action_values(*q, u, DiscountSpec::geometric(0.5), History(q->alphabets()), 1);
  return {vals[0], vals[1], vals[0] >= vals[1] ? 0 : 1};
}

// ---------------------------------------------------------------------------
// Worked history probabilities.
// ---------------------------------------------------------------------------

inline History worked_history_41() {
  History h(Alphabets{2, 2});
  return h.extended(0, 1).extended(0, 0).extended(1, 1);
}

// ---------------------------------------------------------------------------
// Delusion-box rollouts: the planner drives every decision over a long run,
// threading its posterior instead of replaying the history. The reported
// utility is the model-based utility of each realized step.
// ---------------------------------------------------------------------------

struct DelusionRun {
  double mean_utility = 0.0;
  long long rewrite_decisions = 0;  // steps where the chosen action set b
  std::vector<double> utility_series;
};

namespace detail {

inline History keep_suffix(const History& h, int window) {
  if (h.length() <= window) return h;
  History out(h.alphabets());
  for (int t = h.length() - window + 1; t <= h.length(); ++t) out = out.extended(h.action(t), h.observation(t));
  return out;
}

inline DelusionRun run_delusion(const std::shared_ptr<const BooleanNetwork>& env, const ModelBasedUtility& util,
                                int steps, std::uint64_t seed, bool force_rewrite, int rewrite_slot,
                                int horizon, bool keep_series) {
  SeedStream stream(seed);
  PlannerUtility pu = util.planner_utility();
  DiscountSpec d = DiscountSpec::geometric(0.9);
  const int window = 4;  // plenty for the one-step-lookback kernels
  History suffix(env->alphabets());
  StateBelief belief(env->dynamics().n_states, 0.0);
  belief[env->dynamics().start] = 1.0;
  int state = env->dynamics().start;
  int n_actions = env->dynamics().n_actions;
  int b_mask = 1 << (env->action_var_count() - 1 - rewrite_slot);

  DelusionRun out;
  if (keep_series) out.utility_series.reserve(steps);
  double total = 0.0;
  for (int t = 0; t < steps; ++t) {
    auto vals = action_values_from_belief(*env, pu, d, suffix, belief, horizon);
    Action chosen = -1;
    for (Action a = 0; a < n_actions; ++a) {
      if (force_rewrite && !(a & b_mask)) continue;
      if (chosen < 0 || vals[a] > vals[chosen]) chosen = a;
    }
    if (chosen & b_mask) ++out.rewrite_decisions;

    auto [next, obs] = simulate_step(*env, state, chosen, stream);
    state = next;
    suffix = keep_suffix(suffix.extended(chosen, obs), window);
    belief = forward_step(*env, belief, chosen, obs);
    double mass = belief_mass(belief);
    for (double& x : belief) x /= mass;

    double u = util.fast.eval(suffix, belief);
    total += u;
    if (keep_series) out.utility_series.push_back(u);
  }
  out.mean_utility = total / steps;
  return out;
}

}  // namespace detail

inline DelusionRun run_delusion_63(double alpha, int steps, std::uint64_t seed, bool force_rewrite,
                                   bool keep_series = false) {
  auto env = delusion_env_6_3(alpha);
  auto util = delusion_utility_6_3(env);
  return detail::run_delusion(env, util, steps, seed, force_rewrite, /*rewrite_slot=*/1, /*horizon=*/2,
                              keep_series);
}

inline DelusionRun run_delusion_64(int steps, std::uint64_t seed, bool force_rewrite, bool keep_series = false) {
  auto env = delusion_env_6_4();
  auto util = delusion_utility_6_4(env);
  return detail::run_delusion(env, util, steps, seed, force_rewrite, /*rewrite_slot=*/1, /*horizon=*/2,
                              keep_series);
}

// ---------------------------------------------------------------------------
// MAP benchmark around the two-state table. The history length 3200 froze
// out of an upward sweep of the success rate (46/50 there, rising beyond).
// ---------------------------------------------------------------------------

inline constexpr int kLearnBenchmarkLength = 3200;

inline std::vector<ModelPtr> table41_benchmark_space() {
  std::vector<ModelPtr> space;
  space.push_back(table_4_1());
  space.push_back(bernoulli(0.8, 2));
  space.push_back(bernoulli(0.5, 2));
  space.push_back(bernoulli(0.2, 2));
  {
    Dynamics d = table_4_1()->dynamics();
    std::swap(d.rows[0], d.rows[1]);
    std::swap(d.rows[2], d.rows[3]);
    space.push_back(std::make_shared<TransitionTable>(std::move(d)));
  }
  auto perturb = [](int row_index, std::vector<double> probs) {
    Dynamics d = table_4_1()->dynamics();
    d.rows[row_index].clear();
    int k = 0;
    for (int next = 0; next < 2; ++next)
      for (int o = 0; o < 2; ++o) {
        double p = probs[k++];
        if (p > 0) d.rows[row_index].push_back({next, o, p});
      }
    return std::make_shared<TransitionTable>(std::move(d));
  };
  space.push_back(perturb(0, {0.3, 0.2, 0.0, 0.5}));
  space.push_back(perturb(0, {0.2, 0.3, 0.5, 0.0}));
  space.push_back(perturb(3, {0.25, 0.25, 0.25, 0.25}));
  space.push_back(perturb(1, {0.0, 0.3, 0.3, 0.4}));
  return space;
}

struct SeededBenchmark {
  int successes = 0;
  int seeds = 0;
  int history_length = 0;
};

/// Success: the selected model reproduces the truth's history probabilities
/// within 1e-6 on every length-4 history.
inline SeededBenchmark run_learn_benchmark(int history_length = kLearnBenchmarkLength, int seeds = 50) {
  auto space = table41_benchmark_space();
  auto truth = table_4_1();
  SeededBenchmark out;
  out.history_length = history_length;
  out.seeds = seeds;
  for (int seed = 1; seed <= seeds; ++seed) {
    SeedStream s(static_cast<std::uint64_t>(seed));
    History h = sample_history(*truth, history_length, s);
    auto result = learn_map_model(h, CandidateSpace::explicit_list(space));
    bool ok = true;
    History root(Alphabets{2, 2});
    std::function<void(History&, int)> walk = [&](History& hh, int depth) {
      if (!ok) return;
      if (depth == 4) {
        ok = std::abs(history_probability(*result.model, hh) - history_probability(*truth, hh)) <= 1e-6;
        return;
      }
      for (Action a = 0; a < 2 && ok; ++a)
        for (Obs o = 0; o < 2 && ok; ++o) {
          History next = hh.extended(a, o);
          walk(next, depth + 1);
        }
    };
    walk(root, 0);
    out.successes += ok;
  }
  return out;
}

/// Structural recovery of the hidden-cycle rules from observation histories
/// (rewrite gate closed); success needs the published structure and an
/// alpha estimate within 0.01 of the truth.
inline SeededBenchmark run_recovery_benchmark(int history_length, int seeds) {
  SeededBenchmark out;
  out.history_length = history_length;
  out.seeds = seeds;
  for (int seed = 1; seed <= seeds; ++seed) {
    SeedStream s(static_cast<std::uint64_t>(1000 + seed));
    auto env = delusion_env_6_3(0.99);
    History h(env->alphabets());
    int state = env->dynamics().start;
    for (int t = 0; t < history_length; ++t) {
      auto [next, obs] = simulate_step(*env, state, 0, s);
      h = h.extended(0, obs);
      state = next;
    }
    auto recovery = recover_delusion_structure(h);
    out.successes += recovery.structure_recovered && std::abs(recovery.alpha_hat - 0.99) <= 0.01;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Retention benchmark: enumerate self-modifying policy sets containing the
// optimal policy over small models and check it is always retained.
// ---------------------------------------------------------------------------

struct SelfModBenchmark {
  int cases = 0;
  int retained = 0;
};

inline SelfModBenchmark run_selfmod_benchmark() {
  SelfModBenchmark out;
  std::mt19937 gen(97);
  std::uniform_int_distribution<int> level(0, 16);
  std::uniform_int_distribution<int> cell(0, 3);

  auto random_model = [&]() {
    Dynamics d;
    d.n_states = 2;
    d.n_actions = 2;
    d.n_obs = 2;
    d.start = 0;
    d.rows.resize(4);
    for (auto& row : d.rows) {
      std::vector<int> grains(4, 0);
      for (int g = 0; g < 8; ++g) grains[cell(gen)]++;
      for (int next = 0; next < 2; ++next)
        for (int o = 0; o < 2; ++o)
          if (grains[next * 2 + o] > 0) row.push_back({next, o, grains[next * 2 + o] / 8.0});
    }
    return std::make_shared<TransitionTable>(std::move(d));
  };

  // base pool of deterministic alternatives; successor patterns cycle
  // within the pool or defect back toward lower indices
  std::vector<std::function<Action(const History&)>> base = {
      [](const History&) { return 0; },
      [](const History&) { return 1; },
      [](const History& h) { return h.length() % 2; },
      [](const History& h) { return h.empty() ? 0 : h.observation(h.length()); },
  };

  for (int model_trial = 0; model_trial < 6; ++model_trial) {
    auto q = random_model();
    std::vector<double> table(8);
    for (auto& v : table) v = level(gen) / 16.0;
    auto u = std::make_shared<UtilitySpec>(UtilitySpec::external([table](const History& h) {
      if (h.empty()) return 0.0;
      return table[(h.length() % 2) * 4 + h.action(h.length()) * 2 + h.observation(h.length())];
    }));
    for (int horizon = 1; horizon <= 3; ++horizon) {
      for (int subset = 1; subset < 16; ++subset) {
        for (int successor_mode = 0; successor_mode < 2; ++successor_mode) {
          SelfModPolicySet set;
          set.policies.push_back(optimal_self_mod_policy(q, u.get(), 0.5, 0, horizon, 0));
          std::vector<int> chosen;
          for (int b = 0; b < 4; ++b)
            if (subset & (1 << b)) chosen.push_back(b);
          for (std::size_t i = 0; i < chosen.size(); ++i) {
            int succ = successor_mode == 0 ? static_cast<int>(i + 1)
                                           : static_cast<int>(1 + (i + 1) % chosen.size());
            auto fn = base[chosen[i]];
            set.policies.push_back(
                {[fn, succ](const History& h) { return std::pair<Action, int>(fn(h), succ); }, "alt"});
          }
          set.current = 0;
          auto [a, pi] = self_mod_select(set, *q, *u, 0.5, History(q->alphabets()), horizon);
          ++out.cases;
          out.retained += pi == 0;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sigma random-instance benchmark with an independent enumeration oracle.
// ---------------------------------------------------------------------------

struct SigmaBenchmark {
  int instances = 0;
  double max_sum_error = 0.0;
  double max_oracle_gap = 0.0;
};

namespace detail {

/// Independent route: recursive enumeration over value functions.
inline std::vector<double> sigma_oracle(const SigmaInput& in) {
  int n_actions = static_cast<int>(in.branches.front().rows.size());
  int n_levels = static_cast<int>(in.grid.levels.size());
  std::vector<double> sigma(n_actions, 0.0);
  double wtotal = 0.0;
  for (const auto& branch : in.branches) {
    std::vector<std::vector<double>> p(n_actions, std::vector<double>(n_levels));
    for (int a = 0; a < n_actions; ++a) {
      double v = 0.0;
      for (int r = 0; r < n_levels; ++r) v += branch.rows[a][r] * in.grid.levels[r];
      for (int r = 0; r < n_levels; ++r) p[a][r] = branch.rows[a][r] * in.grid.levels[r] / v;
    }
    std::vector<double> acc(n_actions, 0.0);
    std::vector<int> f(n_actions);
    std::function<void(int, double)> rec = [&](int a, double prob) {
      if (prob == 0.0) return;
      if (a == n_actions) {
        double best = -1.0;
        for (int i = 0; i < n_actions; ++i) best = std::max(best, in.grid.levels[f[i]]);
        std::vector<int> ties;
        for (int i = 0; i < n_actions; ++i)
          if (in.grid.levels[f[i]] == best) ties.push_back(i);
        for (int i : ties) acc[i] += prob / ties.size();
        return;
      }
      for (int r = 0; r < n_levels; ++r) {
        f[a] = r;
        rec(a + 1, prob * p[a][r]);
      }
    };
    rec(0, 1.0);
    wtotal += branch.weight;
    for (int a = 0; a < n_actions; ++a) sigma[a] += branch.weight * acc[a];
  }
  for (double& x : sigma) x /= wtotal;
  return sigma;
}

}  // namespace detail

inline SigmaBenchmark run_sigma_benchmark(int instances, std::uint64_t seed) {
  SigmaBenchmark out;
  out.instances = instances;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.01, 1.0);
  for (int trial = 0; trial < instances; ++trial) {
    int n_actions = 1 + trial % 3;
    int n_levels = 2 + trial % 3;
    SigmaInput in;
    std::vector<double> levels;
    for (int r = 0; r < n_levels; ++r) levels.push_back((r + 1.0) / n_levels);
    in.grid = ValueGrid::of(levels);
    int n_branches = 1 + trial % 3;
    for (int z = 0; z < n_branches; ++z) {
      SigmaInput::Branch b;
      b.weight = unit(gen);
      for (int a = 0; a < n_actions; ++a) {
        std::vector<double> row(n_levels);
        double total = 0.0;
        for (double& x : row) total += (x = unit(gen));
        for (double& x : row) x /= total;
        b.rows.push_back(row);
      }
      in.branches.push_back(std::move(b));
    }
    auto sigma = stochastic_action_sigma(in);
    auto oracle = detail::sigma_oracle(in);
    double total = 0.0;
    for (double x : sigma) total += x;
    out.max_sum_error = std::max(out.max_sum_error, std::abs(total - 1.0));
    for (int a = 0; a < n_actions; ++a)
      out.max_oracle_gap = std::max(out.max_oracle_gap, std::abs(sigma[a] - oracle[a]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Arena sweep.
// ---------------------------------------------------------------------------

struct ArenaSweepRow {
  std::uint64_t seed = 0;
  int final_predictor_size = 0;
  int final_evader_size = 0;
  long long predictor_wins = 0;
  long long evader_wins = 0;
  arena::ArenaOutcome outcome = arena::ArenaOutcome::contested;
};

inline std::vector<ArenaSweepRow> run_arena_sweep(const arena::ArenaConfig& config,
                                                  arena::ArenaAlgorithm algorithm, long long n_games,
                                                  int n_seeds, std::uint64_t base_seed,
                                                  double monopoly_fraction = 0.95) {
  std::vector<ArenaSweepRow> rows;
  rows.reserve(n_seeds);
  for (int i = 0; i < n_seeds; ++i) {
    std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    auto traj = arena::play_games(config, algorithm, n_games, seed);
    rows.push_back({seed, traj.final_predictor_size, traj.final_evader_size, traj.predictor_wins,
                    traj.evader_wins, arena::instability_metric(traj, monopoly_fraction)});
  }
  return rows;
}

}  // namespace aglab::experiments
