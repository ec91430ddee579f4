#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "aglab/discount.hpp"
#include "aglab/envmodel.hpp"
#include "aglab/errors.hpp"
#include "aglab/history.hpp"
#include "aglab/rng.hpp"
#include "aglab/utility.hpp"

namespace aglab {

// ---------------------------------------------------------------------------
// Policies.
// ---------------------------------------------------------------------------

/// Either a single action or a probability row over actions.
using PolicyChoice = std::variant<Action, std::vector<double>>;

struct Policy {
  std::function<PolicyChoice(const History&)> choose;
  std::string name;

  static Policy constant(Action a, std::string name = "constant") {
    return {[a](const History&) { return PolicyChoice(a); }, std::move(name)};
  }
  static Policy uniform_random(int n_actions) {
    std::vector<double> row(n_actions, 1.0 / n_actions);
    return {[row](const History&) { return PolicyChoice(row); }, "uniform"};
  }
};

// ---------------------------------------------------------------------------
// Model-based utility fast path. When the utility was built over the same
// model the planner is using, its posterior collapse can be fed from the
// planner's threaded belief instead of replaying the history.
// ---------------------------------------------------------------------------

struct BeliefUtility {
  ModelPtr model;
  std::function<double(const History&, const StateBelief& normalized_posterior)> eval;
};

/// Utility source for planning: a plain spec, optionally paired with a
/// belief-aware evaluator for the planning model.
struct PlannerUtility {
  const UtilitySpec* spec = nullptr;
  const BeliefUtility* fast = nullptr;

  double eval(const History& h, const Model& q, const StateBelief& normalized) const {
    if (fast && fast->model.get() == &q) return fast->eval(h, normalized);
    return spec->eval(h);
  }
};

// ---------------------------------------------------------------------------
// Expectimax. Action values carry the discount anchored at the first future
// step: the utility reached after d >= 1 actions is weighted w(t, t+d-1)
// with t = |h|+1, which for the geometric kind is gamma^(d-1). The root
// value form adds the present utility u(h) and, for the geometric kind,
// multiplies the action value by gamma, reproducing the classic recursion
// v(h) = u(h) + gamma * max_a v(ha).
// ---------------------------------------------------------------------------

namespace detail {

struct ExpectimaxRun {
  const Model& q;
  const PlannerUtility& u;
  const DiscountSpec& d;
  int t_ref;  // |h_root| + 1
  int horizon;

  // value after taking `a` from (h, normalized belief), with `taken` actions
  // already on the path including `a`
  double action_value(const History& h, const StateBelief& belief, Action a, int taken) const {
    std::vector<double> w = observation_weights(q, belief, a);
    double total = 0.0;
    for (double x : w) total += x;
    require(total > 0.0, Errc::impossible_history, "no continuation observation is possible");
    double value = 0.0;
    for (Obs o = 0; o < static_cast<int>(w.size()); ++o) {
      if (w[o] == 0.0) continue;
      double rho = w[o] / total;
      StateBelief next = forward_step(q, belief, a, o);
      double norm = belief_mass(next);
      for (double& x : next) x /= norm;
      History hao = h.extended(a, o);
      double node = discount_weight(d, t_ref, t_ref + taken - 1) * u.eval(hao, q, next);
      if (taken < horizon) {
        double best = 0.0;
        bool first = true;
        for (Action a2 = 0; a2 < q.dynamics().n_actions; ++a2) {
          double v = action_value(hao, next, a2, taken + 1);
          if (first || v > best) {
            best = v;
            first = false;
          }
        }
        node += best;
      }
      value += rho * node;
    }
    return value;
  }
};

inline StateBelief normalized_root_belief(const Model& q, const History& h) {
  StateBelief b = forward_belief(q, h);
  double mass = belief_mass(b);
  require(mass > 0.0, Errc::impossible_history, "planning from a history the model cannot produce");
  for (double& x : b) x /= mass;
  return b;
}

}  // namespace detail

/// v(ha) for every action a from an explicitly supplied normalized root
/// posterior; lets long-running experiments thread their beliefs instead of
/// replaying the history each step. The history argument only needs enough
/// of a suffix to satisfy the utility's own lookback.
inline std::vector<double> action_values_from_belief(const Model& q, const PlannerUtility& u,
                                                     const DiscountSpec& d, const History& h,
                                                     const StateBelief& normalized_root, int horizon) {
  require(horizon >= 1, Errc::parameter, "action values need horizon >= 1");
  detail::ExpectimaxRun run{q, u, d, h.length() + 1, horizon};
  std::vector<double> out;
  out.reserve(q.dynamics().n_actions);
  for (Action a = 0; a < q.dynamics().n_actions; ++a) out.push_back(run.action_value(h, normalized_root, a, 1));
  return out;
}

/// v(ha) for every action a, truncated after `horizon` actions.
inline std::vector<double> action_values(const Model& q, const PlannerUtility& u, const DiscountSpec& d,
                                         const History& h, int horizon) {
  StateBelief b = detail::normalized_root_belief(q, h);
  return action_values_from_belief(q, u, d, h, b, horizon);
}

inline std::vector<double> action_values(const Model& q, const UtilitySpec& u, const DiscountSpec& d,
                                         const History& h, int horizon) {
  PlannerUtility pu{&u, nullptr};
  return action_values(q, pu, d, h, horizon);
}

/// Root value v(h): present utility plus the best discounted continuation.
inline double expectimax_value(const Model& q, const PlannerUtility& u, const DiscountSpec& d, const History& h,
                               int horizon) {
  StateBelief b = detail::normalized_root_belief(q, h);
  double present = u.eval(h, q, b);
  if (horizon == 0) return present;
  std::vector<double> vals = action_values(q, u, d, h, horizon);
  double best = vals[0];
  for (double v : vals) best = std::max(best, v);
  double scale = d.kind == DiscountSpec::Kind::geometric ? d.gamma : 1.0;
  return present + scale * best;
}

inline double expectimax_value(const Model& q, const UtilitySpec& u, const DiscountSpec& d, const History& h,
                               int horizon) {
  PlannerUtility pu{&u, nullptr};
  return expectimax_value(q, pu, d, h, horizon);
}

/// argmax_a v(ha); ties resolve to the lowest action index.
inline Action best_action(const Model& q, const PlannerUtility& u, const DiscountSpec& d, const History& h,
                          int horizon) {
  std::vector<double> vals = action_values(q, u, d, h, horizon);
  Action best = 0;
  for (Action a = 1; a < static_cast<int>(vals.size()); ++a)
    if (vals[a] > vals[best]) best = a;
  return best;
}

inline Action best_action(const Model& q, const UtilitySpec& u, const DiscountSpec& d, const History& h,
                          int horizon) {
  PlannerUtility pu{&u, nullptr};
  return best_action(q, pu, d, h, horizon);
}

// ---------------------------------------------------------------------------
// Rollouts.
// ---------------------------------------------------------------------------

struct RolloutResult {
  History history;
  StateHistory trace;  // the execution trace, itself a sample of z given h
};

/// Alternate policy action and model sampling for `steps` steps. Per step
/// the draw order is: one uniform variate for a stochastic policy row (none
/// for deterministic policies), then one for the environment transition.
inline RolloutResult rollout(const Model& q, const Policy& policy, int steps, std::uint64_t seed) {
  require(steps >= 0, Errc::parameter, "steps must be nonnegative");
  SeedStream stream(seed);
  RolloutResult out;
  out.history = History(q.alphabets());
  out.trace.states = {q.dynamics().start};
  out.trace.path_probability = 1.0;
  int state = q.dynamics().start;
  for (int t = 0; t < steps; ++t) {
    PolicyChoice choice = policy.choose(out.history);
    Action a;
    if (std::holds_alternative<Action>(choice)) {
      a = std::get<Action>(choice);
    } else {
      const auto& row = std::get<std::vector<double>>(choice);
      double total = 0.0;
      for (double p : row) total += p;
      require(std::abs(total - 1.0) <= 1e-9, Errc::normalization, "policy row must sum to 1");
      a = stream.sample_row(row);
    }
    auto [next, obs] = simulate_step(q, state, a, stream);
    out.trace.path_probability *= q.dynamics().prob(state, a, next, obs);
    out.history = out.history.extended(a, obs);
    out.trace.states.push_back(next);
    state = next;
  }
  return out;
}

/// Monte Carlo policy value: mean over rollouts of sum_i gamma^i r_{i+1},
/// with rewards decoded from observations; returns (mean, standard error).
struct PolicyValueEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

inline PolicyValueEstimate policy_value_mc(const Model& q, const Policy& policy, const RewardCodec& codec,
                                           double gamma, int steps, int rollouts, std::uint64_t seed) {
  require(rollouts >= 1, Errc::parameter, "need at least one rollout");
  std::vector<double> totals(rollouts);
  for (int r = 0; r < rollouts; ++r) {
    RolloutResult run = rollout(q, policy, steps, seed + static_cast<std::uint64_t>(r));
    double total = 0.0, g = 1.0;
    for (int t = 1; t <= run.history.length(); ++t) {
      total += g * codec.reward_of(run.history.observation(t), q.dynamics().n_obs);
      g *= gamma;
    }
    totals[r] = total;
  }
  PolicyValueEstimate est;
  for (double v : totals) est.mean += v;
  est.mean /= rollouts;
  double ss = 0.0;
  for (double v : totals) ss += (v - est.mean) * (v - est.mean);
  est.standard_error = rollouts > 1 ? std::sqrt(ss / (rollouts - 1.0) / rollouts) : 0.0;
  return est;
}

// ---------------------------------------------------------------------------
// Self-modifying policy selection.
// ---------------------------------------------------------------------------

/// pi(h) = (action, successor policy index).
struct SelfModPolicy {
  std::function<std::pair<Action, int>(const History&)> choose;
  std::string name;
};

struct SelfModPolicySet {
  std::vector<SelfModPolicy> policies;
  int current = 0;

  void validate() const {
    require(!policies.empty(), Errc::parameter, "empty policy set");
    require(current >= 0 && current < static_cast<int>(policies.size()), Errc::index,
            "current policy index out of range");
  }
};

namespace detail {

struct SelfModRun {
  const Model& q;
  const UtilitySpec& u;
  double gamma;
  const SelfModPolicySet* set;

  // v(pi, h') with `remaining` further actions allowed
  double node_value(int pi, const History& h, const StateBelief& belief, int remaining) const {
    double value = u.eval(h);
    if (remaining <= 0) return value;
    auto [a, succ] = set->policies[pi].choose(h);
    require(succ >= 0 && succ < static_cast<int>(set->policies.size()), Errc::index,
            "successor policy index out of range");
    return value + gamma * branch_value(succ, h, belief, a, remaining);
  }

  // v(pi, h'a) = sum_o rho(o | h'a) v(pi, h'ao)
  double branch_value(int pi, const History& h, const StateBelief& belief, Action a, int remaining) const {
    std::vector<double> w = observation_weights(q, belief, a);
    double total = 0.0;
    for (double x : w) total += x;
    require(total > 0.0, Errc::impossible_history, "no continuation observation is possible");
    double value = 0.0;
    for (Obs o = 0; o < static_cast<int>(w.size()); ++o) {
      if (w[o] == 0.0) continue;
      StateBelief next = forward_step(q, belief, a, o);
      double norm = belief_mass(next);
      for (double& x : next) x /= norm;
      value += (w[o] / total) * node_value(pi, h.extended(a, o), next, remaining - 1);
    }
    return value;
  }
};

}  // namespace detail

/// Value of committing to action a and continuing with policy pi, evaluated
/// to `horizon` total actions.
inline double self_mod_value(const SelfModPolicySet& set, int pi, const Model& q, const UtilitySpec& u,
                             double gamma, const History& h, Action a, int horizon) {
  set.validate();
  require(horizon >= 1, Errc::parameter, "horizon must cover the committed action");
  StateBelief b = detail::normalized_root_belief(q, h);
  detail::SelfModRun run{q, u, gamma, &set};
  // the committed action consumes one of the `horizon` steps inside
  // branch_value
  return run.branch_value(pi, h, b, a, horizon);
}

/// argmax over (action, policy) pairs; if any maximizer keeps the current
/// policy it is retained (modification needs a strict improvement), and
/// remaining ties resolve to the lowest action then policy index.
inline std::pair<Action, int> self_mod_select(const SelfModPolicySet& set, const Model& q, const UtilitySpec& u,
                                              double gamma, const History& h, int horizon) {
  set.validate();
  double best = 0.0;
  bool first = true;
  std::vector<std::pair<Action, int>> argmax;
  for (Action a = 0; a < q.dynamics().n_actions; ++a)
    for (int pi = 0; pi < static_cast<int>(set.policies.size()); ++pi) {
      double v = self_mod_value(set, pi, q, u, gamma, h, a, horizon);
      if (first || v > best) {
        best = v;
        argmax.clear();
        first = false;
      }
      if (v == best) argmax.emplace_back(a, pi);
    }
  for (const auto& [a, pi] : argmax)
    if (pi == set.current) return {a, pi};
  return argmax.front();
}

/// The optimal self-modifying policy for a fixed decision horizon: at any
/// history it plays the expectimax action for the depth remaining below the
/// root and names itself as successor.
inline SelfModPolicy optimal_self_mod_policy(ModelPtr q, const UtilitySpec* u, double gamma, int root_length,
                                             int horizon, int self_index) {
  auto choose = [q = std::move(q), u, gamma, root_length, horizon, self_index](const History& h) {
    int used = h.length() - root_length;
    int remaining = std::max(1, horizon - used);
    Action a = best_action(*q, *u, DiscountSpec::geometric(gamma), h, remaining);
    return std::pair<Action, int>(a, self_index);
  };
  return {choose, "optimal"};
}

// ---------------------------------------------------------------------------
// Discretization grid.
// ---------------------------------------------------------------------------

/// Finite ordered set of admissible value levels in [0,1].
struct ValueGrid {
  std::vector<double> levels;

  static ValueGrid uniform(int denominator = 1024) {
    ValueGrid g;
    g.levels.reserve(denominator + 1);
    for (int k = 0; k <= denominator; ++k) g.levels.push_back(static_cast<double>(k) / denominator);
    return g;
  }

  static ValueGrid of(std::vector<double> levels) {
    ValueGrid g;
    g.levels = std::move(levels);
    g.validate();
    return g;
  }

  void validate() const {
    require(!levels.empty(), Errc::parameter, "empty value grid");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      require(levels[i] >= 0.0 && levels[i] <= 1.0, Errc::parameter, "grid levels lie in [0,1]");
      if (i) require(levels[i] > levels[i - 1], Errc::parameter, "grid levels must be ascending");
    }
  }

  /// Nearest level, clamped to [0,1]; exact midpoints take the lower level.
  double discrete(double x) const {
    double clamped = std::clamp(x, 0.0, 1.0);
    double best = levels[0];
    double best_gap = std::abs(clamped - best);
    for (double v : levels) {
      double gap = std::abs(clamped - v);
      if (gap < best_gap) {
        best = v;
        best_gap = gap;
      }
    }
    return best;
  }
};

// ---------------------------------------------------------------------------
// Past and observed values.
// ---------------------------------------------------------------------------

/// u3(h_m, h_x, h') in [0,1] over three plain histories.
using ThreeArgUtility = std::function<double(const History&, const History&, const History&)>;

/// Discounted average of u3 over the tail j = i..t of the flagged history,
/// holding the first two arguments at prefixes l and k, scaled from the
/// finite sum to the infinite-sum normalization and discretized:
///   pv_t(i,l,k) = discrete( (1-g) * sum_j g^(j-i) u3(y(h_l), y(h_k), y(h_j))
///                           / (1 - g^(t-i+1)) ).
inline double past_values(const FlaggedHistory& h, const ThreeArgUtility& u3, double gamma, int i, int l, int k,
                          int m, const ValueGrid& grid) {
  int t = h.length();
  require(gamma > 0.0 && gamma < 1.0, Errc::parameter, "past values use a geometric discount in (0,1)");
  require(m < i && i <= t, Errc::index, "need m < i <= t");
  require(m <= l && l < i, Errc::index, "need m <= l < i");
  require(l <= k && k <= t, Errc::index, "need l <= k <= t");
  History hl = h.prefix(l).y();
  History hk = h.prefix(k).y();
  double sum = 0.0, g = 1.0;
  for (int j = i; j <= t; ++j) {
    sum += g * u3(hl, hk, h.prefix(j).y());
    g *= gamma;
  }
  double scaled = sum * (1.0 - gamma) / (1.0 - std::pow(gamma, t - i + 1));
  return grid.discrete(scaled);
}

enum class ValueCondition { no_uplift_anywhere = 1, no_mean_uplift = 2, no_trend_uplift = 3 };
enum class ObservedValueMode { per_step, all_steps };

/// ov_t(i) for i = 1..t: the own-evaluation past value pv_t(i, i-1, i-1)
/// where the chosen condition on the uplift differences
/// delta_t(i-1, n) = pv_t(i, i-1, n) - pv_t(i, i-1, i-1) admits step i, else
/// 0. per_step checks each i separately; all_steps applies the quantified
/// variant, zeroing every step unless all steps pass.
inline std::vector<double> observed_values(const FlaggedHistory& h, const ThreeArgUtility& u3, double gamma,
                                           int m, ValueCondition condition, ObservedValueMode mode,
                                           const ValueGrid& grid) {
  int t = h.length();
  std::vector<double> pv(t + 1, 0.0);
  std::vector<bool> pass(t + 1, false);
  for (int i = m + 1; i <= t; ++i) {
    pv[i] = past_values(h, u3, gamma, i, i - 1, i - 1, m, grid);
    double sum_delta = 0.0, trend = 0.0;
    bool all_nonpositive = true;
    for (int n = i; n <= t; ++n) {
      double delta = past_values(h, u3, gamma, i, i - 1, n, m, grid) - pv[i];
      all_nonpositive = all_nonpositive && delta <= 0.0;
      sum_delta += delta;
      trend += (n - i + 1) * delta;
    }
    switch (condition) {
      case ValueCondition::no_uplift_anywhere:
        pass[i] = all_nonpositive;
        break;
      case ValueCondition::no_mean_uplift:
        pass[i] = sum_delta <= 0.0;
        break;
      case ValueCondition::no_trend_uplift:
        pass[i] = trend <= 0.0;
        break;
    }
  }
  bool all_pass = true;
  for (int i = m + 1; i <= t; ++i) all_pass = all_pass && pass[i];
  std::vector<double> ov(t);
  for (int i = 1; i <= t; ++i) {
    bool admitted = i > m && (mode == ObservedValueMode::per_step ? pass[i] : all_pass);
    ov[i - 1] = admitted ? pv[i] : 0.0;
  }
  return ov;
}

// ---------------------------------------------------------------------------
// Stochastic-action distribution.
// ---------------------------------------------------------------------------

/// Per internal-state-history value model: for each action a row of
/// probabilities over the grid levels.
struct SigmaInput {
  ValueGrid grid;
  struct Branch {
    double weight;                          // p(z), unnormalized
    std::vector<std::vector<double>> rows;  // rows[action][level]
  };
  std::vector<Branch> branches;
};

/// Probability row over actions for the stochastic action: per state branch,
/// draw one value level per action from its value-weighted row and hand the
/// win to the argmax (ties share credit equally); mix branches by weight.
inline std::vector<double> stochastic_action_sigma(const SigmaInput& in) {
  in.grid.validate();
  require(!in.branches.empty(), Errc::empty_input, "sigma needs at least one state branch");
  int n_levels = static_cast<int>(in.grid.levels.size());
  int n_actions = static_cast<int>(in.branches.front().rows.size());
  require(n_actions >= 1, Errc::parameter, "sigma needs at least one action");

  double total_f = std::pow(static_cast<double>(n_levels), n_actions);
  require(total_f <= 8e6, Errc::resource_cap, "value-function space too large to enumerate");

  double weight_total = 0.0;
  std::vector<double> sigma(n_actions, 0.0);
  for (const auto& branch : in.branches) {
    require(static_cast<int>(branch.rows.size()) == n_actions, Errc::parameter, "ragged sigma input");
    require(branch.weight >= 0.0, Errc::parameter, "negative branch weight");

    // weighted level probabilities p(r, a, z)
    std::vector<std::vector<double>> p(n_actions, std::vector<double>(n_levels, 0.0));
    for (int a = 0; a < n_actions; ++a) {
      require(static_cast<int>(branch.rows[a].size()) == n_levels, Errc::parameter, "ragged sigma row");
      double row_sum = 0.0, v = 0.0;
      for (int r = 0; r < n_levels; ++r) {
        row_sum += branch.rows[a][r];
        v += branch.rows[a][r] * in.grid.levels[r];
      }
      require(std::abs(row_sum - 1.0) <= 1e-9, Errc::normalization, "sigma value row must sum to 1");
      require(v > 0.0, Errc::degenerate_value, "action value distribution has zero expected value");
      for (int r = 0; r < n_levels; ++r) p[a][r] = branch.rows[a][r] * in.grid.levels[r] / v;
    }

    // exhaustive sum over value functions f : actions -> levels
    std::vector<double> branch_sigma(n_actions, 0.0);
    std::vector<int> f(n_actions, 0);
    while (true) {
      double prob = 1.0;
      for (int a = 0; a < n_actions; ++a) prob *= p[a][f[a]];
      if (prob > 0.0) {
        double best = in.grid.levels[f[0]];
        for (int a = 1; a < n_actions; ++a) best = std::max(best, in.grid.levels[f[a]]);
        int ties = 0;
        for (int a = 0; a < n_actions; ++a) ties += in.grid.levels[f[a]] == best;
        for (int a = 0; a < n_actions; ++a)
          if (in.grid.levels[f[a]] == best) branch_sigma[a] += prob / ties;
      }
      int pos = n_actions - 1;
      while (pos >= 0 && ++f[pos] == n_levels) f[pos--] = 0;
      if (pos < 0) break;
    }

    weight_total += branch.weight;
    for (int a = 0; a < n_actions; ++a) sigma[a] += branch.weight * branch_sigma[a];
  }
  require(weight_total > 0.0, Errc::degenerate_value, "state branch weights sum to zero");
  for (double& x : sigma) x /= weight_total;
  return sigma;
}

}  // namespace aglab
