#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aglab/envmodel.hpp"
#include "aglab/errors.hpp"
#include "aglab/history.hpp"
#include "aglab/planner.hpp"
#include "aglab/utility.hpp"

namespace aglab {

// ---------------------------------------------------------------------------
// Log-domain history probability, for scoring over long histories.
// ---------------------------------------------------------------------------

inline double log2_history_probability(const Model& q, const History& h) {
  StateBelief b = forward_init(q);
  double log2p = 0.0;
  for (int t = 1; t <= h.length(); ++t) {
    b = forward_step(q, b, h.action(t), h.observation(t));
    double mass = belief_mass(b);
    if (mass <= 0.0) return -std::numeric_limits<double>::infinity();
    log2p += std::log2(mass);
    for (double& x : b) x /= mass;
  }
  return log2p;
}

// ---------------------------------------------------------------------------
// Candidate spaces.
// ---------------------------------------------------------------------------

/// Either an explicit model list or a generator for a declared family of
/// transition tables on a coarse probability grid, realized up to the
/// length bound |q0| of the table-lookup program for the given history.
class CandidateSpace {
 public:
  static CandidateSpace explicit_list(std::vector<ModelPtr> models) {
    CandidateSpace s;
    s.models_ = std::move(models);
    return s;
  }

  struct TableFamily {
    int max_states = 2;
    int n_actions = 2;
    int n_obs = 2;
    int grid = 2;  // probability denominator for enumerated rows
    long long candidate_cap = 2000000;
  };

  static CandidateSpace table_family(TableFamily family) {
    CandidateSpace s;
    s.family_ = family;
    return s;
  }

  bool empty() const { return models_.empty() && !family_.has_value(); }

  /// Concrete candidate list for history h. Generator spaces append the
  /// table-lookup program q0, which realizes the finite search bound.
  std::vector<ModelPtr> materialize(const History& h) const {
    if (!family_.has_value()) return models_;
    std::vector<ModelPtr> out;
    auto q0 = table_lookup_program(h);
    long long bound = description_length(*q0);
    const TableFamily& f = *family_;
    for (int n_states = 1; n_states <= f.max_states; ++n_states) {
      // enumerate each row as a composition of `grid` grains over the
      // (next state, obs) cells; all rows independently
      int cells = n_states * f.n_obs;
      std::vector<std::vector<Transition>> rows_of_one;
      std::vector<int> grains(cells, 0);
      std::function<void(int, int)> emit = [&](int cell, int left) {
        if (cell == cells - 1) {
          grains[cell] = left;
          std::vector<Transition> row;
          for (int c = 0; c < cells; ++c)
            if (grains[c] > 0)
              row.push_back({c / f.n_obs, c % f.n_obs, static_cast<double>(grains[c]) / f.grid});
          rows_of_one.push_back(std::move(row));
          return;
        }
        for (int g = 0; g <= left; ++g) {
          grains[cell] = g;
          emit(cell + 1, left - g);
        }
      };
      emit(0, f.grid);

      long long per_model_rows = static_cast<long long>(n_states) * f.n_actions;
      double count = std::pow(static_cast<double>(rows_of_one.size()), per_model_rows);
      require(count <= static_cast<double>(f.candidate_cap), Errc::resource_cap,
              "declared table family too large to enumerate");

      std::vector<int> pick(per_model_rows, 0);
      while (true) {
        Dynamics d;
        d.n_states = n_states;
        d.n_actions = f.n_actions;
        d.n_obs = f.n_obs;
        d.start = 0;
        for (long long r = 0; r < per_model_rows; ++r) d.rows.push_back(rows_of_one[pick[r]]);
        auto table = std::make_shared<TransitionTable>(std::move(d));
        if (description_length(*table) <= bound) out.push_back(table);
        long long pos = per_model_rows - 1;
        while (pos >= 0 && ++pick[pos] == static_cast<int>(rows_of_one.size())) pick[pos--] = 0;
        if (pos < 0) break;
      }
    }
    out.push_back(q0);
    return out;
  }

 private:
  std::vector<ModelPtr> models_;
  std::optional<TableFamily> family_;
};

// ---------------------------------------------------------------------------
// MAP model selection and mixtures.
// ---------------------------------------------------------------------------

struct MapResult {
  ModelPtr model;
  double log2_score = 0.0;  // log2 P(h|q) - |q|
  double score = 0.0;       // 2^log2_score; may underflow to 0
};

/// argmax over the space of P(h|q) * 2^-|q|. Ties prefer the shorter model,
/// then the lexicographically first canonical serialization.
inline MapResult learn_map_model(const History& h, const CandidateSpace& space) {
  require(!space.empty(), Errc::empty_input, "empty candidate space");
  std::vector<ModelPtr> candidates = space.materialize(h);
  require(!candidates.empty(), Errc::empty_input, "candidate space materialized to nothing");

  MapResult best;
  long long best_len = 0;
  std::vector<int> best_tokens;
  bool first = true;
  for (const auto& q : candidates) {
    double log2_score = log2_history_probability(*q, h) - static_cast<double>(description_length(*q));
    long long len = description_length(*q);
    std::vector<int> toks;
    bool better = first || log2_score > best.log2_score;
    if (!better && !first && log2_score == best.log2_score) {
      toks = q->tokens();
      better = len < best_len || (len == best_len && toks < best_tokens);
    }
    if (better) {
      best.model = q;
      best.log2_score = log2_score;
      best_len = len;
      best_tokens = toks.empty() ? q->tokens() : toks;
      first = false;
    }
  }
  best.score = std::exp2(best.log2_score);
  return best;
}

struct MixtureResult {
  double unnormalized = 0.0;  // sum P(h|q) 2^-|q|
  double normalized = 0.0;    // prior renormalized over the space
};

inline MixtureResult mixture_probability(const History& h, const std::vector<ModelPtr>& space) {
  require(!space.empty(), Errc::empty_input, "empty candidate space");
  MixtureResult out;
  double prior_total = 0.0;
  for (const auto& q : space) {
    double w = prior(*q);
    prior_total += w;
    out.unnormalized += w * std::exp2(log2_history_probability(*q, h));
  }
  require(prior_total > 0.0, Errc::degenerate_value, "priors underflowed to zero; space too large");
  out.normalized = out.unnormalized / prior_total;
  return out;
}

// ---------------------------------------------------------------------------
// Three-variable rule enumeration. Candidates place one binary Boolean
// operation at one of the three variables, assign the other two by copies,
// and choose the hidden variable's initial value: 3 ops x 3 placements x
// 3 x 3 binary inputs x 3 x 3 copy inputs x 2 initials = 1458 cases.
// Variable ordinals: 0 = s (observed), 1 = r (hidden), 2 = v (observed).
// ---------------------------------------------------------------------------

struct SrvParams {
  int binary_relation = 0;  // 0 = and, 1 = or, 2 = xor
  int binary_place = 0;
  int binary_inputs[2] = {0, 0};
  int other_inputs[2] = {0, 0};
  int initial_r = 0;

  bool operator==(const SrvParams&) const = default;
};

inline constexpr int kSrvCaseCount = 1458;

inline SrvParams srv_params_of(int ordinal) {
  SrvParams p;
  int c = ordinal;
  p.binary_relation = c % 3;
  c /= 3;
  p.binary_place = c % 3;
  c /= 3;
  for (int i = 0; i < 2; ++i) {
    p.binary_inputs[i] = c % 3;
    c /= 3;
  }
  for (int i = 0; i < 2; ++i) {
    p.other_inputs[i] = c % 3;
    c /= 3;
  }
  p.initial_r = c;
  return p;
}

inline std::vector<SrvParams> enumerate_srv(const std::vector<bool>& s_observed,
                                            const std::vector<bool>& v_observed) {
  require(s_observed.size() == v_observed.size(), Errc::parameter, "sequences must have equal length");
  require(!s_observed.empty(), Errc::parameter, "sequences must be nonempty");
  int len = static_cast<int>(s_observed.size());
  std::vector<SrvParams> matches;
  for (int ordinal = 0; ordinal < kSrvCaseCount; ++ordinal) {
    SrvParams p = srv_params_of(ordinal);
    bool srv[3] = {s_observed[0], p.initial_r == 1, v_observed[0]};
    bool success = true;
    for (int t = 1; t < len && success; ++t) {
      bool a = srv[p.binary_inputs[0]];
      bool b = srv[p.binary_inputs[1]];
      bool d = srv[p.other_inputs[0]];
      bool e = srv[p.other_inputs[1]];
      srv[p.binary_place] = p.binary_relation == 0 ? (a && b) : p.binary_relation == 1 ? (a || b) : (a != b);
      srv[(p.binary_place + 1) % 3] = d;
      srv[(p.binary_place + 2) % 3] = e;
      success = srv[0] == s_observed[t] && srv[2] == v_observed[t];
    }
    if (success) matches.push_back(p);
  }
  return matches;
}

// ---------------------------------------------------------------------------
// Variable specifications and model-based utilities.
// ---------------------------------------------------------------------------

/// Predicate over a Boolean network's state variables.
struct VariableSpec {
  std::function<bool(const BooleanNetwork&, int slot)> matches;
  std::string description;

  /// "the state variable not read by any observation expression"
  static VariableSpec unobserved() {
    return {[](const BooleanNetwork& net, int slot) { return !net.observation_reads(slot); },
            "state variable not read by any observation expression"};
  }

  /// "the state variable read by observation <name>"
  static VariableSpec observed_by(std::string obs_name) {
    return {[obs_name](const BooleanNetwork& net, int slot) {
              for (int i = 0; i < net.obs_var_count(); ++i)
                if (net.obs_var_name(i) == obs_name && net.observation_reads(i, slot)) return true;
              return false;
            },
            "state variable read by observation " + obs_name};
  }
};

inline int resolve_variable(const BooleanNetwork& net, const VariableSpec& spec) {
  int found = -1;
  for (int slot = 0; slot < net.state_var_count(); ++slot) {
    if (!spec.matches(net, slot)) continue;
    require(found == -1, Errc::spec_match, "specification matches multiple variables: " + spec.description);
    found = slot;
  }
  require(found != -1, Errc::spec_match, "specification matches no variable: " + spec.description);
  return found;
}

/// Per-(h, z) utility kernel. The single-variable form, when present,
/// declares that the kernel depends on the resolved variable's value at the
/// final step only, enabling the two-term posterior collapse.
struct Kernel {
  std::function<double(const History&, bool var_at_final)> single_var;
  std::function<double(const History&, const StateHistory&, const BooleanNetwork&, int slot)> general;
};

/// Marginal P(state bit `slot` = 1 | h) from a normalized belief.
inline double bit_marginal(const BooleanNetwork& net, const StateBelief& normalized, int slot) {
  double p = 0.0;
  for (int s = 0; s < static_cast<int>(normalized.size()); ++s)
    if (net.state_bit(s, slot)) p += normalized[s];
  return p;
}

inline double model_based_utility_from_belief(const BooleanNetwork& net, int slot, const Kernel& kernel,
                                              const History& h, const StateBelief& normalized) {
  require(static_cast<bool>(kernel.single_var), Errc::kind, "belief path needs a single-variable kernel");
  double p1 = bit_marginal(net, normalized, slot);
  return p1 * kernel.single_var(h, true) + (1.0 - p1) * kernel.single_var(h, false);
}

/// u(h) = sum_z P(z | h, q) u(h, z), via the single-variable collapse when
/// the kernel declares it, else by exhaustive trajectory enumeration.
inline double model_based_utility(const std::shared_ptr<const BooleanNetwork>& net, const VariableSpec& spec,
                                  const Kernel& kernel, const History& h) {
  int slot = resolve_variable(*net, spec);
  if (kernel.single_var) {
    StateBelief b = forward_belief(*net, h);
    double mass = belief_mass(b);
    require(mass > 0.0, Errc::impossible_history, "model-based utility of an impossible history");
    for (double& x : b) x /= mass;
    return model_based_utility_from_belief(*net, slot, kernel, h, b);
  }
  auto posterior = state_history_posterior(*net, h);
  double u = 0.0;
  for (std::size_t i = 0; i < posterior.trajectories.size(); ++i)
    u += posterior.weights[i] * kernel.general(h, posterior.trajectories[i], *net, slot);
  return u;
}

/// Bundle a model-based utility for the planner: the plain evaluator plus
/// the belief fast path over the same model.
struct ModelBasedUtility {
  UtilitySpec spec;
  BeliefUtility fast;

  PlannerUtility planner_utility() const { return {&spec, &fast}; }
};

inline ModelBasedUtility make_model_based_utility(std::shared_ptr<const BooleanNetwork> net, VariableSpec vspec,
                                                  Kernel kernel) {
  int slot = resolve_variable(*net, vspec);
  auto plain = [net, vspec, kernel](const History& h) { return model_based_utility(net, vspec, kernel, h); };
  auto fast = [net, slot, kernel](const History& h, const StateBelief& normalized) {
    return model_based_utility_from_belief(*net, slot, kernel, h, normalized);
  };
  return {UtilitySpec::model_based(plain), BeliefUtility{net, fast}};
}

/// Action bit `action_slot` of the action at time t (1-based), given the
/// network's packing (first declared action variable most significant).
inline bool action_bit(const BooleanNetwork& net, const History& h, int t, int action_slot) {
  return (h.action(t) >> (net.action_var_count() - 1 - action_slot)) & 1;
}

/// Kernel factory bound to a specific network: u = [action bit at time
/// t-offset == matched variable at time t]. Histories too short to carry
/// the compared action score 0.
inline Kernel match_kernel(const std::shared_ptr<const BooleanNetwork>& net, int action_slot, int offset) {
  Kernel k;
  k.single_var = [net, action_slot, offset](const History& h, bool var) {
    int t = h.length();
    if (t - offset < 1) return 0.0;
    return action_bit(*net, h, t - offset, action_slot) == var ? 1.0 : 0.0;
  };
  k.general = [net, action_slot, offset](const History& h, const StateHistory& z, const BooleanNetwork& n,
                                         int slot) {
    int t = h.length();
    if (t - offset < 1) return 0.0;
    bool var = n.state_bit(z.states[t], slot);
    return action_bit(*net, h, t - offset, action_slot) == var ? 1.0 : 0.0;
  };
  return k;
}

/// The hidden-variable match utility: "1 when the action bit a, chosen one
/// step before the matched variable's value is realized, equals it".
inline ModelBasedUtility delusion_utility_6_3(std::shared_ptr<const BooleanNetwork> env) {
  Kernel k = match_kernel(env, /*action_slot=*/0, /*offset=*/1);
  return make_model_based_utility(std::move(env), VariableSpec::unobserved(), std::move(k));
}

/// The observed-variable prediction utility: "1 when the action bit a sent
/// with the current exchange equals the observed variable's new value".
inline ModelBasedUtility delusion_utility_6_4(std::shared_ptr<const BooleanNetwork> env) {
  Kernel k = match_kernel(env, /*action_slot=*/0, /*offset=*/0);
  return make_model_based_utility(std::move(env), VariableSpec::observed_by("o"), std::move(k));
}

// ---------------------------------------------------------------------------
// Two-argument utilities from three-argument ones.
// ---------------------------------------------------------------------------

using TwoArgUtility = std::function<double(const History&, const History&)>;

inline TwoArgUtility two_arg_from_three(ThreeArgUtility u3) {
  return [u3 = std::move(u3)](const History& hm, const History& h) { return u3(hm, hm, h); };
}

// ---------------------------------------------------------------------------
// Structural recovery of the hidden-cycle environment: score the 1458 rule
// structures, each extended with a flip-with-probability-(1-alpha) on its
// binary-operation variable, against an observation history taken with the
// rewrite gate closed (b = false throughout). Observed slots are variable 0
// (via o) and variable 2 (via p); variable 1 is hidden.
// ---------------------------------------------------------------------------

struct SrvRecovery {
  SrvParams winner;
  double alpha_hat = 0.0;           // ML flip rate, quantized to 1/1024
  double winner_log2_likelihood = 0.0;
  bool structure_recovered = false;  // xor at slot 0 on {1,2} with the copy chain 1<-0, 2<-1
};

namespace detail {

struct SrvFilter {
  SrvParams p;

  // log-likelihood of the observed (o, p) bit sequences under flip rate
  // (1 - alpha); -inf when the deterministic copies contradict
  double log2_likelihood(const std::vector<bool>& o_bits, const std::vector<bool>& p_bits,
                         double alpha) const {
    int len = static_cast<int>(o_bits.size());
    // weights over the hidden variable's value
    double w[2] = {0.0, 0.0};
    w[p.initial_r] = 1.0;
    double log2p = 0.0;
    for (int t = 1; t < len; ++t) {
      double next[2] = {0.0, 0.0};
      for (int hidden = 0; hidden < 2; ++hidden) {
        if (w[hidden] == 0.0) continue;
        bool prev[3] = {o_bits[t - 1], hidden == 1, p_bits[t - 1]};
        bool in1 = prev[p.binary_inputs[0]];
        bool in2 = prev[p.binary_inputs[1]];
        bool op = p.binary_relation == 0 ? (in1 && in2) : p.binary_relation == 1 ? (in1 || in2) : (in1 != in2);
        bool cur[3];
        cur[(p.binary_place + 1) % 3] = prev[p.other_inputs[0]];
        cur[(p.binary_place + 2) % 3] = prev[p.other_inputs[1]];
        // both observed slots must match, whichever slot holds the op
        for (int flip = 0; flip < 2; ++flip) {
          cur[p.binary_place] = flip ? !op : op;
          double branch = flip ? (1.0 - alpha) : alpha;
          if (branch == 0.0 || cur[0] != o_bits[t] || cur[2] != p_bits[t]) continue;
          next[cur[1] ? 1 : 0] += w[hidden] * branch;
        }
      }
      double mass = next[0] + next[1];
      if (mass <= 0.0) return -std::numeric_limits<double>::infinity();
      log2p += std::log2(mass);
      w[0] = next[0] / mass;
      w[1] = next[1] / mass;
    }
    return log2p;
  }
};

}  // namespace detail

/// Fit alpha by maximum likelihood over a fine grid.
inline std::pair<double, double> srv_fit_alpha(const detail::SrvFilter& filter, const std::vector<bool>& o_bits,
                                               const std::vector<bool>& p_bits) {
  double best_alpha = 0.5;
  double best = filter.log2_likelihood(o_bits, p_bits, 0.5);
  if (best == -std::numeric_limits<double>::infinity()) return {best_alpha, best};
  for (int j = 1; j < 256; ++j) {
    double alpha = j / 256.0;
    double ll = filter.log2_likelihood(o_bits, p_bits, alpha);
    if (ll > best) {
      best = ll;
      best_alpha = alpha;
    }
  }
  // refine around the coarse winner on the 1/1024 grid
  int center = static_cast<int>(std::llround(best_alpha * 1024));
  for (int j = std::max(1, center - 8); j <= std::min(1023, center + 8); ++j) {
    double alpha = j / 1024.0;
    double ll = filter.log2_likelihood(o_bits, p_bits, alpha);
    if (ll > best) {
      best = ll;
      best_alpha = alpha;
    }
  }
  best_alpha = std::round(best_alpha * 1024) / 1024.0;
  return {best_alpha, filter.log2_likelihood(o_bits, p_bits, best_alpha)};
}

/// Recover the rule structure from an interaction history of the
/// hidden-cycle environment observed with b = false throughout.
inline SrvRecovery recover_delusion_structure(const History& h) {
  std::vector<bool> o_bits, p_bits;
  o_bits.reserve(h.length());
  for (int t = 1; t <= h.length(); ++t) {
    o_bits.push_back((h.observation(t) >> 1) & 1);
    p_bits.push_back(h.observation(t) & 1);
  }
  require(o_bits.size() >= 3, Errc::parameter, "history too short for structural recovery");

  SrvRecovery out;
  bool first = true;
  for (int ordinal = 0; ordinal < kSrvCaseCount; ++ordinal) {
    detail::SrvFilter filter{srv_params_of(ordinal)};
    auto [alpha, ll] = srv_fit_alpha(filter, o_bits, p_bits);
    if (first || ll > out.winner_log2_likelihood) {
      out.winner = filter.p;
      out.alpha_hat = alpha;
      out.winner_log2_likelihood = ll;
      first = false;
    }
  }
  const SrvParams& w = out.winner;
  bool xor_on_rv = w.binary_relation == 2 && w.binary_place == 0 &&
                   ((w.binary_inputs[0] == 1 && w.binary_inputs[1] == 2) ||
                    (w.binary_inputs[0] == 2 && w.binary_inputs[1] == 1));
  bool copy_chain = w.other_inputs[0] == 0 && w.other_inputs[1] == 1;
  out.structure_recovered = xor_on_rv && copy_chain;
  return out;
}

}  // namespace aglab
