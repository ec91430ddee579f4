#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "aglab/errors.hpp"
#include "aglab/history.hpp"
#include "aglab/rng.hpp"

namespace aglab {

// ---------------------------------------------------------------------------
// Explicit finite dynamics shared by both model forms.
// ---------------------------------------------------------------------------

/// One transition alternative: from (state, action) to (next, obs) with prob.
struct Transition {
  int next;
  int obs;
  double prob;
};

/// Finite controlled Markov dynamics: for every (state, action) a probability
/// row over (next state, observation) pairs. Zero-probability entries are
/// not stored.
struct Dynamics {
  int n_states = 1;
  int n_actions = 1;
  int n_obs = 1;
  int start = 0;
  std::vector<std::vector<Transition>> rows;  // index s * n_actions + a

  const std::vector<Transition>& row(int state, Action a) const { return rows[state * n_actions + a]; }

  double prob(int state, Action a, int next, int obs) const {
    for (const auto& t : row(state, a))
      if (t.next == next && t.obs == obs) return t.prob;
    return 0.0;
  }

  void validate() const {
    require(n_states >= 1 && n_actions >= 1 && n_obs >= 1 && start >= 0 && start < n_states,
            Errc::parameter, "malformed dynamics header");
    require(static_cast<int>(rows.size()) == n_states * n_actions, Errc::parameter, "row count mismatch");
    for (const auto& r : rows) {
      double total = 0.0;
      for (const auto& t : r) {
        require(t.prob >= 0.0, Errc::normalization, "negative transition probability");
        require(t.next >= 0 && t.next < n_states && t.obs >= 0 && t.obs < n_obs, Errc::parameter,
                "transition target out of range");
        total += t.prob;
      }
      require(std::abs(total - 1.0) <= 1e-9, Errc::normalization, "transition row must sum to 1");
    }
  }
};

// ---------------------------------------------------------------------------
// Canonical serialization. Description length is the canonical token count
// times the per-token bit cost of a fixed global vocabulary: numerals 0..1023
// plus keywords, 2048 ids, 11 bits per token. Numerals above 1023 spill into
// extra base-1024 digit tokens so longer constructs always cost more.
// Probabilities are quantized to the 1/1024 grid in serialized form only;
// runtime models keep exact doubles.
// ---------------------------------------------------------------------------

inline constexpr int kTokenBits = 11;
inline constexpr int kProbDenominator = 1024;

inline int quantize_prob(double p) {
  int n = static_cast<int>(std::llround(p * kProbDenominator));
  return std::clamp(n, 0, kProbDenominator);
}

namespace detail {
enum Keyword : int {
  kKwTable = 1024,
  kKwNetwork,
  kKwLit0,
  kKwLit1,
  kKwPrev,
  kKwCur,
  kKwAct,
  kKwNot,
  kKwAnd,
  kKwOr,
  kKwXor,
  kKwChoice,
};

inline void push_numeral(std::vector<int>& out, long long n) {
  if (n < 1024) {
    out.push_back(static_cast<int>(n));
    return;
  }
  push_numeral(out, n / 1024);
  out.push_back(static_cast<int>(n % 1024));
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Model interface.
// ---------------------------------------------------------------------------

class Model {
 public:
  virtual ~Model() = default;

  virtual const Dynamics& dynamics() const = 0;
  /// Canonical token stream; basis of description_length and tie-breaking.
  virtual std::vector<int> tokens() const = 0;
  /// Canonical interchange text; loading then saving is the identity.
  virtual std::string text() const = 0;

  Alphabets alphabets() const { return {dynamics().n_actions, dynamics().n_obs}; }
};

using ModelPtr = std::shared_ptr<const Model>;

/// |q| in bits under the canonical serialization.
inline long long description_length(const Model& q) {
  return static_cast<long long>(q.tokens().size()) * kTokenBits;
}

inline double log2_prior(const Model& q) { return -static_cast<double>(description_length(q)); }

/// phi(q) = 2^-|q|. Underflows to 0 for large programs; use log2_prior there.
inline double prior(const Model& q) { return std::exp2(log2_prior(q)); }

// ---------------------------------------------------------------------------
// Transition-table models.
// ---------------------------------------------------------------------------

class TransitionTable : public Model {
 public:
  explicit TransitionTable(Dynamics d) : dyn_(std::move(d)) { dyn_.validate(); }

  const Dynamics& dynamics() const override { return dyn_; }

  std::vector<int> tokens() const override {
    std::vector<int> out;
    out.push_back(detail::kKwTable);
    detail::push_numeral(out, dyn_.n_states);
    detail::push_numeral(out, dyn_.n_actions);
    detail::push_numeral(out, dyn_.n_obs);
    detail::push_numeral(out, dyn_.start);
    for (int s = 0; s < dyn_.n_states; ++s)
      for (int a = 0; a < dyn_.n_actions; ++a)
        for (int next = 0; next < dyn_.n_states; ++next)
          for (int o = 0; o < dyn_.n_obs; ++o) detail::push_numeral(out, quantize_prob(dyn_.prob(s, a, next, o)));
    return out;
  }

  std::string text() const override {
    std::ostringstream os;
    os << "table " << dyn_.n_states << ' ' << dyn_.n_actions << ' ' << dyn_.n_obs << " start " << dyn_.start
       << '\n';
    for (int s = 0; s < dyn_.n_states; ++s)
      for (int a = 0; a < dyn_.n_actions; ++a) {
        os << "row " << s << ' ' << a;
        for (int next = 0; next < dyn_.n_states; ++next)
          for (int o = 0; o < dyn_.n_obs; ++o) os << ' ' << quantize_prob(dyn_.prob(s, a, next, o));
        os << '\n';
      }
    return os.str();
  }

 private:
  Dynamics dyn_;
};

// ---------------------------------------------------------------------------
// Boolean-network models. Update expressions read previous-step state values
// and current actions; observation expressions read current state values and
// current actions, so a step is acyclic by construction.
// ---------------------------------------------------------------------------

struct Expr {
  enum class Op { lit, prev, cur, act, not_, and_, or_, xor_, choice };

  Op op = Op::lit;
  bool literal = false;
  int var = 0;        // prev/cur: state var slot; act: action var slot
  double prob = 0.0;  // choice
  std::vector<Expr> kids;

  static Expr lit(bool b) { return {Op::lit, b, 0, 0.0, {}}; }
  static Expr prev(int slot) { return {Op::prev, false, slot, 0.0, {}}; }
  static Expr cur(int slot) { return {Op::cur, false, slot, 0.0, {}}; }
  static Expr act(int slot) { return {Op::act, false, slot, 0.0, {}}; }
  static Expr not_(Expr e) { return {Op::not_, false, 0, 0.0, {std::move(e)}}; }
  static Expr and_(Expr a, Expr b) { return {Op::and_, false, 0, 0.0, {std::move(a), std::move(b)}}; }
  static Expr or_(Expr a, Expr b) { return {Op::or_, false, 0, 0.0, {std::move(a), std::move(b)}}; }
  static Expr xor_(Expr a, Expr b) { return {Op::xor_, false, 0, 0.0, {std::move(a), std::move(b)}}; }
  static Expr choice(double p, Expr a, Expr b) {
    require(p >= 0.0 && p <= 1.0, Errc::parameter, "choice probability outside [0,1]");
    return {Op::choice, false, 0, p, {std::move(a), std::move(b)}};
  }

  /// if c then a else b
  static Expr ite(Expr c, Expr a, Expr b) {
    Expr nc = not_(c);
    return or_(and_(std::move(c), std::move(a)), and_(std::move(nc), std::move(b)));
  }
};

class BooleanNetwork : public Model {
 public:
  struct StateVar {
    std::string name;
    bool init;
    Expr update;
  };
  struct ObsVar {
    std::string name;
    Expr expr;
  };

  BooleanNetwork(std::vector<std::string> action_names, std::vector<StateVar> state_vars,
                 std::vector<ObsVar> obs_vars)
      : action_names_(std::move(action_names)), state_vars_(std::move(state_vars)), obs_vars_(std::move(obs_vars)) {
    require(!action_names_.empty() && !state_vars_.empty() && !obs_vars_.empty(), Errc::parameter,
            "network needs at least one action, state, and observation variable");
    require(action_names_.size() <= 16 && state_vars_.size() <= 16 && obs_vars_.size() <= 16, Errc::resource_cap,
            "network variable counts capped at 16");
    for (const auto& sv : state_vars_) check_expr(sv.update, /*allow_cur=*/false);
    for (const auto& ov : obs_vars_) check_expr(ov.expr, /*allow_cur=*/true);
    build_dynamics();
  }

  const Dynamics& dynamics() const override { return dyn_; }

  int state_var_count() const { return static_cast<int>(state_vars_.size()); }
  int action_var_count() const { return static_cast<int>(action_names_.size()); }
  int obs_var_count() const { return static_cast<int>(obs_vars_.size()); }
  const std::string& state_var_name(int i) const { return state_vars_[i].name; }
  const std::string& action_var_name(int i) const { return action_names_[i]; }
  const std::string& obs_var_name(int i) const { return obs_vars_[i].name; }
  const Expr& update_expr(int i) const { return state_vars_[i].update; }
  const Expr& obs_expr(int i) const { return obs_vars_[i].expr; }

  /// Value of state variable `slot` inside a packed state index. The first
  /// declared variable occupies the most significant bit.
  bool state_bit(int state_index, int slot) const {
    int shift = state_var_count() - 1 - slot;
    return (state_index >> shift) & 1;
  }

  /// Whether an observation expression mentions state variable `slot`.
  bool observation_reads(int slot) const {
    for (const auto& ov : obs_vars_)
      if (mentions_cur(ov.expr, slot)) return true;
    return false;
  }
  bool observation_reads(int obs_slot, int state_slot) const { return mentions_cur(obs_vars_[obs_slot].expr, state_slot); }

  std::vector<int> tokens() const override {
    std::vector<int> out;
    out.push_back(detail::kKwNetwork);
    detail::push_numeral(out, action_var_count());
    detail::push_numeral(out, state_var_count());
    detail::push_numeral(out, obs_var_count());
    for (const auto& sv : state_vars_) {
      detail::push_numeral(out, sv.init ? 1 : 0);
      expr_tokens(sv.update, out);
    }
    for (const auto& ov : obs_vars_) expr_tokens(ov.expr, out);
    return out;
  }

  std::string text() const override {
    std::ostringstream os;
    os << "network\n";
    for (const auto& n : action_names_) os << "action " << n << '\n';
    for (const auto& sv : state_vars_) os << "state " << sv.name << " init " << (sv.init ? 1 : 0) << '\n';
    for (const auto& ov : obs_vars_) os << "obsvar " << ov.name << '\n';
    for (const auto& sv : state_vars_) {
      os << "update " << sv.name << " :=";
      expr_text(sv.update, os);
      os << '\n';
    }
    for (const auto& ov : obs_vars_) {
      os << "obs " << ov.name << " :=";
      expr_text(ov.expr, os);
      os << '\n';
    }
    return os.str();
  }

 private:
  void check_expr(const Expr& e, bool allow_cur) const {
    switch (e.op) {
      case Expr::Op::lit:
        return;
      case Expr::Op::prev:
        require(!allow_cur, Errc::parameter, "observation expressions read current state, not previous");
        require(e.var >= 0 && e.var < state_var_count(), Errc::parameter, "state slot out of range");
        return;
      case Expr::Op::cur:
        require(allow_cur, Errc::parameter, "state updates read previous-step values only");
        require(e.var >= 0 && e.var < state_var_count(), Errc::parameter, "state slot out of range");
        return;
      case Expr::Op::act:
        require(e.var >= 0 && e.var < action_var_count(), Errc::parameter, "action slot out of range");
        return;
      case Expr::Op::not_:
        require(e.kids.size() == 1, Errc::parameter, "not takes one operand");
        check_expr(e.kids[0], allow_cur);
        return;
      case Expr::Op::and_:
      case Expr::Op::or_:
      case Expr::Op::xor_:
        require(e.kids.size() == 2, Errc::parameter, "binary operator takes two operands");
        check_expr(e.kids[0], allow_cur);
        check_expr(e.kids[1], allow_cur);
        return;
      case Expr::Op::choice:
        require(e.kids.size() == 2, Errc::parameter, "choice takes two operands");
        require(e.prob >= 0.0 && e.prob <= 1.0, Errc::parameter, "choice probability outside [0,1]");
        check_expr(e.kids[0], allow_cur);
        check_expr(e.kids[1], allow_cur);
        return;
    }
  }

  bool mentions_cur(const Expr& e, int slot) const {
    if (e.op == Expr::Op::cur && e.var == slot) return true;
    for (const auto& k : e.kids)
      if (mentions_cur(k, slot)) return true;
    return false;
  }

  struct EvalCtx {
    const BooleanNetwork* net;
    int prev_state;
    int cur_state;  // valid for observation expressions
    int action;
  };

  /// Weighted evaluation: every stochastic choice node forks the world.
  static void eval_weighted(const Expr& e, const EvalCtx& ctx, double weight,
                            std::vector<std::pair<bool, double>>& out) {
    switch (e.op) {
      case Expr::Op::lit:
        out.emplace_back(e.literal, weight);
        return;
      case Expr::Op::prev:
        out.emplace_back(ctx.net->state_bit(ctx.prev_state, e.var), weight);
        return;
      case Expr::Op::cur:
        out.emplace_back(ctx.net->state_bit(ctx.cur_state, e.var), weight);
        return;
      case Expr::Op::act: {
        int shift = ctx.net->action_var_count() - 1 - e.var;
        out.emplace_back((ctx.action >> shift) & 1, weight);
        return;
      }
      case Expr::Op::not_: {
        std::vector<std::pair<bool, double>> sub;
        eval_weighted(e.kids[0], ctx, weight, sub);
        for (auto [b, w] : sub) out.emplace_back(!b, w);
        return;
      }
      case Expr::Op::and_:
      case Expr::Op::or_:
      case Expr::Op::xor_: {
        std::vector<std::pair<bool, double>> left, right;
        eval_weighted(e.kids[0], ctx, 1.0, left);
        eval_weighted(e.kids[1], ctx, 1.0, right);
        for (auto [lb, lw] : left)
          for (auto [rb, rw] : right) {
            bool b = e.op == Expr::Op::and_ ? (lb && rb) : e.op == Expr::Op::or_ ? (lb || rb) : (lb != rb);
            out.emplace_back(b, weight * lw * rw);
          }
        return;
      }
      case Expr::Op::choice: {
        if (e.prob > 0.0) eval_weighted(e.kids[0], ctx, weight * e.prob, out);
        if (e.prob < 1.0) eval_weighted(e.kids[1], ctx, weight * (1.0 - e.prob), out);
        return;
      }
    }
  }

  void build_dynamics() {
    int ns = 1 << state_var_count();
    int na = 1 << action_var_count();
    int no = 1 << obs_var_count();
    dyn_.n_states = ns;
    dyn_.n_actions = na;
    dyn_.n_obs = no;
    int start = 0;
    for (int i = 0; i < state_var_count(); ++i)
      if (state_vars_[i].init) start |= 1 << (state_var_count() - 1 - i);
    dyn_.start = start;
    dyn_.rows.assign(static_cast<std::size_t>(ns) * na, {});
    for (int s = 0; s < ns; ++s) {
      for (int a = 0; a < na; ++a) {
        EvalCtx ctx{this, s, 0, a};
        // joint distribution over next-state assignments
        std::vector<std::pair<int, double>> partial{{0, 1.0}};
        for (int i = 0; i < state_var_count(); ++i) {
          std::vector<std::pair<bool, double>> vals;
          eval_weighted(state_vars_[i].update, ctx, 1.0, vals);
          std::vector<std::pair<int, double>> grown;
          for (auto [bits, w] : partial)
            for (auto [b, vw] : vals)
              grown.emplace_back(bits | (b ? 1 << (state_var_count() - 1 - i) : 0), w * vw);
          partial = std::move(grown);
        }
        std::map<std::pair<int, int>, double> acc;
        for (auto [next, w] : partial) {
          EvalCtx octx{this, s, next, a};
          std::vector<std::pair<int, double>> obs_partial{{0, 1.0}};
          for (int i = 0; i < obs_var_count(); ++i) {
            std::vector<std::pair<bool, double>> vals;
            eval_weighted(obs_vars_[i].expr, octx, 1.0, vals);
            std::vector<std::pair<int, double>> grown;
            for (auto [bits, ow] : obs_partial)
              for (auto [b, vw] : vals)
                grown.emplace_back(bits | (b ? 1 << (obs_var_count() - 1 - i) : 0), ow * vw);
            obs_partial = std::move(grown);
          }
          for (auto [obs, ow] : obs_partial) acc[{next, obs}] += w * ow;
        }
        auto& row = dyn_.rows[static_cast<std::size_t>(s) * na + a];
        for (auto& [key, p] : acc)
          if (p > 0.0) row.push_back({key.first, key.second, p});
      }
    }
    dyn_.validate();
  }

  static void expr_tokens(const Expr& e, std::vector<int>& out) {
    switch (e.op) {
      case Expr::Op::lit:
        out.push_back(e.literal ? detail::kKwLit1 : detail::kKwLit0);
        return;
      case Expr::Op::prev:
        out.push_back(detail::kKwPrev);
        detail::push_numeral(out, e.var);
        return;
      case Expr::Op::cur:
        out.push_back(detail::kKwCur);
        detail::push_numeral(out, e.var);
        return;
      case Expr::Op::act:
        out.push_back(detail::kKwAct);
        detail::push_numeral(out, e.var);
        return;
      case Expr::Op::not_:
        out.push_back(detail::kKwNot);
        expr_tokens(e.kids[0], out);
        return;
      case Expr::Op::and_:
      case Expr::Op::or_:
      case Expr::Op::xor_:
        out.push_back(e.op == Expr::Op::and_   ? detail::kKwAnd
                      : e.op == Expr::Op::or_ ? detail::kKwOr
                                              : detail::kKwXor);
        expr_tokens(e.kids[0], out);
        expr_tokens(e.kids[1], out);
        return;
      case Expr::Op::choice:
        out.push_back(detail::kKwChoice);
        detail::push_numeral(out, quantize_prob(e.prob));
        expr_tokens(e.kids[0], out);
        expr_tokens(e.kids[1], out);
        return;
    }
  }

  void expr_text(const Expr& e, std::ostream& os) const {
    switch (e.op) {
      case Expr::Op::lit:
        os << ' ' << (e.literal ? 1 : 0);
        return;
      case Expr::Op::prev:
        os << " prev " << state_vars_[e.var].name;
        return;
      case Expr::Op::cur:
        os << " cur " << state_vars_[e.var].name;
        return;
      case Expr::Op::act:
        os << " act " << action_names_[e.var];
        return;
      case Expr::Op::not_:
        os << " not";
        expr_text(e.kids[0], os);
        return;
      case Expr::Op::and_:
      case Expr::Op::or_:
      case Expr::Op::xor_:
        os << (e.op == Expr::Op::and_ ? " and" : e.op == Expr::Op::or_ ? " or" : " xor");
        expr_text(e.kids[0], os);
        expr_text(e.kids[1], os);
        return;
      case Expr::Op::choice:
        os << " choice " << quantize_prob(e.prob);
        expr_text(e.kids[0], os);
        expr_text(e.kids[1], os);
        return;
    }
  }

  std::vector<std::string> action_names_;
  std::vector<StateVar> state_vars_;
  std::vector<ObsVar> obs_vars_;
  Dynamics dyn_;
};

// ---------------------------------------------------------------------------
// Forward probability machinery.
// ---------------------------------------------------------------------------

/// Unnormalized forward weights: belief[s] = P(o(h), state_t = s | a(h), q).
using StateBelief = std::vector<double>;

inline StateBelief forward_init(const Model& q) {
  StateBelief b(q.dynamics().n_states, 0.0);
  b[q.dynamics().start] = 1.0;
  return b;
}

inline StateBelief forward_step(const Model& q, const StateBelief& belief, Action a, Obs o) {
  const Dynamics& d = q.dynamics();
  StateBelief out(d.n_states, 0.0);
  for (int s = 0; s < d.n_states; ++s) {
    if (belief[s] == 0.0) continue;
    for (const auto& t : d.row(s, a))
      if (t.obs == o) out[t.next] += belief[s] * t.prob;
  }
  return out;
}

inline double belief_mass(const StateBelief& b) {
  double total = 0.0;
  for (double w : b) total += w;
  return total;
}

inline StateBelief forward_belief(const Model& q, const History& h) {
  require(h.alphabets().actions <= q.dynamics().n_actions && h.alphabets().observations <= q.dynamics().n_obs,
          Errc::alphabet_violation, "history alphabets incompatible with model");
  StateBelief b = forward_init(q);
  for (int t = 1; t <= h.length(); ++t) b = forward_step(q, b, h.action(t), h.observation(t));
  return b;
}

/// P(h | q): summed over all internal state trajectories. P(empty | q) = 1.
inline double history_probability(const Model& q, const History& h) {
  return belief_mass(forward_belief(q, h));
}

/// Unnormalized next-observation weights after playing a from belief.
inline std::vector<double> observation_weights(const Model& q, const StateBelief& belief, Action a) {
  const Dynamics& d = q.dynamics();
  std::vector<double> w(d.n_obs, 0.0);
  for (int s = 0; s < d.n_states; ++s) {
    if (belief[s] == 0.0) continue;
    for (const auto& t : d.row(s, a)) w[t.obs] += belief[s] * t.prob;
  }
  return w;
}

/// rho(o | ha) for every o; errors on impossible conditioning history.
inline std::vector<double> conditional_observation(const Model& q, const History& h, Action a) {
  StateBelief b = forward_belief(q, h);
  double mass = belief_mass(b);
  require(mass > 0.0, Errc::impossible_history, "conditioning on a history the model cannot produce");
  std::vector<double> w = observation_weights(q, b, a);
  double total = 0.0;
  for (double x : w) total += x;
  require(total > 0.0, Errc::impossible_history, "model assigns zero probability to every next observation");
  for (double& x : w) x /= total;
  return w;
}

// ---------------------------------------------------------------------------
// Internal state trajectories.
// ---------------------------------------------------------------------------

/// Trajectory z = (z_0, ..., z_t) of internal states consistent with a
/// history of length t, with its path probability r(z | h, q).
struct StateHistory {
  std::vector<int> states;
  double path_probability = 0.0;
};

struct WeightedStateSet {
  std::vector<StateHistory> trajectories;
  std::vector<double> weights;  // posterior P(z | h, q), summing to 1
};

/// Exhaustive trajectory posterior. Exponential in |h|; intended for small
/// models and short histories (the forward machinery covers the rest).
inline WeightedStateSet state_history_posterior(const Model& q, const History& h) {
  const Dynamics& d = q.dynamics();
  WeightedStateSet out;
  std::vector<int> path{d.start};
  double total = 0.0;

  // depth-first enumeration over positive-probability continuations
  std::function<void(int, double)> dfs = [&](int t, double prob) {
    if (t == h.length()) {
      out.trajectories.push_back({path, prob});
      total += prob;
      return;
    }
    Action a = h.action(t + 1);
    Obs o = h.observation(t + 1);
    for (const auto& tr : d.row(path.back(), a)) {
      if (tr.obs != o || tr.prob == 0.0) continue;
      path.push_back(tr.next);
      dfs(t + 1, prob * tr.prob);
      path.pop_back();
    }
  };
  dfs(0, 1.0);
  require(total > 0.0, Errc::impossible_history, "history has no consistent state trajectory");
  out.weights.reserve(out.trajectories.size());
  for (const auto& z : out.trajectories) out.weights.push_back(z.path_probability / total);
  return out;
}

// ---------------------------------------------------------------------------
// Sampling.
// ---------------------------------------------------------------------------

/// One exact draw from the (state, action) row. Consumes one uniform variate.
inline std::pair<int, Obs> simulate_step(const Model& q, int state, Action a, SeedStream& stream) {
  const auto& row = q.dynamics().row(state, a);
  std::vector<double> probs;
  probs.reserve(row.size());
  for (const auto& t : row) probs.push_back(t.prob);
  int idx = stream.sample_row(probs);
  return {row[idx].next, row[idx].obs};
}

/// Length-n history under uniformly random actions. Per step: one variate
/// for the action, one for the transition.
inline History sample_history(const Model& q, int n, SeedStream& stream) {
  History h(q.alphabets());
  int state = q.dynamics().start;
  for (int t = 0; t < n; ++t) {
    Action a = static_cast<Action>(stream.below(q.dynamics().n_actions));
    auto [next, obs] = simulate_step(q, state, a, stream);
    h = h.extended(a, obs);
    state = next;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Interchange format.
// ---------------------------------------------------------------------------

ModelPtr load_model_text(const std::string& text);

// ---------------------------------------------------------------------------
// Built-in models.
// ---------------------------------------------------------------------------

/// Two-state benchmark table: actions {a=0, b=1}, observations {0, 1}.
inline std::shared_ptr<const TransitionTable> table_4_1() {
  Dynamics d;
  d.n_states = 2;
  d.n_actions = 2;
  d.n_obs = 2;
  d.start = 0;
  d.rows.resize(4);
  auto set_row = [&](int s, int a, std::initializer_list<double> probs) {
    auto it = probs.begin();
    auto& row = d.rows[s * 2 + a];
    for (int next = 0; next < 2; ++next)
      for (int o = 0; o < 2; ++o) {
        double p = *it++;
        if (p > 0.0) row.push_back({next, o, p});
      }
  };
  // columns: (s0,o0) (s0,o1) (s1,o0) (s1,o1)
  set_row(0, 0, {0.2, 0.3, 0.0, 0.5});
  set_row(0, 1, {0.3, 0.0, 0.3, 0.4});
  set_row(1, 0, {1.0, 0.0, 0.0, 0.0});
  set_row(1, 1, {0.3, 0.3, 0.2, 0.2});
  return std::make_shared<TransitionTable>(std::move(d));
}

/// Stateless binary source: P(o=1) = p regardless of state or action.
inline std::shared_ptr<const TransitionTable> bernoulli(double p, int n_actions = 2) {
  require(p >= 0.0 && p <= 1.0, Errc::parameter, "bernoulli parameter outside [0,1]");
  Dynamics d;
  d.n_states = 1;
  d.n_actions = n_actions;
  d.n_obs = 2;
  d.start = 0;
  d.rows.resize(n_actions);
  for (int a = 0; a < n_actions; ++a) {
    auto& row = d.rows[a];
    if (p < 1.0) row.push_back({0, 0, 1.0 - p});
    if (p > 0.0) row.push_back({0, 1, p});
  }
  return std::make_shared<TransitionTable>(std::move(d));
}

/// Three hidden bits cycling through seven configurations, with the s update
/// negated with probability 1-alpha; actions (a,b,c,d) where b gates the
/// observation rewrite and (c,d) supply the rewritten values. Action bit a is
/// most significant in the action index, observation bits are (o,p).
inline std::shared_ptr<const BooleanNetwork> delusion_env_6_3(double alpha = 0.99) {
  // alpha = 1 is the deterministic variant used to exhibit the 7-cycle
  require(alpha > 0.0 && alpha <= 1.0, Errc::parameter, "alpha must lie in (0,1]");
  Expr temp = Expr::xor_(Expr::prev(1), Expr::prev(2));
  std::vector<BooleanNetwork::StateVar> sv;
  sv.push_back({"s", true, Expr::choice(alpha, temp, Expr::not_(temp))});
  sv.push_back({"r", false, Expr::prev(0)});
  sv.push_back({"v", false, Expr::prev(1)});
  std::vector<BooleanNetwork::ObsVar> ov;
  ov.push_back({"o", Expr::ite(Expr::act(1), Expr::act(2), Expr::cur(0))});
  ov.push_back({"p", Expr::ite(Expr::act(1), Expr::act(3), Expr::cur(2))});
  return std::make_shared<BooleanNetwork>(std::vector<std::string>{"a", "b", "c", "d"}, std::move(sv),
                                          std::move(ov));
}

/// Observed bit s re-randomized once every four steps and held in between;
/// actions (a,b,c) with b gating the observation rewrite.
inline std::shared_ptr<const BooleanNetwork> delusion_env_6_4() {
  Expr hold = Expr::or_(Expr::prev(1), Expr::prev(2));
  Expr coin = Expr::choice(0.5, Expr::lit(true), Expr::lit(false));
  std::vector<BooleanNetwork::StateVar> sv;
  sv.push_back({"s", false, Expr::ite(hold, Expr::prev(0), coin)});
  sv.push_back({"r", false, Expr::not_(Expr::prev(1))});
  sv.push_back({"v", false, Expr::xor_(Expr::prev(1), Expr::prev(2))});
  std::vector<BooleanNetwork::ObsVar> ov;
  ov.push_back({"o", Expr::ite(Expr::act(1), Expr::act(2), Expr::cur(0))});
  return std::make_shared<BooleanNetwork>(std::vector<std::string>{"a", "b", "c"}, std::move(sv), std::move(ov));
}

/// Deterministic program replaying o(h) regardless of the actions it gets;
/// the q0 of the finite-computability bound.
inline std::shared_ptr<const TransitionTable> table_lookup_program(const History& h) {
  Dynamics d;
  d.n_states = h.length() + 1;
  d.n_actions = h.alphabets().actions;
  d.n_obs = h.alphabets().observations;
  d.start = 0;
  d.rows.resize(static_cast<std::size_t>(d.n_states) * d.n_actions);
  for (int s = 0; s < d.n_states; ++s)
    for (int a = 0; a < d.n_actions; ++a) {
      auto& row = d.rows[static_cast<std::size_t>(s) * d.n_actions + a];
      if (s < h.length())
        row.push_back({s + 1, h.observation(s + 1), 1.0});
      else
        row.push_back({s, 0, 1.0});
    }
  return std::make_shared<TransitionTable>(std::move(d));
}

// ---------------------------------------------------------------------------
// Conversion of a Boolean network to its explicit transition table.
// ---------------------------------------------------------------------------

inline std::shared_ptr<const TransitionTable> to_transition_table(const BooleanNetwork& net) {
  return std::make_shared<TransitionTable>(net.dynamics());
}

// ---------------------------------------------------------------------------
// Interchange parsing.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::vector<std::string>> tokenize_lines(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::vector<std::string> words;
    std::string w;
    while (ls >> w) {
      if (w[0] == '#') break;
      words.push_back(w);
    }
    if (!words.empty()) lines.push_back(std::move(words));
  }
  return lines;
}

struct ExprParser {
  const std::vector<std::string>& words;
  std::size_t pos;
  const std::vector<std::string>& state_names;
  const std::vector<std::string>& action_names;

  std::string next() {
    require(pos < words.size(), Errc::syntax, "unexpected end of expression");
    return words[pos++];
  }

  int slot_of(const std::vector<std::string>& names, const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<int>(i);
    fail(Errc::syntax, "unknown variable '" + name + "'");
  }

  Expr parse() {
    std::string w = next();
    if (w == "0") return Expr::lit(false);
    if (w == "1") return Expr::lit(true);
    if (w == "prev") return Expr::prev(slot_of(state_names, next()));
    if (w == "cur") return Expr::cur(slot_of(state_names, next()));
    if (w == "act") return Expr::act(slot_of(action_names, next()));
    if (w == "not") return Expr::not_(parse());
    if (w == "and") {
      Expr a = parse();
      return Expr::and_(std::move(a), parse());
    }
    if (w == "or") {
      Expr a = parse();
      return Expr::or_(std::move(a), parse());
    }
    if (w == "xor") {
      Expr a = parse();
      return Expr::xor_(std::move(a), parse());
    }
    if (w == "choice") {
      int n = std::stoi(next());
      require(n >= 0 && n <= kProbDenominator, Errc::syntax, "choice numerator out of range");
      Expr a = parse();
      return Expr::choice(static_cast<double>(n) / kProbDenominator, std::move(a), parse());
    }
    fail(Errc::syntax, "unknown expression token '" + w + "'");
  }
};

}  // namespace detail

inline ModelPtr load_model_text(const std::string& text) {
  auto lines = detail::tokenize_lines(text);
  require(!lines.empty(), Errc::syntax, "empty model text");
  if (lines[0][0] == "table") {
    require(lines[0].size() == 6 && lines[0][4] == "start", Errc::syntax, "malformed table header");
    Dynamics d;
    d.n_states = std::stoi(lines[0][1]);
    d.n_actions = std::stoi(lines[0][2]);
    d.n_obs = std::stoi(lines[0][3]);
    d.start = std::stoi(lines[0][5]);
    d.rows.resize(static_cast<std::size_t>(d.n_states) * d.n_actions);
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto& w = lines[i];
      require(w[0] == "row" && static_cast<int>(w.size()) == 3 + d.n_states * d.n_obs, Errc::syntax,
              "malformed table row");
      int s = std::stoi(w[1]);
      int a = std::stoi(w[2]);
      require(s >= 0 && s < d.n_states && a >= 0 && a < d.n_actions, Errc::syntax, "row label out of range");
      auto& row = d.rows[static_cast<std::size_t>(s) * d.n_actions + a];
      int k = 3;
      for (int next = 0; next < d.n_states; ++next)
        for (int o = 0; o < d.n_obs; ++o) {
          int numer = std::stoi(w[k++]);
          if (numer > 0) row.push_back({next, o, static_cast<double>(numer) / kProbDenominator});
        }
    }
    return std::make_shared<TransitionTable>(std::move(d));
  }
  require(lines[0][0] == "network", Errc::syntax, "expected 'table' or 'network'");
  std::vector<std::string> action_names;
  std::vector<std::string> state_names;
  std::vector<bool> inits;
  std::vector<std::string> obs_names;
  std::map<std::string, Expr> updates;
  std::map<std::string, Expr> obs_exprs;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& w = lines[i];
    if (w[0] == "action") {
      require(w.size() == 2, Errc::syntax, "malformed action line");
      action_names.push_back(w[1]);
    } else if (w[0] == "state") {
      require(w.size() == 4 && w[2] == "init", Errc::syntax, "malformed state line");
      state_names.push_back(w[1]);
      inits.push_back(w[3] == "1");
    } else if (w[0] == "obsvar") {
      require(w.size() == 2, Errc::syntax, "malformed obsvar line");
      obs_names.push_back(w[1]);
    } else if (w[0] == "update" || w[0] == "obs") {
      require(w.size() >= 4 && w[2] == ":=", Errc::syntax, "malformed expression line");
      detail::ExprParser p{w, 3, state_names, action_names};
      Expr e = p.parse();
      require(p.pos == w.size(), Errc::syntax, "trailing tokens in expression");
      if (w[0] == "update")
        updates.emplace(w[1], std::move(e));
      else
        obs_exprs.emplace(w[1], std::move(e));
    } else {
      fail(Errc::syntax, "unknown construct '" + w[0] + "'");
    }
  }
  std::vector<BooleanNetwork::StateVar> sv;
  for (std::size_t i = 0; i < state_names.size(); ++i) {
    auto it = updates.find(state_names[i]);
    require(it != updates.end(), Errc::syntax, "state variable without update: " + state_names[i]);
    sv.push_back({state_names[i], inits[i], it->second});
  }
  std::vector<BooleanNetwork::ObsVar> ov;
  for (const auto& name : obs_names) {
    auto it = obs_exprs.find(name);
    require(it != obs_exprs.end(), Errc::syntax, "observation variable without expression: " + name);
    ov.push_back({name, it->second});
  }
  return std::make_shared<BooleanNetwork>(std::move(action_names), std::move(sv), std::move(ov));
}

}  // namespace aglab
