#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "aglab/envmodel.hpp"
#include "aglab/errors.hpp"
#include "aglab/history.hpp"

namespace aglab {

/// Reward-bearing observations encode (o', r) as one index:
///   o_index = o'_index * |grid| + r_index.
struct RewardCodec {
  std::vector<double> grid;  // admissible reward levels, ascending

  static RewardCodec binary() { return {{0.0, 1.0}}; }

  int levels() const { return static_cast<int>(grid.size()); }

  double reward_of(Obs o, int n_obs) const {
    require(levels() >= 1, Errc::codec, "empty reward grid");
    require(n_obs % levels() == 0, Errc::codec,
            "observation alphabet size not divisible by reward grid size");
    return grid[o % levels()];
  }

  int plain_obs_of(Obs o) const { return o / levels(); }

  Obs encode(int plain_obs, int r_index) const { return plain_obs * levels() + r_index; }
};

/// Utility taxonomy over interaction histories. The model_based kind carries
/// an evaluator bound by the learner (posterior-weighted kernel); external
/// wraps an arbitrary history function.
class UtilitySpec {
 public:
  enum class Kind { reward, goal, prediction, knowledge, model_based, external };

  static UtilitySpec reward(RewardCodec codec) {
    UtilitySpec u(Kind::reward);
    u.codec_ = std::move(codec);
    return u;
  }

  /// Goal predicate over the observation sequence: true when the goal
  /// condition holds at the final step of the given history.
  static UtilitySpec goal(std::function<bool(const History&)> achieved_now) {
    UtilitySpec u(Kind::goal);
    u.goal_ = std::move(achieved_now);
    return u;
  }

  static UtilitySpec prediction(ModelPtr model) {
    UtilitySpec u(Kind::prediction);
    u.model_ = std::move(model);
    return u;
  }

  static UtilitySpec knowledge(ModelPtr model) {
    UtilitySpec u(Kind::knowledge);
    u.model_ = std::move(model);
    return u;
  }

  static UtilitySpec model_based(std::function<double(const History&)> eval) {
    UtilitySpec u(Kind::model_based);
    u.fn_ = std::move(eval);
    return u;
  }

  static UtilitySpec external(std::function<double(const History&)> eval) {
    UtilitySpec u(Kind::external);
    u.fn_ = std::move(eval);
    return u;
  }

  Kind kind() const { return kind_; }
  const RewardCodec& codec() const { return codec_; }
  const ModelPtr& model() const { return model_; }

  double eval(const History& h) const;

 private:
  explicit UtilitySpec(Kind k) : kind_(k) {}

  Kind kind_;
  RewardCodec codec_;
  ModelPtr model_;
  std::function<bool(const History&)> goal_;
  std::function<double(const History&)> fn_;
};

/// Observations tied for the maximal predicted probability after the final
/// action of h, under model q. Exposed because the prediction agent's tie
/// handling is a documented choice: a hit is scored if o_t lies in this set.
inline std::vector<Obs> prediction_tie_set(const Model& q, const History& h) {
  require(h.length() >= 1, Errc::index, "prediction needs at least one step");
  History prev = h.prefix(h.length() - 1);
  std::vector<double> row = conditional_observation(q, prev, h.action(h.length()));
  double best = *std::max_element(row.begin(), row.end());
  std::vector<Obs> ties;
  for (int o = 0; o < static_cast<int>(row.size()); ++o)
    if (row[o] == best) ties.push_back(o);
  return ties;
}

inline double UtilitySpec::eval(const History& h) const {
  switch (kind_) {
    case Kind::reward: {
      if (h.empty()) return 0.0;
      return codec_.reward_of(h.observation(h.length()), h.alphabets().observations);
    }
    case Kind::goal: {
      if (h.empty() || !goal_(h)) return 0.0;
      // achieved at |h| and never before: the goal pays out once
      for (int t = 1; t < h.length(); ++t)
        if (goal_(h.prefix(t))) return 0.0;
      return 1.0;
    }
    case Kind::prediction: {
      if (h.empty()) return 0.0;
      auto ties = prediction_tie_set(*model_, h);
      Obs got = h.observation(h.length());
      for (Obs o : ties)
        if (o == got) return 1.0;
      return 0.0;
    }
    case Kind::knowledge:
      return -history_probability(*model_, h);
    case Kind::model_based:
    case Kind::external:
      return fn_(h);
  }
  fail(Errc::kind, "unknown utility kind");
}

inline double utility_eval(const UtilitySpec& u, const History& h) { return u.eval(h); }

}  // namespace aglab
