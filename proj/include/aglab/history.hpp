#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aglab/errors.hpp"

namespace aglab {

using Action = int;
using Obs = int;

/// Pair of finite symbol alphabets an experiment is declared over.
struct Alphabets {
  int actions = 1;
  int observations = 1;

  bool operator==(const Alphabets&) const = default;
};

/// Alternating action/observation sequence. Time is 1-based; the pair at
/// time i is (action(i), observation(i)) and the empty history has length 0.
class History {
 public:
  History() = default;
  explicit History(Alphabets ab) : ab_(ab) {
    require(ab.actions >= 1 && ab.observations >= 1, Errc::parameter, "alphabets must be nonempty");
  }

  const Alphabets& alphabets() const { return ab_; }
  int length() const { return static_cast<int>(pairs_.size()); }
  bool empty() const { return pairs_.empty(); }

  Action action(int t) const { return pairs_[check_time(t)].first; }
  Obs observation(int t) const { return pairs_[check_time(t)].second; }

  /// hao extension; validates both symbols against the alphabets.
  History extended(Action a, Obs o) const {
    require(a >= 0 && a < ab_.actions, Errc::alphabet_violation,
            "action " + std::to_string(a) + " outside alphabet of size " + std::to_string(ab_.actions));
    require(o >= 0 && o < ab_.observations, Errc::alphabet_violation,
            "observation " + std::to_string(o) + " outside alphabet of size " + std::to_string(ab_.observations));
    History h = *this;
    h.pairs_.emplace_back(a, o);
    return h;
  }

  History prefix(int t) const {
    require(t >= 0 && t <= length(), Errc::index, "prefix length out of range");
    History h(ab_);
    h.pairs_.assign(pairs_.begin(), pairs_.begin() + t);
    return h;
  }

  bool is_prefix_of(const History& other) const {
    if (ab_ != other.ab_ || length() > other.length()) return false;
    for (int i = 0; i < length(); ++i)
      if (pairs_[i] != other.pairs_[i]) return false;
    return true;
  }

  bool operator==(const History&) const = default;

 private:
  int check_time(int t) const {
    require(t >= 1 && t <= length(), Errc::index, "time index out of range");
    return t - 1;
  }

  Alphabets ab_;
  std::vector<std::pair<Action, Obs>> pairs_;
};

inline History make_history(Alphabets ab, std::initializer_list<std::pair<Action, Obs>> pairs) {
  History h(ab);
  for (auto [a, o] : pairs) h = h.extended(a, o);
  return h;
}

/// History whose actions carry a stochastic-choice flag. The projection y()
/// drops the flags; x() conceals flagged actions behind the distinguished
/// symbol a^s, which is encoded as index |A| in an alphabet of size |A|+1.
class FlaggedHistory {
 public:
  FlaggedHistory() = default;
  explicit FlaggedHistory(Alphabets ab) : ab_(ab) {}

  const Alphabets& alphabets() const { return ab_; }
  int length() const { return static_cast<int>(entries_.size()); }

  Action action(int t) const { return entries_[check_time(t)].action; }
  bool flagged(int t) const { return entries_[check_time(t)].stochastic; }
  Obs observation(int t) const { return entries_[check_time(t)].obs; }

  FlaggedHistory extended(Action a, bool stochastic, Obs o) const {
    require(a >= 0 && a < ab_.actions, Errc::alphabet_violation, "action outside alphabet");
    require(o >= 0 && o < ab_.observations, Errc::alphabet_violation, "observation outside alphabet");
    FlaggedHistory h = *this;
    h.entries_.push_back({a, stochastic, o});
    return h;
  }

  FlaggedHistory prefix(int t) const {
    require(t >= 0 && t <= length(), Errc::index, "prefix length out of range");
    FlaggedHistory h(ab_);
    h.entries_.assign(entries_.begin(), entries_.begin() + t);
    return h;
  }

  /// y(h): forget which actions were stochastic.
  History y() const {
    History h(ab_);
    for (const auto& e : entries_) h = h.extended(e.action, e.obs);
    return h;
  }

  /// x(h): replace flagged actions by a^s (= index |A|).
  History x() const {
    History h(Alphabets{ab_.actions + 1, ab_.observations});
    for (const auto& e : entries_) h = h.extended(e.stochastic ? ab_.actions : e.action, e.obs);
    return h;
  }

 private:
  struct Entry {
    Action action;
    bool stochastic;
    Obs obs;
  };

  int check_time(int t) const {
    require(t >= 1 && t <= length(), Errc::index, "time index out of range");
    return t - 1;
  }

  Alphabets ab_;
  std::vector<Entry> entries_;
};

}  // namespace aglab
