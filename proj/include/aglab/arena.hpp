#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aglab/errors.hpp"
#include "aglab/rng.hpp"

namespace aglab::arena {

/// Match-pennies table-learner duel. The original experiment's constants are
/// the defaults; table sizes count cells, transfers move aligned blocks of
/// four cells.
struct ArenaConfig {
  int max_length = 5;         // longest history window kept in the tables
  int win_value = 2;          // blocks transferred per game, before caps
  int print_interval = 100;   // games between growth steps and samples
  long long max_count = 1000000000;
  int random_interval = 100;  // expected games between forced random plays
  double init_table = 0.2;    // initial fraction of table space in use
  double e_advantage = 1.0;   // evader's initial resource multiplier
  double growth_per_print = 0.01;

  void validate() const {
    require(max_length >= 2 && max_length <= 8, Errc::parameter, "max_length must lie in [2,8]");
    require(win_value >= 0, Errc::parameter, "win_value must be nonnegative");
    require(print_interval >= 1, Errc::parameter, "print_interval must be positive");
    require(max_count >= 1, Errc::parameter, "max_count must be positive");
    require(random_interval >= 1, Errc::parameter, "random_interval must be positive");
    require(init_table > 0.0 && init_table <= 1.0, Errc::parameter, "init_table must lie in (0,1]");
    require(e_advantage > 0.0, Errc::parameter, "e_advantage must be positive");
    require(growth_per_print >= 0.0, Errc::parameter, "growth rate must be nonnegative");
  }
};

/// Cells of history length n occupy offsets (4^n - 1)/3 ... (4^(n+1)-1)/3 - 1.
inline int length_to_size(int n) {
  require(n >= -1, Errc::parameter, "length_to_size needs n >= -1");
  return static_cast<int>(((1LL << (2 * (n + 1))) - 1) / 3);
}

enum class Role { predictor, evader };
enum class ArenaAlgorithm { count_compare = 1, clear_and_margin = 2 };

/// Count table over (predictor bit, evader bit) histories with availability
/// marks: negative cells are out of play; table_size counts in-play cells.
class LearnerTable {
 public:
  LearnerTable(const ArenaConfig& config, Role role) : config_(config), role_(role) {
    table_capacity_ = length_to_size(config.max_length) - 1;
    table_.assign(table_capacity_ + 1, 0);
    table_size_ = table_capacity_;
    size_to_length_.assign(table_capacity_ + 1, 0);
    for (int j = 0; j <= config.max_length; ++j)
      for (int i = length_to_size(j - 1); i < length_to_size(j) && i <= table_capacity_; ++i)
        size_to_length_[i] = j;
    record_masks_.assign(config.max_length + 1, 0);
    lookup_masks_.assign(config.max_length + 1, 0);
    for (int j = 0; j <= config.max_length; ++j) {
      record_masks_[j] = (1 << (2 * j)) - 1;
      lookup_masks_[j] = record_masks_[j] & ~3;  // lose the newest game's bits
    }
    if (role == Role::predictor) {
      self_select_ = 2;
      other_select_ = 1;
      one_ = 1;
      zero_ = 0;
    } else {
      self_select_ = 1;
      other_select_ = 2;
      one_ = 0;
      zero_ = 1;
    }
  }

  int table_size() const { return table_size_; }
  int capacity() const { return table_capacity_; }

  /// Record the finished-game windows, then choose the next symbol.
  int next_symbol(ArenaAlgorithm algorithm, std::uint32_t history, int history_length, SeedStream& stream) {
    if (algorithm == ArenaAlgorithm::count_compare)
      record_1(history, history_length);
    else
      record_2(history, history_length);

    if (stream.uniform() < 1.0 / config_.random_interval)
      return stream.uniform() > 0.5 ? one_ : zero_;

    std::uint32_t hist = history << 2;
    int hist_length = history_length + 1;
    if (hist_length >= 16) --hist_length;
    int max_len = std::min(config_.max_length, hist_length);

    if (algorithm == ArenaAlgorithm::count_compare) {
      for (int len = max_len; len >= 2; --len) {
        int position = static_cast<int>(hist & lookup_masks_[len]);
        int tp = table_position(len, position);
        if (table_[tp] < 0) continue;
        long long zeros = table_[tp] + table_[tp + self_select_];
        long long ones = table_[tp + other_select_] + table_[tp + self_select_ + other_select_];
        if (zeros == 0 && ones == 0) continue;
        return zeros > ones ? zero_ : one_;  // ties go to 'one'
      }
      return 0;  // no result: raw zero slightly favors the predictor
    }

    int margin = 0;
    int choice = 0;
    for (int len = max_len; len >= 2; --len) {
      int position = static_cast<int>(hist & lookup_masks_[len]);
      int tp = table_position(len, position);
      if (table_[tp] < 0) continue;
      long long zeros = table_[tp] + table_[tp + self_select_];
      long long ones = table_[tp + other_select_] + table_[tp + self_select_ + other_select_];
      if (zeros == 0 && ones == 0) continue;
      require(!(zeros > 0 && ones > 0), Errc::parameter,
              "clearing keeps opposite-opponent counts at zero");
      if (zeros > ones) {
        int m = static_cast<int>(zeros - ones) + len;
        if (m > margin) {
          margin = m;
          choice = zero_;
        }
      } else {
        int m = static_cast<int>(ones - zeros) + len;
        if (m > margin) {
          margin = m;
          choice = one_;
        }
      }
    }
    if (margin > 0) return choice;
    return 0;
  }

  /// Add n blocks of four cells at the growth frontier; consumes one uniform
  /// variate per level visited.
  void add_blocks(int n, SeedStream& stream) {
    if (n > (table_capacity_ - table_size_) / 4) n = (table_capacity_ - table_size_) / 4;
    int left = n;
    while (left > 0) {
      int level = size_to_length_[table_size_ + 4];
      int lo = length_to_size(level - 1) - 1;
      int hi = length_to_size(level) - 1;
      int len = (hi - lo) / 4;
      int unused = (hi - table_size_) / 4;
      int m = std::min(unused, left);
      int k = static_cast<int>(len * stream.uniform());
      while (m > 0) {
        if (k >= len) k -= len;
        int j = lo + 4 * k;
        if (table_[j + 1] < 0) {
          table_[j + 1] = 0;
          table_[j + 2] = 0;
          table_[j + 3] = 0;
          table_[j + 4] = 0;
          --m;
          --left;
          table_size_ += 4;
        }
        ++k;
      }
    }
  }

  /// Remove n blocks from the frontier; mirrors add_blocks.
  void remove_blocks(int n, SeedStream& stream) {
    if (n > table_size_ / 4) n = table_size_ / 4;
    int left = n;
    while (left > 0) {
      int level = size_to_length_[table_size_];
      int lo = length_to_size(level - 1) - 1;
      int hi = length_to_size(level) - 1;
      int len = (hi - lo) / 4;
      int used = (table_size_ - lo) / 4;
      int m = std::min(used, left);
      int k = static_cast<int>(len * stream.uniform());
      while (m > 0) {
        if (k >= len) k -= len;
        int j = lo + 4 * k;
        if (table_[j + 1] >= 0) {
          table_[j + 1] = -1;
          table_[j + 2] = -1;
          table_[j + 3] = -1;
          table_[j + 4] = -1;
          --m;
          --left;
          table_size_ -= 4;
        }
        ++k;
      }
    }
  }

  /// For the clearing-algorithm invariant: no cell group may hold positive
  /// counts for both opponent symbols.
  bool opposite_counts_clear() const {
    for (int len = 2; len <= config_.max_length; ++len) {
      int base = length_to_size(len - 1);
      int groups = (length_to_size(len) - base) / 4;
      for (int g = 0; g < groups; ++g) {
        int tp = base + 4 * g;
        if (table_[tp] < 0) continue;
        long long zeros = table_[tp] + table_[tp + self_select_];
        long long ones = table_[tp + other_select_] + table_[tp + self_select_ + other_select_];
        if (zeros > 0 && ones > 0) return false;
      }
    }
    return true;
  }

 private:
  int table_position(int len, int position) const { return length_to_size(len - 1) + position; }

  void record_1(std::uint32_t history, int history_length) {
    int max_len = std::min(config_.max_length, history_length);
    for (int len = 2; len <= max_len; ++len) {
      int position = static_cast<int>(history & record_masks_[len]);
      int tp = table_position(len, position);
      if (table_[tp] < 0) continue;
      ++table_[tp];
      if (table_[tp] > config_.max_count) {
        int bp = table_position(len, position & lookup_masks_[len]);
        table_[bp] /= 2;
        table_[bp + 1] /= 2;
        table_[bp + 2] /= 2;
        table_[bp + 3] /= 2;
      }
    }
  }

  void record_2(std::uint32_t history, int history_length) {
    int max_len = std::min(config_.max_length, history_length);
    for (int len = 2; len <= max_len; ++len) {
      int position = static_cast<int>(history & record_masks_[len]);
      int tp = table_position(len, position);
      if (table_[tp] < 0) continue;
      ++table_[tp];
      // clear the cells recording the opposite symbol from the opponent
      int po = table_position(len, position ^ other_select_);
      int pos = table_position(len, position ^ 3);
      if (table_[po] >= 0) table_[po] = 0;
      if (table_[pos] >= 0) table_[pos] = 0;
    }
  }

  ArenaConfig config_;
  Role role_;
  int table_capacity_ = 0;
  int table_size_ = 0;
  std::vector<long long> table_;
  std::vector<int> size_to_length_;
  std::vector<std::uint32_t> record_masks_;
  std::vector<std::uint32_t> lookup_masks_;
  int self_select_ = 0, other_select_ = 0, one_ = 0, zero_ = 0;
};

struct Trajectory {
  std::vector<int> predictor_sizes;  // sampled once per print interval
  std::vector<int> evader_sizes;
  long long predictor_wins = 0;
  long long evader_wins = 0;
  int final_predictor_size = 0;
  int final_evader_size = 0;
};

/// One duel. Per game the draw order is: predictor symbol (random-play test,
/// optional symbol draw), evader symbol, then transfer block placement; each
/// growth step draws per level visited.
class ArenaEngine {
 public:
  ArenaEngine(const ArenaConfig& config, ArenaAlgorithm algorithm, std::uint64_t seed)
      : config_(config),
        algorithm_(algorithm),
        stream_(seed),
        predictor_(config, Role::predictor),
        evader_(config, Role::evader) {
    config.validate();
    // initial allotment: both sides start with init_table of the usable
    // blocks, the evader scaled by its advantage
    int usable_blocks = (predictor_.capacity() - 4) / 4;
    int r = static_cast<int>(config.init_table * usable_blocks);
    int er = static_cast<int>(config.e_advantage * r);
    int pr = r + r - er;
    predictor_.remove_blocks(usable_blocks - pr, stream_);
    evader_.remove_blocks(usable_blocks - er, stream_);
  }

  const LearnerTable& predictor() const { return predictor_; }
  const LearnerTable& evader() const { return evader_; }

  /// Play one game; true when the predictor wins (symbols match).
  bool play_one() {
    int px = predictor_.next_symbol(algorithm_, history_, history_length_, stream_);
    int ex = evader_.next_symbol(algorithm_, history_, history_length_, stream_);
    history_ = (history_ << 2) | static_cast<std::uint32_t>(px + px) | static_cast<std::uint32_t>(ex);
    if (history_length_ < 16) ++history_length_;
    int n = config_.win_value;
    if (px == ex) {
      n = std::min(n, (predictor_.capacity() - predictor_.table_size()) / 4);
      n = std::min(n, evader_.table_size() / 4);
      predictor_.add_blocks(n, stream_);
      evader_.remove_blocks(n, stream_);
      return true;
    }
    n = std::min(n, (evader_.capacity() - evader_.table_size()) / 4);
    n = std::min(n, predictor_.table_size() / 4);
    evader_.add_blocks(n, stream_);
    predictor_.remove_blocks(n, stream_);
    return false;
  }

  void grow_tables() {
    predictor_.add_blocks(static_cast<int>(config_.growth_per_print * predictor_.table_size() / 4), stream_);
    evader_.add_blocks(static_cast<int>(config_.growth_per_print * evader_.table_size() / 4), stream_);
  }

  Trajectory run(long long n_games) {
    require(n_games >= 1, Errc::parameter, "need at least one game");
    Trajectory traj;
    long long played = 0;
    while (played < n_games) {
      long long batch = std::min<long long>(config_.print_interval, n_games - played);
      for (long long i = 0; i < batch; ++i) {
        if (play_one())
          ++traj.predictor_wins;
        else
          ++traj.evader_wins;
      }
      played += batch;
      grow_tables();
      traj.predictor_sizes.push_back(predictor_.table_size());
      traj.evader_sizes.push_back(evader_.table_size());
    }
    traj.final_predictor_size = predictor_.table_size();
    traj.final_evader_size = evader_.table_size();
    return traj;
  }

 private:
  ArenaConfig config_;
  ArenaAlgorithm algorithm_;
  SeedStream stream_;
  LearnerTable predictor_;
  LearnerTable evader_;
  std::uint32_t history_ = 0;
  int history_length_ = 0;
};

inline Trajectory play_games(const ArenaConfig& config, ArenaAlgorithm algorithm, long long n_games,
                             std::uint64_t seed) {
  ArenaEngine engine(config, algorithm, seed);
  return engine.run(n_games);
}

enum class ArenaOutcome { monopolized_by_predictor, monopolized_by_evader, contested };

/// Monopoly verdict: one side holds at least `fraction` of the combined
/// space at the final sample and at every sample over the last tenth of the
/// run.
inline ArenaOutcome instability_metric(const Trajectory& traj, double monopoly_fraction = 0.95) {
  require(!traj.predictor_sizes.empty(), Errc::empty_input, "empty trajectory");
  std::size_t n = traj.predictor_sizes.size();
  std::size_t tail_start = n - std::max<std::size_t>(1, n / 10);
  bool predictor_holds = true, evader_holds = true;
  for (std::size_t i = tail_start; i < n; ++i) {
    double total = traj.predictor_sizes[i] + traj.evader_sizes[i];
    if (total <= 0.0) {
      predictor_holds = evader_holds = false;
      break;
    }
    predictor_holds = predictor_holds && traj.predictor_sizes[i] >= monopoly_fraction * total;
    evader_holds = evader_holds && traj.evader_sizes[i] >= monopoly_fraction * total;
  }
  if (predictor_holds) return ArenaOutcome::monopolized_by_predictor;
  if (evader_holds) return ArenaOutcome::monopolized_by_evader;
  return ArenaOutcome::contested;
}

inline std::string to_string(ArenaOutcome outcome) {
  switch (outcome) {
    case ArenaOutcome::monopolized_by_predictor:
      return "monopolized-by-predictor";
    case ArenaOutcome::monopolized_by_evader:
      return "monopolized-by-evader";
    case ArenaOutcome::contested:
      return "contested";
  }
  return "?";
}

}  // namespace aglab::arena
