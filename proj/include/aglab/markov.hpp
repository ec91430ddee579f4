#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "aglab/envmodel.hpp"
#include "aglab/errors.hpp"
#include "aglab/history.hpp"
#include "aglab/rng.hpp"

namespace aglab {

/// State-to-state chain with optional (action, observation) labels per
/// transition, as induced by a controlled model under uniformly random
/// action inputs.
struct MarkovChain {
  struct Arc {
    int from;
    int to;
    Action action;  // -1 when unlabeled
    Obs obs;        // -1 when unlabeled
    double prob;
  };

  int n_states = 0;
  int start = 0;
  std::vector<Arc> arcs;

  /// Collapsed stochastic matrix P(s, s') with labels summed out.
  std::vector<std::vector<double>> matrix() const {
    std::vector<std::vector<double>> p(n_states, std::vector<double>(n_states, 0.0));
    for (const auto& a : arcs) p[a.from][a.to] += a.prob;
    return p;
  }

  double labeled_prob(int from, int to, Action action, Obs obs) const {
    double total = 0.0;
    for (const auto& a : arcs)
      if (a.from == from && a.to == to && a.action == action && a.obs == obs) total += a.prob;
    return total;
  }

  void validate() const {
    std::vector<double> row_sum(n_states, 0.0);
    for (const auto& a : arcs) {
      require(a.prob >= 0.0, Errc::normalization, "negative chain probability");
      row_sum[a.from] += a.prob;
    }
    for (double s : row_sum)
      require(std::abs(s - 1.0) <= 1e-9, Errc::normalization, "chain row must sum to 1");
  }

  static MarkovChain from_matrix(const std::vector<std::vector<double>>& p, int start = 0) {
    MarkovChain mc;
    mc.n_states = static_cast<int>(p.size());
    mc.start = start;
    for (int i = 0; i < mc.n_states; ++i)
      for (int j = 0; j < mc.n_states; ++j)
        if (p[i][j] > 0.0) mc.arcs.push_back({i, j, -1, -1, p[i][j]});
    mc.validate();
    return mc;
  }
};

/// Chain of a model driven by uniformly random actions: the transition
/// s -> (s', a, o) has probability row(s,a)[s',o] / |A|.
inline MarkovChain mdp_to_chain(const Model& q) {
  const Dynamics& d = q.dynamics();
  MarkovChain mc;
  mc.n_states = d.n_states;
  mc.start = d.start;
  for (int s = 0; s < d.n_states; ++s)
    for (Action a = 0; a < d.n_actions; ++a)
      for (const auto& t : d.row(s, a))
        if (t.prob > 0.0) mc.arcs.push_back({s, t.next, a, t.obs, t.prob / d.n_actions});
  mc.validate();
  return mc;
}

/// State partition into communicating classes with essential flags.
struct ClassPartition {
  std::vector<std::vector<int>> classes;
  std::vector<bool> essential;       // per class
  std::vector<int> class_of_state;   // per state
};

/// Strongly connected components of the positive-probability transition
/// graph; a class is essential iff no positive-probability arc leaves it.
inline ClassPartition communicating_classes(const std::vector<std::vector<double>>& p) {
  int n = static_cast<int>(p.size());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (p[i][j] > 0.0) adj[i].push_back(j);

  // Tarjan SCC, iterative
  std::vector<int> index(n, -1), low(n, 0), on_stack(n, 0), comp(n, -1);
  std::vector<int> stack;
  int next_index = 0, n_comp = 0;
  struct Frame {
    int v;
    std::size_t child;
  };
  std::vector<std::vector<int>> classes;
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& f = frames.back();
      if (f.child < adj[f.v].size()) {
        int w = adj[f.v][f.child++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          std::vector<int> cls;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = n_comp;
            cls.push_back(w);
            if (w == f.v) break;
          }
          std::sort(cls.begin(), cls.end());
          classes.push_back(std::move(cls));
          ++n_comp;
        }
        int v = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }

  ClassPartition out;
  out.classes = std::move(classes);
  out.class_of_state = comp;
  out.essential.assign(out.classes.size(), true);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (p[i][j] > 0.0 && comp[i] != comp[j]) out.essential[comp[i]] = false;
  return out;
}

/// Period of a communicating class: gcd of return times, computed as the gcd
/// of (level(u) + 1 - level(v)) over intra-class arcs from a BFS labeling.
inline int period(const std::vector<std::vector<double>>& p, const std::vector<int>& cls) {
  require(!cls.empty(), Errc::parameter, "empty class");
  int n = static_cast<int>(p.size());
  std::vector<int> level(n, -1);
  std::vector<char> in_class(n, 0);
  for (int s : cls) in_class[s] = 1;
  std::vector<int> queue{cls[0]};
  level[cls[0]] = 0;
  std::size_t head = 0;
  int g = 0;
  while (head < queue.size()) {
    int u = queue[head++];
    for (int v = 0; v < n; ++v) {
      if (p[u][v] <= 0.0 || !in_class[v]) continue;
      if (level[v] == -1) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
      g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
    }
  }
  require(g > 0, Errc::undefined_period, "state never returns to itself");
  return g;
}

inline constexpr double kStationaryTolerance = 1e-9;

/// Unique stationary distribution; errors unless exactly one essential
/// communicating class exists. States outside that class receive 0.
inline std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& p) {
  auto partition = communicating_classes(p);
  int essential_index = -1;
  for (std::size_t c = 0; c < partition.classes.size(); ++c) {
    if (!partition.essential[c]) continue;
    require(essential_index == -1, Errc::non_unique_stationary,
            "multiple essential classes: no unique stationary distribution");
    essential_index = static_cast<int>(c);
  }
  require(essential_index != -1, Errc::non_unique_stationary, "no essential class");

  const auto& cls = partition.classes[essential_index];
  int m = static_cast<int>(cls.size());
  // Solve theta^T P|class = theta^T with the normalization row replacing the
  // last equation; Gaussian elimination with partial pivoting.
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  for (int col = 0; col < m; ++col) {
    for (int row = 0; row < m; ++row) a[col][row] = p[cls[row]][cls[col]];
    a[col][col] -= 1.0;
  }
  for (int row = 0; row < m; ++row) a[m - 1][row] = 1.0;
  a[m - 1][m] = 1.0;

  for (int col = 0; col < m; ++col) {
    int pivot = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    require(std::abs(a[col][col]) > 1e-14, Errc::non_unique_stationary, "singular stationary system");
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (int c2 = col; c2 <= m; ++c2) a[r][c2] -= factor * a[col][c2];
    }
  }
  std::vector<double> theta(p.size(), 0.0);
  for (int i = 0; i < m; ++i) theta[cls[i]] = a[i][m] / a[i][i];
  for (double& x : theta)
    if (x < 0.0 && x > -kStationaryTolerance) x = 0.0;
  return theta;
}

/// Cesaro-averaged power iteration; the cross-check route for the stationary
/// distribution, robust to period > 1.
inline std::vector<double> stationary_by_power_iteration(const std::vector<std::vector<double>>& p,
                                                         int iterations = 20000) {
  int n = static_cast<int>(p.size());
  std::vector<double> dist(n, 1.0 / n), average(n, 0.0);
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> next(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) next[j] += dist[i] * p[i][j];
    dist = std::move(next);
    if (it >= iterations / 2)
      for (int i = 0; i < n; ++i) average[i] += dist[i];
  }
  double total = std::accumulate(average.begin(), average.end(), 0.0);
  for (double& x : average) x /= total;
  return average;
}

/// Proportion of the |h| - |h'| + 1 aligned windows of h equal to h';
/// zero when h is shorter than h'.
inline double subsequence_frequency(const History& pattern, const History& h) {
  int n = h.length(), m = pattern.length();
  if (n < m) return 0.0;
  if (m == 0) return 1.0;
  int count = 0;
  for (int i = 0; i + m <= n; ++i) {
    bool match = true;
    for (int j = 1; j <= m; ++j)
      if (h.action(i + j) != pattern.action(j) || h.observation(i + j) != pattern.observation(j)) {
        match = false;
        break;
      }
    count += match;
  }
  return static_cast<double>(count) / (n - m + 1);
}

/// Long-run expected window frequency of h' under the chain of q:
/// sum_s theta(s) * P(h' | s, MC_q), where P(h' | s, .) is the probability
/// the chain emits the labeled pairs of h' over its next |h'| transitions.
inline double expected_frequency(const Model& q, const History& pattern) {
  MarkovChain mc = mdp_to_chain(q);
  auto p = mc.matrix();
  auto theta = stationary_distribution(p);

  double total = 0.0;
  for (int s = 0; s < mc.n_states; ++s) {
    if (theta[s] == 0.0) continue;
    std::vector<double> cur(mc.n_states, 0.0);
    cur[s] = 1.0;
    for (int j = 1; j <= pattern.length(); ++j) {
      std::vector<double> next(mc.n_states, 0.0);
      for (const auto& arc : mc.arcs)
        if (arc.action == pattern.action(j) && arc.obs == pattern.observation(j))
          next[arc.to] += cur[arc.from] * arc.prob;
      cur = std::move(next);
    }
    total += theta[s] * std::accumulate(cur.begin(), cur.end(), 0.0);
  }
  return total;
}

/// Monte Carlo estimates of the mean and standard deviation of a history
/// function under two models at history length n, with the empirical
/// ingredients of the model-discrimination premise.
struct DiscriminationReport {
  int n = 0;
  int samples = 0;
  double mean_a = 0.0, mean_b = 0.0;
  double sd_a = 0.0, sd_b = 0.0;
  double se_a = 0.0, se_b = 0.0;
  double half_n_sd_a = 0.0, half_n_sd_b = 0.0;
  bool premise_separated = false;
  bool premise_shrinking = false;
  bool premise_holds = false;
};

template <typename F>
DiscriminationReport discrimination_stats(const Model& q, const Model& q_alt, F&& f, int n, int samples,
                                          std::uint64_t seed) {
  require(n >= 1 && samples >= 2, Errc::parameter, "need n >= 1 and samples >= 2");
  auto batch = [&](const Model& model, int length, std::uint64_t s, double& mean, double& sd) {
    SeedStream stream(s);
    std::vector<double> vals(samples);
    for (int i = 0; i < samples; ++i) vals[i] = f(sample_history(model, length, stream));
    mean = std::accumulate(vals.begin(), vals.end(), 0.0) / samples;
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    sd = std::sqrt(ss / samples);
  };

  DiscriminationReport r;
  r.n = n;
  r.samples = samples;
  batch(q, n, seed, r.mean_a, r.sd_a);
  batch(q_alt, n, seed + 1, r.mean_b, r.sd_b);
  double dummy_mean;
  batch(q, std::max(1, n / 2), seed + 2, dummy_mean, r.half_n_sd_a);
  batch(q_alt, std::max(1, n / 2), seed + 3, dummy_mean, r.half_n_sd_b);
  r.se_a = r.sd_a / std::sqrt(static_cast<double>(samples));
  r.se_b = r.sd_b / std::sqrt(static_cast<double>(samples));
  r.premise_separated = std::abs(r.mean_a - r.mean_b) > 3.0 * (r.se_a + r.se_b);
  r.premise_shrinking = r.sd_a <= r.half_n_sd_a + 3.0 * r.se_a && r.sd_b <= r.half_n_sd_b + 3.0 * r.se_b;
  r.premise_holds = r.premise_separated && r.premise_shrinking;
  return r;
}

}  // namespace aglab
