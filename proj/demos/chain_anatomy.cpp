// Derive the uniform-action chain of the two-state benchmark table and pull
// it apart: classes, period, stationary occupancy, long-run window
// frequencies; then decide a few statements over the three-element field.

#include <cstdio>

#include "aglab/logic.hpp"
#include "aglab/markov.hpp"

using namespace aglab;

int main() {
  auto q = table_4_1();
  MarkovChain mc = mdp_to_chain(*q);
  auto p = mc.matrix();
  auto classes = communicating_classes(p);
  std::printf("states: %d, communicating classes: %zu\n", mc.n_states, classes.classes.size());
  for (std::size_t c = 0; c < classes.classes.size(); ++c) {
    std::printf("  class %zu (%s): period %d\n", c, classes.essential[c] ? "essential" : "inessential",
                period(p, classes.classes[c]));
  }
  auto theta = stationary_distribution(p);
  std::printf("stationary occupancy:");
  for (double x : theta) std::printf(" %.6f", x);
  std::printf("\n");

  History pattern = History(Alphabets{2, 2}).extended(0, 1);
  std::printf("long-run frequency of playing a and seeing 1: %.6f\n", expected_frequency(*q, pattern));

  SeedStream s(9);
  History h = sample_history(*q, 100000, s);
  std::printf("empirical over 100000 uniform-action steps:    %.6f\n", subsequence_frequency(pattern, h));

  auto gf3 = logic::gf3();
  for (const char* stmt : {"forall x. exists y. (x + y = 0)", "exists x. (x * x = 2)"})
    std::printf("%-34s : %s\n", stmt, logic::decide(stmt, gf3) ? "true" : "false");
  return 0;
}
