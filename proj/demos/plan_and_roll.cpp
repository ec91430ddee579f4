// Plan against the hidden-cycle environment and watch the utility track the
// observation noise rate.

#include <cstdio>

#include "aglab/experiments.hpp"

using namespace aglab;

int main() {
  auto env = delusion_env_6_3(0.99);
  auto util = delusion_utility_6_3(env);

  // one planned decision from a short warmup history
  SeedStream stream(5);
  History h(env->alphabets());
  int state = env->dynamics().start;
  for (int t = 0; t < 8; ++t) {
    auto [next, obs] = simulate_step(*env, state, 0, stream);
    h = h.extended(0, obs);
    state = next;
  }
  PlannerUtility pu = util.planner_utility();
  Action chosen = best_action(*env, pu, DiscountSpec::geometric(0.9), h, 2);
  std::printf("planned action bits (a b c d): %d %d %d %d\n", (chosen >> 3) & 1, (chosen >> 2) & 1,
              (chosen >> 1) & 1, chosen & 1);

  // a long run, planner in the loop at every step
  auto run = experiments::run_delusion_63(0.99, 5000, 5, /*force_rewrite=*/false);
  std::printf("5000 planned steps: mean utility %.4f, rewrite decisions %lld\n", run.mean_utility,
              run.rewrite_decisions);

  auto forced = experiments::run_delusion_63(0.99, 5000, 5, /*force_rewrite=*/true);
  std::printf("same run with the rewrite gate forced open: mean utility %.4f\n", forced.mean_utility);
  return 0;
}
