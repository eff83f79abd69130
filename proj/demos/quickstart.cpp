// Walks through the main entry points on the two-user, fair-bias game.

#include <cstdio>

#include "cheaptalk/cheaptalk.hpp"

using namespace cheaptalk;

int main() {
  const auto pair = DistributionPair::equal_variance_normal(-1.0, 1.0, 1.0);
  const GameConfig game(2, 0.3, 0.5, pair);

  std::printf("PBE profiles at N=2, q+=1/2, p_H=0.3:");
  for (const auto& p : enumerate_pbe(game)) std::printf(" %s", label(p).c_str());
  std::printf("\n");

  const auto rule = best_response_rule(sc::SC1, game);
  for (int k = 0; k <= game.n_users(); ++k) std::printf("  SC.1 action a(%d) = %.6f\n", k, rule(k));

  std::printf("Bayesian loss   %.7f\n", bayesian_system_loss(game));
  std::printf("majority vote   %.7f\n", majority_vote_loss(game));
  std::printf("blind abandon   %.7f\n", abandon_scheme(game).loss);

  const GameConfig one = game.with_n_users(1);
  for (int t : {2, 3, 5}) {
    const auto s = solve_schedule(one, t);
    const auto first = s.actions({});
    std::printf("T=%d evolving loss %.7g  (a_L=%.4f, a_H=%.4f in period 1)\n", t, s.loss(), first.a_low,
                first.a_high);
  }
  std::printf("crossover at T=2: N <= %d\n", crossover_user_count(one, 2));

  SimulationOptions opts;
  opts.seed = 7;
  const auto rep = simulate_game(game, sc::SC1, rule, 200000, opts);
  std::printf("simulated cost %.5f +- %.5f (exact %.5f)\n", rep.cost.mean, rep.cost.std_error,
              expected_platform_cost(sc::SC1, rule, game));
}
