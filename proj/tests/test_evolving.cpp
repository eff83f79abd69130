#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "cheaptalk/equilibrium.hpp"
#include "cheaptalk/evolving.hpp"
#include "oracles/closed_forms.hpp"

using namespace cheaptalk;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

GameConfig normal_game(double p, double ml, double mh, double var) {
  return {1, p, 0.5, DistributionPair::equal_variance_normal(ml, mh, var)};
}

const GameConfig kBase = normal_game(0.3, -1, 1, 1);

}  // namespace

TEST_CASE("schedule sums for equal Normals", "[evolving]") {
  const auto s = solve_schedule(kBase, 2);
  CHECK_THAT(s.s_alpha(), WithinRel(1 + std::exp(4.0), 1e-13));
  CHECK_THAT(s.s_beta(), WithinRel(1 + std::exp(4.0), 1e-13));
  CHECK_THAT(s.loss(), WithinAbs(0.1267387777, 1e-9));
  CHECK_THAT(s.lambda_low(), WithinAbs(0.0380216, 1e-6));
  CHECK_THAT(s.lambda_high(), WithinAbs(0.0887171, 1e-6));
  for (int t = 2; t <= 10; ++t) {
    const auto st = solve_schedule(kBase, t);
    CHECK(st.s_alpha() >= t);
    CHECK(st.s_beta() >= t);
    CHECK(st.lambda_low() > 0);
    CHECK(st.lambda_high() > 0);
  }
}

TEST_CASE("degenerate horizons", "[evolving]") {
  CHECK_THROWS_AS(solve_schedule(kBase, 1), DegenerateHorizon);
  const GameConfig same(1, 0.3, 0.5, DistributionPair::equal_variance_normal(0, 0, 1));
  CHECK_THROWS_AS(solve_schedule(same, 3), DegenerateHorizon);
  CHECK_THROWS_AS(solve_schedule(kBase.with_n_users(2), 3), InvalidConfig);
  CHECK_THAT(evolving_loss(kBase, 1), WithinAbs(0.84, 1e-12));
}

TEST_CASE("divergent squared ratios propagate", "[evolving]") {
  const GameConfig g(1, 0.3, 0.5, DistributionPair(StateDistribution::normal(-1, 1), StateDistribution::normal(1, 2.5)));
  CHECK_THROWS_AS(solve_schedule(g, 2), DivergentIntegral);
}

TEST_CASE("normalized solution matches the raw-sum formulas", "[evolving][oracle]") {
  for (double p : {0.1, 0.3, 0.6, 0.9})
    for (int t : {2, 3, 5})
      for (double alpha : {1.3, 2.0, 7.5})
        for (double beta : {1.1, 3.0, 12.0}) {
          const auto pair = DistributionPair::equal_variance_normal(-0.5, 1.25, 1.0);
          const auto s = solve_schedule_from_sums(pair, p, t, detail::log_geometric_sum(std::log(alpha), t),
                                                  detail::log_geometric_sum(std::log(beta), t));
          const auto raw = oracle::raw_schedule(p, 1.25, -0.5, alpha, beta, t);
          CHECK_THAT(s.lambda_low(), WithinRel(raw.lambda_low, 1e-10));
          CHECK_THAT(s.lambda_high(), WithinRel(raw.lambda_high, 1e-10));
          CHECK_THAT(s.loss(), WithinRel(raw.loss, 1e-10));
        }
}

TEST_CASE("schedule loss and IC sums from likelihood-ratio moments", "[evolving][oracle]") {
  for (double p : {0.2, 0.5, 0.7})
    for (int t : {2, 3, 4})
      for (double alpha : {1.5, 4.0})
        for (double beta : {1.2, 6.0}) {
          const auto pair = DistributionPair::equal_variance_normal(-1, 0.5, 1.0);
          const auto s = solve_schedule_from_sums(pair, p, t, detail::log_geometric_sum(std::log(alpha), t),
                                                  detail::log_geometric_sum(std::log(beta), t));
          const auto m = oracle::evolving_moments(p, 0.5, -1, alpha, beta, t, s.lambda_low(), s.lambda_high());
          CHECK_THAT(m.loss, WithinRel(s.loss(), 1e-10));
          // Both binding constraints hold with equality.
          CHECK_THAT(m.ic_low, WithinAbs(0.0, 1e-10));
          CHECK_THAT(m.ic_high, WithinAbs(0.0, 1e-10));
        }
}

TEST_CASE("general loss agrees with the Normal closed form", "[evolving]") {
  CHECK_THAT(evolving_loss_normal(kBase, 2), WithinRel(solve_schedule(kBase, 2).loss(), 1e-9));
  for (double d : {0.5, 1.0, 2.0, 3.0})
    for (double sigma : {0.7, 1.0, 1.8})
      for (double p : {0.1, 0.3, 0.5, 0.9})
        for (int t : {2, 3, 6, 12}) {
          const auto g = normal_game(p, -d / 2, d / 2, sigma * sigma);
          INFO("d=" << d << " sigma=" << sigma << " p=" << p << " T=" << t);
          CHECK_THAT(evolving_loss(g, t), WithinRel(evolving_loss_normal(g, t), 1e-9));
        }
}

TEST_CASE("evolving loss decreases in the horizon and the gap", "[evolving]") {
  double prev = 0.84;
  for (int t = 2; t <= 12; ++t) {
    const double l = evolving_loss(kBase, t);
    CHECK(l < prev);
    CHECK(l < abandon_scheme(kBase).loss);
    prev = l;
  }
  CHECK(evolving_loss(kBase, 20) < 1e-6);
  double prev_d = 1e9;
  for (double d : {2.0, 5.0, 10.0}) {
    const double l = evolving_loss(normal_game(0.3, 0, d, 1), 3);
    CHECK(l < prev_d);
    prev_d = l;
  }
  CHECK(prev_d < 1e-12);
  CHECK(evolving_loss_normal(0.3, 0.0, 1.0, 4) == 0.0);
}

TEST_CASE("non-Normal families give a finite loss below abandoning", "[evolving]") {
  for (Family f : {Family::Laplace, Family::Logistic}) {
    const GameConfig g(1, 0.3, 0.5, DistributionPair({f, -1, 1}, {f, 1, 1.5}));
    double prev = 1e9;
    for (int t = 2; t <= 8; ++t) {
      const double l = evolving_loss(g, t);
      CHECK(std::isfinite(l));
      CHECK(l > 0);
      CHECK(l < abandon_scheme(g).loss);
      CHECK(l < prev);
      prev = l;
    }
  }
}

TEST_CASE("long horizons stay finite in log space", "[evolving]") {
  const auto g = normal_game(0.3, -3, 3, 1);
  const auto s = solve_schedule(g, 200);
  CHECK(std::isfinite(s.log_s_alpha()));
  CHECK(s.loss() >= 0);
  CHECK(std::isfinite(s.loss()));
  CHECK(std::isfinite(evolving_loss_normal(g, 200)));
}

TEST_CASE("commitment actions stay strictly inside the means", "[evolving]") {
  for (int t : {2, 4}) {
    const auto s = solve_schedule(kBase, t);
    const auto first = commitment_actions(s, {});
    CHECK_THAT(first.a_low, WithinAbs(-1 + (s.lambda_high() + s.lambda_low()) / (2 * 0.7), 1e-15));
    const double mid[] = {0.0};
    CHECK_THAT(s.actions(mid).a_low, WithinAbs(first.a_low, 1e-15));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10000; ++i) {
      const auto& d = i % 2 ? kBase.pair().high() : kBase.pair().low();
      std::vector<double> h(static_cast<std::size_t>(t - 1));
      for (double& x : h) x = sample(d, rng);
      const auto a = s.actions(h);
      REQUIRE(a.a_low > -1.0);
      REQUIRE(a.a_high < 1.0);
    }
  }
  const auto s = solve_schedule(kBase, 30);
  std::vector<double> favorable(29, 1.0);
  CHECK(s.actions(favorable).a_high > 1 - 1e-12);
  CHECK(s.actions(favorable).a_high <= 1.0);
}

TEST_CASE("crossover user count", "[evolving]") {
  CHECK_THAT(crossover_bound(kBase, 2), WithinAbs(4.304, 1e-3));
  CHECK(crossover_user_count(kBase, 2) == 4);
  double prev = 0;
  for (int t = 2; t <= 6; ++t) {
    const double b = crossover_bound(kBase, t);
    CHECK(b > prev);
    prev = b;
  }
  CHECK(crossover_bound(0.3, 0.0, 1.0, 3) == 0.0);
  for (int t = 2; t <= 6; ++t) {
    const int n_star = crossover_user_count(kBase, t);
    for (int n = 1; n <= 25; ++n) {
      const double bayes = fair_split_loss(n, 0.3, 2.0);
      CHECK((evolving_loss(kBase, t) < bayes) == (n <= n_star));
    }
  }
  const GameConfig lap(1, 0.3, 0.5, DistributionPair(StateDistribution::laplace(-1, 1), StateDistribution::laplace(1, 1)));
  CHECK_THROWS_AS(crossover_user_count(lap, 2), InvalidConfig);
}
