// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cheaptalk/cheaptalk.hpp"
#include "oracles/closed_forms.hpp"

using namespace cheaptalk;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) why << what;
    ok = ok && cond;
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream s;
      s.precision(12);
      s << what << ": got " << got << ", want " << want;
      expect(false, s.str());
    }
  }
  void rel(double got, double want, double tol, const std::string& what) {
    near(got, want, tol * std::max(1.0, std::abs(want)), what);
  }
};

GameConfig normal_game(int n, double p, double q, double ml = -1, double mh = 1, double vl = 1, double vh = 1) {
  return {n, p, q, DistributionPair(StateDistribution::normal(ml, vl), StateDistribution::normal(mh, vh))};
}

std::set<int> pbe_set(const GameConfig& g) {
  std::set<int> s;
  for (const auto& p : enumerate_pbe(g)) s.insert(sc_index(p));
  return s;
}

void benchmarks(Check& c) {
  const auto g = normal_game(2, 0.3, 0.5);
  c.near(abandon_scheme(g).loss, 0.84, 1e-12, "babbling loss");
  c.near(majority_vote_loss(g), 1.42, 1e-12, "majority vote N=2");
  const double quarter = 4.0 / 4.0;  // delta^2 / 4 with delta = 2
  const double want[] = {2.0, 1.5, 2.0};
  for (int n = 1; n <= 3; ++n) {
    c.near(majority_vote_loss(normal_game(n, 0.5, 0.5)), want[n - 1] * quarter, 1e-12, "majority vote p=0.5");
  }
}

void majority_oracle(Check& c) {
  for (int n = 1; n <= 8; ++n)
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const auto g = normal_game(n, p, 0.5);
      c.near(majority_vote_loss(g), oracle::majority_vote_bruteforce(n, p, 0.5, 1, -1), 1e-12,
             "brute force N=" + std::to_string(n));
    }
}

void pbe_tables(Check& c) {
  const std::set<int> all = {1, 2, 3, 4};
  const std::set<int> low = {2, 4};
  const std::set<int> high = {1, 3};
  for (int n = 1; n <= 3; ++n)
    for (int i = 1; i <= 9; ++i) c.expect(pbe_set(normal_game(n, i / 10.0, 0.5)) == all, "fair split table");
  const double th = p1_high(0.1);
  c.near(th, 0.3477297, 1e-6, "p1_high(0.1)");
  for (int i = 1; i <= 99; ++i) {
    const double p = i / 100.0;
    if (std::abs(p - th) < 1e-9) continue;
    c.expect(pbe_set(normal_game(1, p, 0.1)) == (p < th ? low : all), "q=0.1 table at p=" + std::to_string(p));
  }
  const double tl = p1_low(0.9);
  c.near(tl, 0.6522703, 1e-6, "p1_low(0.9)");
  for (int i = 1; i <= 99; ++i) {
    const double p = i / 100.0;
    if (std::abs(p - tl) < 1e-9) continue;
    c.expect(pbe_set(normal_game(1, p, 0.9)) == (p > tl ? high : all), "q=0.9 table at p=" + std::to_string(p));
  }
}

void fair_split(Check& c) {
  c.near(bayesian_system_loss(normal_game(1, 0.3, 0.5)), 0.6461538, 1e-7, "N=1");
  c.near(bayesian_system_loss(normal_game(2, 0.3, 0.5)), 0.4421053, 1e-7, "N=2");
  c.near(fair_split_loss(1, 0.3, 2), 0.84 / 1.3, 1e-9, "closed form N=1");
  double prev = 1e9;
  for (int n = 1; n <= 10; ++n) {
    const double l = bayesian_system_loss(normal_game(n, 0.3, 0.5));
    c.rel(l, fair_split_loss(n, 0.3, 2), 1e-9, "generic vs closed form");
    c.expect(l < prev, "strictly decreasing");
    prev = l;
  }
}

void utility_oracle(Check& c) {
  for (int n : {1, 2, 3})
    for (double q : {0.1, 0.5, 0.9})
      for (double p : {0.1, 0.5, 0.9})
        for (int sc = 1; sc <= 16; ++sc) {
          const auto g = normal_game(n, p, q);
          const auto prof = profile_from_index(sc);
          const auto rule = best_response_rule(prof, g);
          for (Bias b : {Bias::Negative, Bias::Positive}) {
            c.rel(expected_user_utility(prof, rule, b, g), oracle::utility(sc, weight(b), n, p, q, 1, -1), 1e-12,
                  "SC." + std::to_string(sc));
          }
        }
}

void evolving(Check& c) {
  const auto g = normal_game(1, 0.3, 0.5);
  const auto s = solve_schedule(g, 2);
  c.near(s.loss(), 0.126739, 1e-6, "T=2 loss");
  c.rel(s.loss(), evolving_loss_normal(g, 2), 1e-9, "general vs Normal closed form");
  c.expect(s.lambda_low() > 0 && s.lambda_high() > 0, "multipliers positive");
  double prev = 1e9;
  for (int t = 2; t <= 12; ++t) {
    const double l = evolving_loss(g, t);
    c.expect(l < prev, "strictly decreasing in T");
    c.expect(l < abandon_scheme(g).loss, "below babbling loss");
    prev = l;
  }
  std::mt19937_64 rng(12);
  for (int t : {2, 3, 5}) {
    const auto st = solve_schedule(g, t);
    for (int i = 0; i < 10000; ++i) {
      const auto& d = i % 2 ? g.pair().high() : g.pair().low();
      std::vector<double> h(static_cast<std::size_t>(t - 1));
      for (double& x : h) x = sample(d, rng);
      const auto a = st.actions(h);
      c.expect(a.a_low > -1.0 && a.a_high < 1.0, "actions inside the means");
    }
  }
}

void ic_check(Check& c) {
  const auto g = normal_game(1, 0.3, 0.5);
  const auto s = solve_schedule(g, 2);
  SimulationOptions opts;
  opts.seed = 2024;
  const auto ic = verify_ic(s, 100000, opts);
  c.expect(ic[0].within(0.0), "positive-bias IC under low type");
  c.expect(ic[2].within(0.0), "negative-bias IC under high type");
  const int t = 4;
  const auto broken = verify_ic(g, ConstantSchedule{t, -1.0, 1.0}, 1000, opts);
  c.expect(broken[0].mean == t * (-1.0 - 1.0), "broken schedule residual");
}

void crossover(Check& c) {
  const auto g = normal_game(1, 0.3, 0.5);
  c.near(crossover_bound(g, 2), 4.304, 1e-3, "T=2 bound");
  c.expect(crossover_user_count(g, 2) == 4, "N <= 4");
  double prev = 0;
  for (int t = 2; t <= 6; ++t) {
    const double b = crossover_bound(g, t);
    c.expect(b > prev, "bound increasing in T");
    prev = b;
    const int n_star = crossover_user_count(g, t);
    for (int n = 1; n <= 20; ++n) {
      c.expect((evolving_loss(g, t) < bayesian_system_loss(normal_game(n, 0.3, 0.5))) == (n <= n_star),
               "direct comparison");
    }
  }
}

void three_type(Check& c) {
  c.near(three_type_loss(2, 2), 0.2916667, 1e-7, "N=2");
  c.near(three_type_loss(3, 2), 0.1708333, 1e-7, "N=3");
  c.rel(three_type_loss(2, 2), 21.0 * 4 / 288, 1e-9, "N=2 exact");
  c.rel(three_type_loss(3, 2), 41.0 * 4 / 960, 1e-9, "N=3 exact");
  for (int n = 2; n <= 15; ++n) c.expect(three_type_loss(n + 1, 2) < three_type_loss(n, 2), "decreasing");
}

bool same(const Estimate& a, const Estimate& b) { return a.mean == b.mean && a.std_error == b.std_error; }

void montecarlo(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  for (int n : {1, 2})
    for (const auto& prof : {sc::SC1, sc::SC2}) {
      const auto g = normal_game(n, 0.3, 0.5, -1, 1, 1, 1.5);
      const auto rule = best_response_rule(prof, g);
      SimulationOptions opts;
      opts.seed = 17;
      const auto r = simulate_game(g, prof, rule, 1000000, opts);
      const std::string tag = label(prof) + " N=" + std::to_string(n);
      c.expect(r.cost.within(expected_platform_cost(prof, rule, g)), tag + " cost");
      for (Bias b : {Bias::Negative, Bias::Positive}) {
        c.expect(r.utility_of(b).within(expected_user_utility(prof, rule, b, g)), tag + " utility");
      }
      opts.workers = 1;
      const auto one = simulate_game(g, prof, rule, 1000000, opts);
      opts.workers = 7;
      const auto seven = simulate_game(g, prof, rule, 1000000, opts);
      c.expect(same(one.cost, r.cost) && same(seven.cost, r.cost) && same(one.utility[1], seven.utility[1]),
               tag + " worker determinism");
    }
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < 60.0, "runtime");
}

void sequential(Check& c) {
  for (int i = 1; i <= 9; ++i) {
    const auto g = normal_game(2, i / 10.0, 0.5);
    const auto r = sequential_two_user_check(g);
    for (double gain : r.gains) c.expect(gain <= deviation_tolerance(g), "gain <= 0");
    c.near(r.gains[3], 0.0, 1e-12, "fourth deviation ties");
  }
}

void asymptotics(Check& c) {
  // sigma_H^2 = 1.5, p_H = 0.3, fair split
  c.expect(bayesian_system_loss(normal_game(14, 0.3, 0.5, -1, 1, 1, 1.5)) < 1e-3, "Bayesian loss at N=14");
  // mu = -1 and 1, unit variances, p_H = 0.3
  c.expect(evolving_loss(normal_game(1, 0.3, 0.5), 20) < 1e-6, "evolving loss at T=20");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"benchmark closed forms", benchmarks},
      {"majority vote brute force", majority_oracle},
      {"equilibrium tables", pbe_tables},
      {"fair-split Bayesian loss", fair_split},
      {"expected utility closed forms", utility_oracle},
      {"evolving mechanism", evolving},
      {"IC verification", ic_check},
      {"crossover threshold", crossover},
      {"three-type extension", three_type},
      {"Monte Carlo agreement", montecarlo},
      {"sequential two-user check", sequential},
      {"asymptotics", asymptotics},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %2zu %s", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str());
    if (!c.ok) std::printf(" (%s)", c.why.str().c_str());
    std::printf("\n");
    failed += c.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
