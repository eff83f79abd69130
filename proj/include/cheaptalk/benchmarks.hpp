#pragma once

#include <array>
#include <cmath>

#include "cheaptalk/errors.hpp"
#include "cheaptalk/game.hpp"

namespace cheaptalk {

enum class Scheme { MajorityVote, BlindAbandon, OneShotCommit };

struct BenchmarkResult {
  Scheme scheme;
  InferenceRule action_rule;
  double system_loss;
};

inline InferenceRule majority_vote_rule(const GameConfig& config) {
  const int n = config.n_users();
  InferenceRule rule;
  for (int k = 0; k <= n; ++k) {
    if (2 * k > n) rule.actions.push_back(config.mu_high());
    else if (2 * k == n) rule.actions.push_back(config.prior_mean());
    else rule.actions.push_back(config.mu_low());
  }
  return rule;
}

// Users message their bias regardless of the type, and the bias split is
// taken as fair, so the count k ~ Bin(N, 1/2) carries no information.
inline double majority_vote_loss(const GameConfig& config) {
  const int n = config.n_users();
  const double p = config.p_high();
  double low_sum = 0.0;
  for (int k = 0; k <= static_cast<int>(std::ceil(n / 2.0 - 1.0)); ++k) low_sum += binomial_coefficient(n, k);
  double high_sum = 0.0;
  for (int l = static_cast<int>(std::floor(n / 2.0 + 1.0)); l <= n; ++l) high_sum += binomial_coefficient(n, l);
  const double tie = n % 2 == 0 ? p * (1 - p) * binomial_coefficient(n, n / 2) : 0.0;
  const double d = config.gap();
  return d * d / std::ldexp(1.0, n) * (p * low_sum + (1 - p) * high_sum + tie);
}

// Same scheme with the configured bias split: k ~ Bin(N, q_plus).
inline double majority_vote_loss_biased(const GameConfig& config) {
  const int n = config.n_users();
  const InferenceRule rule = majority_vote_rule(config);
  double total = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = binomial_pmf(n, k, config.q_plus());
    for (ServiceType t : kTypes) {
      const double e = rule(k) - config.mean(t);
      total += w * config.prior(t) * e * e;
    }
  }
  return total;
}

struct AbandonResult {
  double action;
  double loss;
};

inline AbandonResult abandon_scheme(const GameConfig& config) {
  const double p = config.p_high();
  const double d = config.gap();
  return {config.prior_mean(), p * (1 - p) * d * d};
}

struct OneShotCommitment {
  double a_low;
  double a_high;
  double loss;
};

inline OneShotCommitment one_shot_commitment(const GameConfig& config) {
  if (config.n_users() != 1) throw InvalidConfig("one-shot commitment is defined for a single user");
  const auto babble = abandon_scheme(config);
  return {babble.action, babble.action, babble.loss};
}

// Left-hand sides of the four one-shot IC constraints, ordered as
// (positive under L, negative under L, negative under H, positive under H).
// A single period integrates the constant actions against each density.
inline std::array<double, 4> one_shot_ic_residuals(double a_low, double a_high) {
  return {a_low - a_high, a_high - a_low, a_low - a_high, a_high - a_low};
}

inline BenchmarkResult run_benchmark(Scheme scheme, const GameConfig& config) {
  switch (scheme) {
    case Scheme::MajorityVote:
      return {scheme, majority_vote_rule(config), majority_vote_loss(config)};
    case Scheme::BlindAbandon: {
      const auto r = abandon_scheme(config);
      return {scheme, InferenceRule{std::vector<double>(config.n_users() + 1, r.action)}, r.loss};
    }
    case Scheme::OneShotCommit: {
      const auto r = one_shot_commitment(config);
      return {scheme, InferenceRule{{r.a_low, r.a_high}}, r.loss};
    }
  }
  throw InvalidConfig("unknown benchmark scheme");
}

}  // namespace cheaptalk
