#pragma once

#include <cmath>
#include <concepts>
#include <span>
#include <vector>

#include "cheaptalk/benchmarks.hpp"
#include "cheaptalk/distributions.hpp"
#include "cheaptalk/errors.hpp"
#include "cheaptalk/game.hpp"

namespace cheaptalk {

namespace detail {

// log(e^x - 1) for x > 0 without overflow.
inline double log_expm1(double x) {
  return x > 30.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
}

// log of sum_{k=0}^{T-1} e^{k a}, a = log(ratio) >= 0.
inline double log_geometric_sum(double log_ratio, int horizon) {
  if (log_ratio <= 0.0) return std::log(static_cast<double>(horizon));
  return log_expm1(horizon * log_ratio) - log_expm1(log_ratio);
}

}  // namespace detail

struct CommitmentActions {
  double a_low;
  double a_high;
};

// Any object the simulator can replay: a horizon and history-indexed actions.
template <class P>
concept CommitmentPolicy = requires(const P& p, std::span<const double> h) {
  { p.horizon() } -> std::convertible_to<int>;
  { p.actions(h) } -> std::same_as<CommitmentActions>;
};

class CommitmentSchedule {
 public:
  CommitmentSchedule(const DistributionPair& pair, double p_high, int horizon, double log_s_alpha,
                     double log_s_beta, double lambda_low, double lambda_high, double loss)
      : pair_(pair),
        p_high_(p_high),
        horizon_(horizon),
        log_s_alpha_(log_s_alpha),
        log_s_beta_(log_s_beta),
        lambda_low_(lambda_low),
        lambda_high_(lambda_high),
        loss_(loss) {}

  const DistributionPair& pair() const { return pair_; }
  double p_high() const { return p_high_; }
  int horizon() const { return horizon_; }
  double s_alpha() const { return std::exp(log_s_alpha_); }
  double s_beta() const { return std::exp(log_s_beta_); }
  double log_s_alpha() const { return log_s_alpha_; }
  double log_s_beta() const { return log_s_beta_; }
  double lambda_low() const { return lambda_low_; }
  double lambda_high() const { return lambda_high_; }
  double loss() const { return loss_; }

  // The likelihood ratio enters only through Lambda and 1 / Lambda, each taken
  // from the log so long histories neither overflow nor underflow early.
  CommitmentActions actions_from_log_ratio(double log_lambda) const {
    const double p = p_high_;
    const double lam = std::exp(log_lambda);
    const double inv = std::exp(-log_lambda);
    return {pair_.mu_low() + (lam * lambda_high_ + lambda_low_) / (2.0 * (1.0 - p)),
            pair_.mu_high() - (lambda_high_ + lambda_low_ * inv) / (2.0 * p)};
  }

  CommitmentActions actions(std::span<const double> history) const {
    return actions_from_log_ratio(log_likelihood_ratio(pair_, history));
  }

 private:
  DistributionPair pair_;
  double p_high_;
  int horizon_;
  double log_s_alpha_;
  double log_s_beta_;
  double lambda_low_;
  double lambda_high_;
  double loss_;
};

// Same pair of actions in every period regardless of history.
struct ConstantSchedule {
  int periods;
  double a_low;
  double a_high;

  int horizon() const { return periods; }
  CommitmentActions actions(std::span<const double>) const { return {a_low, a_high}; }
};

// Closed-form schedule from the log geometric sums. The stationary system is
// divided through by s_alpha * s_beta so every term stays O(T^2).
inline CommitmentSchedule solve_schedule_from_sums(const DistributionPair& pair, double p_high, int horizon,
                                                   double log_sa, double log_sb) {
  if (horizon < 2) throw DegenerateHorizon("commitment schedule needs a horizon of at least 2 periods");
  const double p = p_high;
  const double t = horizon;
  const double d = pair.gap();
  const double u = std::exp(-log_sa);
  const double v = std::exp(-log_sb);
  const double terms[] = {p * p * (1 - t * u) * (1 - t * v), -p * (1 - 2 * t * v), -p * t * t * u * v,
                          t * t * u * v, -t * v};
  double den = 0.0;
  double scale = 0.0;
  for (double x : terms) {
    den += x;
    scale += std::abs(x);
  }
  if (!(std::abs(den) >= 1e-12 * scale)) {
    throw DegenerateHorizon("commitment schedule system is singular (types indistinguishable)");
  }
  const double lambda_low = 2 * (1 - p) * p * p * t * d * u * (t * v - 1) / den;
  const double lambda_high = 2 * (1 - p) * (1 - p) * p * t * d * v * (t * u - 1) / den;
  const double loss = (1 - p) * p * t * d * d * ((p - 1) * v - p * u + t * u * v) / den;
  return {pair, p, horizon, log_sa, log_sb, lambda_low, lambda_high, loss};
}

inline CommitmentSchedule solve_schedule(const GameConfig& config, int horizon,
                                         const quadrature::Options& opts = {}) {
  if (config.n_users() != 1) throw InvalidConfig("commitment schedule is defined for a single user");
  if (horizon < 2) throw DegenerateHorizon("commitment schedule needs a horizon of at least 2 periods");
  const auto ab = alpha_beta(config.pair(), opts);
  return solve_schedule_from_sums(config.pair(), config.p_high(), horizon,
                                  detail::log_geometric_sum(std::log(ab.alpha), horizon),
                                  detail::log_geometric_sum(std::log(ab.beta), horizon));
}

inline CommitmentActions commitment_actions(const CommitmentSchedule& schedule,
                                            std::span<const double> history) {
  return schedule.actions(history);
}

// Per-period loss; a single period falls back to the babbling loss.
inline double evolving_loss(const GameConfig& config, int horizon, const quadrature::Options& opts = {}) {
  if (horizon == 1) return abandon_scheme(config).loss;
  return solve_schedule(config.with_n_users(1), horizon, opts).loss();
}

namespace detail {

// log R with R = (e^{T x} - 1) / (T (e^x - 1)); R = 1 at x = 0.
inline double log_normal_ratio(double x, int horizon) {
  if (x <= 0.0) return 0.0;
  return log_expm1(horizon * x) - log_expm1(x) - std::log(static_cast<double>(horizon));
}

}  // namespace detail

// Equal-variance Normal closed form.
inline double evolving_loss_normal(double p_high, double delta, double variance, int horizon) {
  if (horizon < 1) throw DegenerateHorizon("horizon must be positive");
  const double p = p_high;
  const double d2 = delta * delta;
  if (d2 == 0.0) return 0.0;
  const double log_r = detail::log_normal_ratio(d2 / variance, horizon);
  const double r = std::exp(log_r);
  return d2 / (r - 1.0 + 1.0 / (p * (1 - p)));
}

inline void require_equal_variance_normal(const GameConfig& config) {
  if (!config.pair().equal_variance_normal()) {
    throw InvalidConfig("this quantity is defined for equal-variance Normal pairs only");
  }
}

inline double evolving_loss_normal(const GameConfig& config, int horizon) {
  require_equal_variance_normal(config);
  return evolving_loss_normal(config.p_high(), config.gap(), config.pair().var_low(), horizon);
}

// Largest N (as a real) for which the T-period mechanism beats the Bayesian
// approach with N users at fair bias split.
inline double crossover_bound(double p_high, double delta, double variance, int horizon) {
  const double p = p_high;
  const double log_r = detail::log_normal_ratio(delta * delta / variance, horizon);
  const double r_inv = std::exp(-log_r);
  const double a = log_r + std::log(p + (1 - p) * r_inv);
  const double b = log_r + std::log((1 - p) + p * r_inv);
  return std::max(a, b) / std::log(2.0);
}

inline double crossover_bound(const GameConfig& config, int horizon) {
  require_equal_variance_normal(config);
  return crossover_bound(config.p_high(), config.gap(), config.pair().var_low(), horizon);
}

inline int crossover_user_count(const GameConfig& config, int horizon) {
  return static_cast<int>(std::floor(crossover_bound(config, horizon)));
}

}  // namespace cheaptalk
