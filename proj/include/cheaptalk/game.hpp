#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cheaptalk/distributions.hpp"
#include "cheaptalk/errors.hpp"

namespace cheaptalk {

enum class ServiceType { Low, High };
enum class Message { Low, High };

enum class Bias { Negative, Positive };

constexpr double weight(Bias b) { return b == Bias::Positive ? 1.0 : -1.0; }

enum class PureStrategy { Honest, BlindHigh, BlindLow, Reversed };

inline constexpr std::array<PureStrategy, 4> kAllStrategies = {
    PureStrategy::Honest, PureStrategy::BlindHigh, PureStrategy::BlindLow, PureStrategy::Reversed};

inline std::string_view to_string(PureStrategy s) {
  switch (s) {
    case PureStrategy::Honest: return "honest";
    case PureStrategy::BlindHigh: return "blind-high";
    case PureStrategy::BlindLow: return "blind-low";
    case PureStrategy::Reversed: return "reversed";
  }
  return "?";
}

inline std::string_view to_string(Bias b) { return b == Bias::Positive ? "positive" : "negative"; }

constexpr Message message_of(PureStrategy s, ServiceType observed) {
  const bool high = observed == ServiceType::High;
  switch (s) {
    case PureStrategy::Honest: return high ? Message::High : Message::Low;
    case PureStrategy::BlindHigh: return Message::High;
    case PureStrategy::BlindLow: return Message::Low;
    case PureStrategy::Reversed: return high ? Message::Low : Message::High;
  }
  return Message::Low;
}

constexpr int high_count(PureStrategy s, ServiceType observed) {
  return message_of(s, observed) == Message::High ? 1 : 0;
}

struct StrategyProfile {
  PureStrategy negative;
  PureStrategy positive;

  constexpr PureStrategy strategy(Bias b) const { return b == Bias::Positive ? positive : negative; }

  constexpr StrategyProfile with(Bias b, PureStrategy s) const {
    StrategyProfile out = *this;
    (b == Bias::Positive ? out.positive : out.negative) = s;
    return out;
  }

  constexpr bool operator==(const StrategyProfile&) const = default;
};

namespace sc {
using enum PureStrategy;
inline constexpr StrategyProfile SC1{BlindLow, Honest};
inline constexpr StrategyProfile SC2{Honest, BlindHigh};
inline constexpr StrategyProfile SC3{BlindHigh, Reversed};
inline constexpr StrategyProfile SC4{Reversed, BlindLow};
inline constexpr StrategyProfile SC5{Reversed, Honest};
inline constexpr StrategyProfile SC6{Honest, Reversed};
inline constexpr StrategyProfile SC7{Honest, Honest};
inline constexpr StrategyProfile SC8{BlindHigh, BlindHigh};
inline constexpr StrategyProfile SC9{BlindHigh, BlindLow};
inline constexpr StrategyProfile SC10{BlindLow, BlindLow};
inline constexpr StrategyProfile SC11{BlindLow, BlindHigh};
inline constexpr StrategyProfile SC12{BlindHigh, Honest};
inline constexpr StrategyProfile SC13{BlindLow, Reversed};
inline constexpr StrategyProfile SC14{Honest, BlindLow};
inline constexpr StrategyProfile SC15{Reversed, BlindHigh};
inline constexpr StrategyProfile SC16{Reversed, Reversed};
}  // namespace sc

inline constexpr std::array<StrategyProfile, 16> kAllProfiles = {
    sc::SC1, sc::SC2,  sc::SC3,  sc::SC4,  sc::SC5,  sc::SC6,  sc::SC7,  sc::SC8,
    sc::SC9, sc::SC10, sc::SC11, sc::SC12, sc::SC13, sc::SC14, sc::SC15, sc::SC16};

// 1-based index into the SC.1..SC.16 numbering.
constexpr int sc_index(const StrategyProfile& p) {
  for (std::size_t i = 0; i < kAllProfiles.size(); ++i) {
    if (kAllProfiles[i] == p) return static_cast<int>(i) + 1;
  }
  return 0;
}

constexpr StrategyProfile profile_from_index(int index) {
  if (index < 1 || index > 16) throw InvalidConfig("strategy combination index must be in 1..16");
  return kAllProfiles[static_cast<std::size_t>(index - 1)];
}

inline std::string label(const StrategyProfile& p) { return "SC." + std::to_string(sc_index(p)); }

class GameConfig {
 public:
  GameConfig(int n_users, double p_high, double q_plus, DistributionPair pair)
      : n_users_(n_users), p_high_(p_high), q_plus_(q_plus), pair_(pair) {
    if (n_users < 1) throw InvalidConfig("n_users must be at least 1");
    if (!(p_high > 0.0 && p_high < 1.0)) throw InvalidConfig("p_high must lie in (0, 1)");
    if (!(q_plus > 0.0 && q_plus < 1.0)) throw InvalidConfig("q_plus must lie in (0, 1)");
  }

  int n_users() const { return n_users_; }
  double p_high() const { return p_high_; }
  double q_plus() const { return q_plus_; }
  const DistributionPair& pair() const { return pair_; }
  double mu_low() const { return pair_.mu_low(); }
  double mu_high() const { return pair_.mu_high(); }
  double gap() const { return pair_.gap(); }

  double prior(ServiceType t) const { return t == ServiceType::High ? p_high_ : 1.0 - p_high_; }
  double mean(ServiceType t) const { return t == ServiceType::High ? mu_high() : mu_low(); }
  double variance(ServiceType t) const {
    return t == ServiceType::High ? pair_.var_high() : pair_.var_low();
  }
  double prior_mean() const { return p_high_ * mu_high() + (1.0 - p_high_) * mu_low(); }

  GameConfig with_n_users(int n) const { return {n, p_high_, q_plus_, pair_}; }
  GameConfig with_p_high(double p) const { return {n_users_, p, q_plus_, pair_}; }
  GameConfig with_q_plus(double q) const { return {n_users_, p_high_, q, pair_}; }
  GameConfig with_pair(const DistributionPair& pair) const { return {n_users_, p_high_, q_plus_, pair}; }

 private:
  int n_users_;
  double p_high_;
  double q_plus_;
  DistributionPair pair_;
};

inline constexpr std::array<ServiceType, 2> kTypes = {ServiceType::High, ServiceType::Low};

// Platform rating action indexed by the number of high messages k = 0..N.
struct InferenceRule {
  std::vector<double> actions;

  double operator()(int k) const { return actions.at(static_cast<std::size_t>(k)); }
  int n_users() const { return static_cast<int>(actions.size()) - 1; }
};

inline double binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return std::round(c);
}

inline double binomial_pmf(int n, int k, double p) {
  if (k < 0 || k > n) return 0.0;
  return binomial_coefficient(n, k) * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

inline double high_message_prob(const StrategyProfile& profile, double q_plus, ServiceType given) {
  return (1.0 - q_plus) * high_count(profile.negative, given) +
         q_plus * high_count(profile.positive, given);
}

inline double high_message_prob(const StrategyProfile& profile, const GameConfig& config,
                                ServiceType given) {
  return high_message_prob(profile, config.q_plus(), given);
}

// Off-path counts (zero likelihood under both types) keep the prior.
inline double posterior_high(const StrategyProfile& profile, const GameConfig& config, int k) {
  const int n = config.n_users();
  if (k < 0 || k > n) throw InvalidConfig("message count out of range");
  const double lh = binomial_pmf(n, k, high_message_prob(profile, config, ServiceType::High));
  const double ll = binomial_pmf(n, k, high_message_prob(profile, config, ServiceType::Low));
  const double p = config.p_high();
  const double den = p * lh + (1.0 - p) * ll;
  if (den == 0.0) return p;
  return p * lh / den;
}

inline InferenceRule best_response_rule(const StrategyProfile& profile, const GameConfig& config) {
  InferenceRule rule;
  rule.actions.reserve(static_cast<std::size_t>(config.n_users()) + 1);
  for (int k = 0; k <= config.n_users(); ++k) {
    const double post = posterior_high(profile, config, k);
    rule.actions.push_back(post * config.mu_high() + (1.0 - post) * config.mu_low());
  }
  return rule;
}

// Focal user's expected b * a. The other N - 1 users follow `profile`; the
// focal user plays `focal` (defaults to the profile's strategy for `bias`).
inline double expected_user_utility(const StrategyProfile& profile, const InferenceRule& rule,
                                    Bias bias, const GameConfig& config,
                                    std::optional<PureStrategy> focal = std::nullopt) {
  const int n = config.n_users();
  if (rule.n_users() != n) throw InvalidConfig("inference rule size does not match n_users");
  const PureStrategy own = focal.value_or(profile.strategy(bias));
  double total = 0.0;
  for (ServiceType t : kTypes) {
    const double ph = high_message_prob(profile, config, t);
    const int mine = high_count(own, t);
    double inner = 0.0;
    for (int j = 0; j < n; ++j) inner += binomial_pmf(n - 1, j, ph) * rule(j + mine);
    total += config.prior(t) * inner;
  }
  return weight(bias) * total;
}

// E[(a - mu_S)^2], the part of the platform cost that depends on the rule.
inline double expected_inference_error(const StrategyProfile& profile, const InferenceRule& rule,
                                       const GameConfig& config) {
  const int n = config.n_users();
  double total = 0.0;
  for (ServiceType t : kTypes) {
    const double ph = high_message_prob(profile, config, t);
    double inner = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double d = rule(k) - config.mean(t);
      inner += binomial_pmf(n, k, ph) * d * d;
    }
    total += config.prior(t) * inner;
  }
  return total;
}

inline double min_expected_cost(const GameConfig& config) {
  return config.p_high() * config.variance(ServiceType::High) +
         (1.0 - config.p_high()) * config.variance(ServiceType::Low);
}

inline double expected_platform_cost(const StrategyProfile& profile, const InferenceRule& rule,
                                     const GameConfig& config) {
  return min_expected_cost(config) + expected_inference_error(profile, rule, config);
}

}  // namespace cheaptalk
