#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "cheaptalk/errors.hpp"
#include "cheaptalk/game.hpp"

namespace cheaptalk {

// How a candidate deviation is evaluated.
//   ClassSwitch: every user of the deviating bias adopts the alternative and
//     the platform best-responds to the resulting profile.
//   FixedRule: one user deviates against the candidate profile's rule.
enum class DeviationModel { ClassSwitch, FixedRule };

struct Deviation {
  Bias bias;
  PureStrategy alternative;
  double gain;
};

struct PbeCertificate {
  StrategyProfile profile;
  InferenceRule rule;
  int deviations_checked = 0;
  double max_deviation_gain = 0.0;
};

struct DeviationWitness {
  StrategyProfile profile;
  std::vector<Deviation> profitable;
  Deviation best;
};

using PbeResult = std::variant<PbeCertificate, DeviationWitness>;

inline double deviation_tolerance(const GameConfig& config) {
  return 1e-12 * std::max({1.0, std::abs(config.mu_high()), std::abs(config.mu_low())});
}

inline double deviation_gain(const StrategyProfile& profile, const InferenceRule& rule, Bias bias,
                             PureStrategy alternative, const GameConfig& config,
                             DeviationModel model = DeviationModel::ClassSwitch) {
  const double base = expected_user_utility(profile, rule, bias, config);
  if (model == DeviationModel::FixedRule) {
    return expected_user_utility(profile, rule, bias, config, alternative) - base;
  }
  const StrategyProfile moved = profile.with(bias, alternative);
  return expected_user_utility(moved, best_response_rule(moved, config), bias, config) - base;
}

inline PbeResult is_pbe(const StrategyProfile& profile, const GameConfig& config,
                        DeviationModel model = DeviationModel::ClassSwitch) {
  const InferenceRule rule = best_response_rule(profile, config);
  const double tol = deviation_tolerance(config);
  PbeCertificate cert{profile, rule, 0, -std::numeric_limits<double>::infinity()};
  std::vector<Deviation> profitable;
  for (Bias bias : {Bias::Negative, Bias::Positive}) {
    for (PureStrategy alt : kAllStrategies) {
      if (alt == profile.strategy(bias)) continue;
      const double gain = deviation_gain(profile, rule, bias, alt, config, model);
      ++cert.deviations_checked;
      cert.max_deviation_gain = std::max(cert.max_deviation_gain, gain);
      if (gain > tol) profitable.push_back({bias, alt, gain});
    }
  }
  if (profitable.empty()) return cert;
  const auto best = *std::max_element(profitable.begin(), profitable.end(),
                                      [](const Deviation& a, const Deviation& b) { return a.gain < b.gain; });
  return DeviationWitness{profile, std::move(profitable), best};
}

inline bool holds_pbe(const PbeResult& r) { return std::holds_alternative<PbeCertificate>(r); }

inline std::vector<StrategyProfile> enumerate_pbe(const GameConfig& config,
                                                  DeviationModel model = DeviationModel::ClassSwitch) {
  std::vector<StrategyProfile> out;
  for (const auto& p : kAllProfiles) {
    if (holds_pbe(is_pbe(p, config, model))) out.push_back(p);
  }
  return out;
}

// ---- thresholds on p_H for the one-user asymmetric-bias game

inline double p1_high(double q_plus) {
  if (!(q_plus > 0.0 && q_plus < 0.5)) throw OutOfRegime("p1_high is defined for q_plus in (0, 1/2)");
  const double q = q_plus;
  const double r = (2 * q * q * q - 9 * q * q + 12 * q - 5) / (2 * q - 1);
  return (3.0 - q) / 2.0 - 0.5 * std::sqrt(r);
}

inline double p1_low(double q_plus) {
  if (!(q_plus > 0.5 && q_plus < 1.0)) throw OutOfRegime("p1_low is defined for q_plus in (1/2, 1)");
  const double q = q_plus;
  return 0.5 * std::sqrt((2 * q * q * q + 3 * q * q) / (2 * q - 1)) - q / 2.0;
}

struct BiasThresholds {
  std::optional<double> p1_high;
  std::optional<double> p1_low;
};

inline BiasThresholds bias_thresholds(double q_plus) {
  if (!(q_plus > 0.0 && q_plus < 1.0)) throw OutOfRegime("q_plus must lie in (0, 1)");
  BiasThresholds t;
  if (q_plus < 0.5) t.p1_high = p1_high(q_plus);
  if (q_plus > 0.5) t.p1_low = p1_low(q_plus);
  return t;
}

inline const double kSmallBiasEdge = (3.0 - std::sqrt(5.0)) / 2.0;
inline const double kLargeBiasEdge = (std::sqrt(5.0) - 1.0) / 2.0;

// ---- system losses

struct WorstPbe {
  double loss;
  StrategyProfile profile;
  std::vector<StrategyProfile> equilibria;
};

inline WorstPbe worst_pbe(const GameConfig& config, DeviationModel model = DeviationModel::ClassSwitch) {
  auto eq = enumerate_pbe(config, model);
  if (eq.empty()) throw NoEquilibrium("no pure-strategy PBE for this configuration");
  WorstPbe out{-1.0, eq.front(), eq};
  for (const auto& p : eq) {
    const double loss = expected_inference_error(p, best_response_rule(p, config), config);
    if (loss > out.loss) {
      out.loss = loss;
      out.profile = p;
    }
  }
  return out;
}

inline double bayesian_system_loss(const GameConfig& config) { return worst_pbe(config).loss; }

inline double fair_split_loss(int n_users, double p_high, double delta) {
  const double p = p_high;
  const double two_n = std::ldexp(1.0, n_users);
  const double num = (1.0 - p) * p * delta * delta;
  return std::max(num / (p + two_n * (1.0 - p)), num / (1.0 - (1.0 - two_n) * p));
}

// Plain max form of the one-user asymmetric loss.
inline double one_user_loss_max_form(double p_high, double q_plus, double delta) {
  const double p = p_high;
  const double q = q_plus;
  const double d2 = delta * delta;
  return std::max(q * (1 - p) * p * d2 / (p + (1 - p) * q), (1 - q) * (1 - p) * p * d2 / (1 - q * p));
}

// Regime-wise one-user loss: in the extreme-bias regimes only one PBE pair
// survives and its loss is used on its own.
inline double one_user_loss_regimes(double p_high, double q_plus, double delta) {
  const double p = p_high;
  const double q = q_plus;
  const double d2 = delta * delta;
  const double first = q * (1 - p) * p * d2 / (p + (1 - p) * q);
  const double second = (1 - q) * (1 - p) * p * d2 / (1 - q * p);
  if (q <= kSmallBiasEdge && p <= p1_high(q)) return first;
  if (q >= kLargeBiasEdge && p >= p1_low(q)) return second;
  return std::max(first, second);
}

struct LossReductionLimit {
  double coefficient;
  double q_small;
  double p_at_q_small;
  double q_large;
  double p_at_q_large;
};

// Largest one-user reduction from the babbling loss, in units of (mu_H - mu_L)^2,
// with the limiting (q_plus, p_H) points that attain it.
inline LossReductionLimit max_loss_reduction_one_user() {
  return {std::sqrt(5.0) - 2.0, 0.0, kSmallBiasEdge, 1.0, kLargeBiasEdge};
}

// Uniform three-type prior with the medium mean at the midpoint.
inline double three_type_loss(int n_users, double delta) {
  if (n_users < 2) throw InvalidConfig("three-type loss needs at least two users");
  const double two_n = std::ldexp(1.0, n_users);
  return (1.0 + 5.0 * two_n) / (3.0 * (2.0 + two_n) * 4.0 * two_n) * delta * delta;
}

// ---- two sequential users: user 1 follows SC.1, user 2 sees user 1's
// message. A negative user 2 always sends L; a positive user 2 maps
// (observed type, first message) to its own message.

struct SecondMoverStrategy {
  Message after_high_high;  // S = H, m1 = H
  Message after_high_low;   // S = H, m1 = L
  Message after_low_low;    // S = L, m1 = L

  Message operator()(ServiceType s, Message m1) const {
    if (s == ServiceType::Low) return m1 == Message::Low ? after_low_low : Message::High;
    return m1 == Message::High ? after_high_high : after_high_low;
  }
};

inline constexpr SecondMoverStrategy kSecondMoverHonest{Message::High, Message::High, Message::Low};
inline constexpr std::array<SecondMoverStrategy, 4> kSecondMoverDeviations = {{
    {Message::High, Message::Low, Message::Low},
    {Message::High, Message::Low, Message::High},
    {Message::Low, Message::High, Message::High},
    {Message::Low, Message::High, Message::Low},
}};

inline double sequential_positive_utility(const GameConfig& config, const SecondMoverStrategy& second) {
  const double q = config.q_plus();
  auto first_msg = [](Bias b, ServiceType s) {
    return message_of(sc::SC1.strategy(b), s);
  };
  auto second_msg = [&](Bias b, ServiceType s, Message m1) {
    return b == Bias::Negative ? Message::Low : second(s, m1);
  };
  auto idx = [](Message m1, Message m2) {
    return (m1 == Message::High ? 2 : 0) + (m2 == Message::High ? 1 : 0);
  };
  std::array<double, 4> given_high{};
  std::array<double, 4> given_low{};
  for (ServiceType s : kTypes) {
    auto& dist = s == ServiceType::High ? given_high : given_low;
    for (Bias b1 : {Bias::Negative, Bias::Positive}) {
      for (Bias b2 : {Bias::Negative, Bias::Positive}) {
        const double w = (b1 == Bias::Positive ? q : 1 - q) * (b2 == Bias::Positive ? q : 1 - q);
        const Message m1 = first_msg(b1, s);
        dist[idx(m1, second_msg(b2, s, m1))] += w;
      }
    }
  }
  const double p = config.p_high();
  auto action = [&](int o) {
    const double den = p * given_high[o] + (1 - p) * given_low[o];
    const double post = den == 0.0 ? p : p * given_high[o] / den;
    return post * config.mu_high() + (1 - post) * config.mu_low();
  };
  double u = 0.0;
  for (ServiceType s : kTypes) {
    for (Bias b1 : {Bias::Negative, Bias::Positive}) {
      const Message m1 = first_msg(b1, s);
      u += config.prior(s) * (b1 == Bias::Positive ? q : 1 - q) *
           action(idx(m1, second_msg(Bias::Positive, s, m1)));
    }
  }
  return u;
}

struct SequentialReport {
  double baseline;
  std::array<double, 4> utilities;
  std::array<double, 4> gains;
};

inline void require_sequential_setting(const GameConfig& config) {
  if (config.n_users() != 2 || config.q_plus() != 0.5) {
    throw InvalidConfig("sequential check requires N = 2 and q_plus = 1/2");
  }
}

inline SequentialReport sequential_two_user_check(const GameConfig& config) {
  require_sequential_setting(config);
  const double p = config.p_high();
  const double mh = config.mu_high();
  const double ml = config.mu_low();
  const double d = config.gap();
  const double babble = p * mh + (1 - p) * ml;
  SequentialReport r{};
  r.baseline = expected_user_utility(sc::SC1, best_response_rule(sc::SC1, config), Bias::Positive, config);
  r.utilities[0] = babble;
  r.utilities[1] = p * p * d / 2 + p * d / 2 + ml;
  r.utilities[2] = babble;
  r.utilities[3] = p * mh + (1 - p) * (p / 4 * mh + (1 - p) * ml) / (p / 4 + 1 - p);
  for (std::size_t i = 0; i < 4; ++i) r.gains[i] = r.utilities[i] - r.baseline;
  return r;
}

inline SequentialReport sequential_two_user_check_generic(const GameConfig& config) {
  require_sequential_setting(config);
  SequentialReport r{};
  r.baseline = sequential_positive_utility(config, kSecondMoverHonest);
  for (std::size_t i = 0; i < 4; ++i) {
    r.utilities[i] = sequential_positive_utility(config, kSecondMoverDeviations[i]);
    r.gains[i] = r.utilities[i] - r.baseline;
  }
  return r;
}

}  // namespace cheaptalk
