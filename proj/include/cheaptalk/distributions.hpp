#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cheaptalk/errors.hpp"
#include "cheaptalk/quadrature.hpp"

namespace cheaptalk {

enum class Family { Normal, Laplace, Logistic };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::Normal: return "normal";
    case Family::Laplace: return "laplace";
    case Family::Logistic: return "logistic";
  }
  return "?";
}

inline Family family_from_string(std::string_view name) {
  if (name == "normal") return Family::Normal;
  if (name == "laplace") return Family::Laplace;
  if (name == "logistic") return Family::Logistic;
  throw InvalidConfig("unknown distribution family '" + std::string(name) + "'");
}

class StateDistribution {
 public:
  StateDistribution(Family family, double location, double scale)
      : family_(family), location_(location), scale_(scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw InvalidConfig("distribution scale must be positive and finite");
    }
    if (!std::isfinite(location)) throw InvalidConfig("distribution location must be finite");
  }

  static StateDistribution normal(double mean, double variance) {
    if (!(variance > 0.0)) throw InvalidConfig("normal variance must be positive");
    return {Family::Normal, mean, std::sqrt(variance)};
  }
  static StateDistribution laplace(double location, double b) { return {Family::Laplace, location, b}; }
  static StateDistribution logistic(double location, double s) { return {Family::Logistic, location, s}; }

  Family family() const { return family_; }
  double location() const { return location_; }
  double scale() const { return scale_; }
  double mean() const { return location_; }

  double variance() const {
    switch (family_) {
      case Family::Normal: return scale_ * scale_;
      case Family::Laplace: return 2.0 * scale_ * scale_;
      case Family::Logistic: return scale_ * scale_ * std::numbers::pi * std::numbers::pi / 3.0;
    }
    return 0.0;
  }

  bool operator==(const StateDistribution&) const = default;

 private:
  Family family_;
  double location_;
  double scale_;
};

inline double log_density(const StateDistribution& d, double theta) {
  const double z = (theta - d.location()) / d.scale();
  switch (d.family()) {
    case Family::Normal:
      return -0.5 * z * z - std::log(d.scale()) - 0.5 * std::log(2.0 * std::numbers::pi);
    case Family::Laplace:
      return -std::abs(z) - std::log(2.0 * d.scale());
    case Family::Logistic: {
      const double az = std::abs(z);
      return -az - 2.0 * std::log1p(std::exp(-az)) - std::log(d.scale());
    }
  }
  return -std::numeric_limits<double>::infinity();
}

inline double density(const StateDistribution& d, double theta) {
  return std::exp(log_density(d, theta));
}

class DistributionPair {
 public:
  DistributionPair(StateDistribution low, StateDistribution high) : low_(low), high_(high) {
    if (high_.mean() < low_.mean()) {
      throw InvalidConfig("high-type mean must not be below the low-type mean");
    }
  }

  static DistributionPair equal_variance_normal(double mu_low, double mu_high, double variance) {
    return {StateDistribution::normal(mu_low, variance), StateDistribution::normal(mu_high, variance)};
  }

  const StateDistribution& low() const { return low_; }
  const StateDistribution& high() const { return high_; }
  double mu_low() const { return low_.mean(); }
  double mu_high() const { return high_.mean(); }
  double var_low() const { return low_.variance(); }
  double var_high() const { return high_.variance(); }
  double gap() const { return high_.mean() - low_.mean(); }

  bool identical() const { return low_ == high_; }
  bool equal_variance_normal() const {
    return low_.family() == Family::Normal && high_.family() == Family::Normal &&
           low_.scale() == high_.scale();
  }

 private:
  StateDistribution low_;
  StateDistribution high_;
};

inline double log_likelihood_ratio(const DistributionPair& pair, double theta) {
  if (!std::isfinite(theta)) {
    throw DivisionOutsideSupport("likelihood ratio evaluated outside the common support");
  }
  return log_density(pair.high(), theta) - log_density(pair.low(), theta);
}

inline double likelihood_ratio(const DistributionPair& pair, double theta) {
  return std::exp(log_likelihood_ratio(pair, theta));
}

// log of prod_t phi_H(theta_t) / phi_L(theta_t); the empty history gives 0.
inline double log_likelihood_ratio(const DistributionPair& pair, std::span<const double> history) {
  double acc = 0.0;
  for (double theta : history) acc += log_likelihood_ratio(pair, theta);
  return acc;
}

struct AlphaBeta {
  double alpha;
  double beta;
};

namespace detail {

// Tail of log density: Normal decays quadratically, Laplace and Logistic
// linearly at rate 1/scale.
inline bool quadratic_tail(const StateDistribution& d) { return d.family() == Family::Normal; }

// Whether integral of num^2 / den over the real line is finite.
inline bool squared_ratio_converges(const StateDistribution& num, const StateDistribution& den) {
  const bool qn = quadratic_tail(num);
  const bool qd = quadratic_tail(den);
  if (qn && qd) return num.variance() < 2.0 * den.variance();
  if (qn) return true;
  if (qd) return false;
  return num.scale() < 2.0 * den.scale();
}

inline double squared_ratio_integral(const StateDistribution& num, const StateDistribution& den,
                                     const quadrature::Options& opts) {
  if (num == den) return 1.0;
  if (!squared_ratio_converges(num, den)) {
    throw DivergentIntegral("integral of " + std::string(to_string(num.family())) + "^2 / " +
                            std::string(to_string(den.family())) + " diverges for these scales");
  }
  const double mn = num.location();
  const double md = den.location();
  std::vector<double> breaks = {mn, md, 2.0 * mn - md, 2.0 * md - mn};
  double width = std::max(num.scale(), den.scale());
  if (quadratic_tail(num) && quadratic_tail(den)) {
    const double pn = 2.0 / num.variance();
    const double pd = 1.0 / den.variance();
    const double precision = pn - pd;
    breaks.push_back((pn * mn - pd * md) / precision);
    width = std::max(width, 1.0 / std::sqrt(precision));
  } else if (!quadratic_tail(num) && !quadratic_tail(den)) {
    width = std::max(width, 1.0 / (2.0 / num.scale() - 1.0 / den.scale()));
  }
  for (double w : {-width, width}) {
    breaks.push_back(mn + w);
    breaks.push_back(md + w);
  }
  auto integrand = [&](double x) {
    return std::exp(2.0 * log_density(num, x) - log_density(den, x));
  };
  return quadrature::integrate_real_line(integrand, breaks, width, opts).value;
}

}  // namespace detail

// alpha = int phi_L^2 / phi_H, beta = int phi_H^2 / phi_L.
inline AlphaBeta alpha_beta(const DistributionPair& pair, const quadrature::Options& opts = {}) {
  if (pair.identical()) return {1.0, 1.0};
  if (pair.equal_variance_normal()) {
    const double v = std::exp(pair.gap() * pair.gap() / pair.var_low());
    return {v, v};
  }
  return {detail::squared_ratio_integral(pair.low(), pair.high(), opts),
          detail::squared_ratio_integral(pair.high(), pair.low(), opts)};
}

// Uniform on the open interval (0, 1) from the top 53 bits of a 64-bit draw.
template <class Rng>
double uniform_open(Rng& rng) {
  static_assert(Rng::max() - Rng::min() == std::numeric_limits<std::uint64_t>::max(),
                "uniform_open expects a full 64-bit generator");
  const std::uint64_t bits = static_cast<std::uint64_t>(rng() - Rng::min()) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

template <class Rng>
double sample(const StateDistribution& d, Rng& rng) {
  switch (d.family()) {
    case Family::Normal: {
      const double u1 = uniform_open(rng);
      const double u2 = uniform_open(rng);
      return d.location() +
             d.scale() * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    case Family::Laplace: {
      const double u = uniform_open(rng) - 0.5;
      const double mag = -std::log1p(-2.0 * std::abs(u));
      return d.location() + (u < 0.0 ? -mag : mag) * d.scale();
    }
    case Family::Logistic: {
      const double u = uniform_open(rng);
      return d.location() + d.scale() * (std::log(u) - std::log1p(-u));
    }
  }
  return d.location();
}

}  // namespace cheaptalk
