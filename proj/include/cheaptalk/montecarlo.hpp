#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "cheaptalk/distributions.hpp"
#include "cheaptalk/errors.hpp"
#include "cheaptalk/evolving.hpp"
#include "cheaptalk/game.hpp"

namespace cheaptalk {

// Running mean and sum of squared deviations; merge() is Chan's pairwise update.
struct RunningStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  void merge(const RunningStats& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(count + o.count);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / n;
    m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
    count += o.count;
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double std_error() const {
    return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;

  static Estimate from(const RunningStats& s) { return {s.mean, s.std_error(), s.count}; }
  bool within(double truth, double k_sigma = 3.0) const {
    return std::abs(mean - truth) <= k_sigma * std_error;
  }
};

struct SimulationOptions {
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0 = hardware concurrency
  std::uint64_t chunk_size = 1u << 16;
};

namespace detail {

inline std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

inline unsigned resolve_workers(unsigned requested, std::uint64_t chunks) {
  unsigned w = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(w, std::max<std::uint64_t>(chunks, 1)));
}

// Runs `kernel(rng, acc)` once per sample. Samples are split into fixed-size
// chunks with their own seeded stream; chunk c runs on worker c % W and the
// per-chunk accumulators are merged in chunk order, so the result does not
// depend on W.
template <class Acc, class Kernel>
Acc run_chunked(std::uint64_t samples, const SimulationOptions& opts, Kernel kernel) {
  if (samples == 0) throw InvalidConfig("sample count must be at least 1");
  const std::uint64_t chunk = std::max<std::uint64_t>(opts.chunk_size, 1);
  const std::uint64_t chunks = (samples + chunk - 1) / chunk;
  std::vector<Acc> parts(chunks);
  const unsigned workers = resolve_workers(opts.workers, chunks);
  auto work = [&](unsigned w) {
    for (std::uint64_t c = w; c < chunks; c += workers) {
      auto rng = chunk_engine(opts.seed, c);
      const std::uint64_t n = std::min(chunk, samples - c * chunk);
      for (std::uint64_t i = 0; i < n; ++i) kernel(rng, parts[c]);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  Acc total{};
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace detail

struct SimulationReport {
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  Estimate cost;            // (a - theta)^2
  Estimate inference_error; // (a - mu_S)^2, the loss part of the cost
  std::array<Estimate, 2> utility;  // focal user's b * a, indexed [negative, positive]

  const Estimate& utility_of(Bias b) const { return utility[b == Bias::Positive ? 1 : 0]; }
};

namespace detail {

struct GameAcc {
  RunningStats cost;
  RunningStats error;
  std::array<RunningStats, 2> utility;

  void merge(const GameAcc& o) {
    cost.merge(o.cost);
    error.merge(o.error);
    utility[0].merge(o.utility[0]);
    utility[1].merge(o.utility[1]);
  }
};

}  // namespace detail

// User 0 is the focal user for the per-bias utilities.
inline SimulationReport simulate_game(const GameConfig& config, const StrategyProfile& profile,
                                      const InferenceRule& rule, std::uint64_t samples,
                                      const SimulationOptions& opts = {}) {
  if (rule.n_users() != config.n_users()) throw InvalidConfig("inference rule size does not match n_users");
  const int n = config.n_users();
  auto kernel = [&](std::mt19937_64& rng, detail::GameAcc& acc) {
    const ServiceType type = uniform_open(rng) < config.p_high() ? ServiceType::High : ServiceType::Low;
    int k = 0;
    Bias focal = Bias::Negative;
    for (int i = 0; i < n; ++i) {
      const Bias b = uniform_open(rng) < config.q_plus() ? Bias::Positive : Bias::Negative;
      if (i == 0) focal = b;
      k += high_count(profile.strategy(b), type);
    }
    const double a = rule(k);
    const auto& dist = type == ServiceType::High ? config.pair().high() : config.pair().low();
    const double theta = sample(dist, rng);
    const double e = a - theta;
    const double m = a - config.mean(type);
    acc.cost.add(e * e);
    acc.error.add(m * m);
    acc.utility[focal == Bias::Positive ? 1 : 0].add(weight(focal) * a);
  };
  const auto acc = detail::run_chunked<detail::GameAcc>(samples, opts, kernel);
  SimulationReport r;
  r.samples = samples;
  r.seed = opts.seed;
  r.cost = Estimate::from(acc.cost);
  r.inference_error = Estimate::from(acc.error);
  r.utility = {Estimate::from(acc.utility[0]), Estimate::from(acc.utility[1])};
  return r;
}

struct EvolvingReport {
  std::uint64_t episodes = 0;
  std::uint64_t seed = 0;
  Estimate cost;             // per-period (a - theta)^2
  Estimate inference_error;  // per-period (a - mu_S)^2
  // Left-hand sides of the four IC constraints, ordered
  // (positive under L, negative under L, negative under H, positive under H).
  std::array<Estimate, 4> ic;
};

namespace detail {

struct EvolvingAcc {
  RunningStats cost;
  RunningStats error;
  std::array<RunningStats, 4> ic;

  void merge(const EvolvingAcc& o) {
    cost.merge(o.cost);
    error.merge(o.error);
    for (std::size_t i = 0; i < 4; ++i) ic[i].merge(o.ic[i]);
  }
};

}  // namespace detail

// Each episode draws the type, plus one history from each density. The cost
// uses the history of the drawn type; the IC sums use both.
template <CommitmentPolicy Policy>
EvolvingReport simulate_evolving(const GameConfig& config, const Policy& policy, std::uint64_t episodes,
                                 const SimulationOptions& opts = {}) {
  const int horizon = policy.horizon();
  if (horizon < 1) throw InvalidConfig("policy horizon must be positive");
  const double inv_t = 1.0 / horizon;
  auto kernel = [&](std::mt19937_64& rng, detail::EvolvingAcc& acc) {
    const ServiceType type = uniform_open(rng) < config.p_high() ? ServiceType::High : ServiceType::Low;
    std::array<std::vector<double>, 2> hist;  // [low, high]
    for (auto& h : hist) h.reserve(static_cast<std::size_t>(horizon));
    double cost = 0.0;
    double err = 0.0;
    double gap_low = 0.0;
    double gap_high = 0.0;
    for (int k = 0; k < horizon; ++k) {
      const auto on_low = policy.actions(hist[0]);
      const auto on_high = policy.actions(hist[1]);
      gap_low += on_low.a_low - on_low.a_high;
      gap_high += on_high.a_low - on_high.a_high;
      const double theta_low = sample(config.pair().low(), rng);
      const double theta_high = sample(config.pair().high(), rng);
      const bool high = type == ServiceType::High;
      const double a = high ? on_high.a_high : on_low.a_low;
      const double theta = high ? theta_high : theta_low;
      cost += (a - theta) * (a - theta);
      err += (a - config.mean(type)) * (a - config.mean(type));
      hist[0].push_back(theta_low);
      hist[1].push_back(theta_high);
    }
    acc.cost.add(cost * inv_t);
    acc.error.add(err * inv_t);
    acc.ic[0].add(gap_low);
    acc.ic[1].add(-gap_low);
    acc.ic[2].add(gap_high);
    acc.ic[3].add(-gap_high);
  };
  const auto acc = detail::run_chunked<detail::EvolvingAcc>(episodes, opts, kernel);
  EvolvingReport r;
  r.episodes = episodes;
  r.seed = opts.seed;
  r.cost = Estimate::from(acc.cost);
  r.inference_error = Estimate::from(acc.error);
  for (std::size_t i = 0; i < 4; ++i) r.ic[i] = Estimate::from(acc.ic[i]);
  return r;
}

// Monte Carlo estimates of the four IC left-hand sides.
template <CommitmentPolicy Policy>
std::array<Estimate, 4> verify_ic(const GameConfig& config, const Policy& policy, std::uint64_t episodes,
                                  const SimulationOptions& opts = {}) {
  return simulate_evolving(config, policy, episodes, opts).ic;
}

inline std::array<Estimate, 4> verify_ic(const CommitmentSchedule& schedule, std::uint64_t episodes,
                                         const SimulationOptions& opts = {}) {
  const GameConfig config(1, schedule.p_high(), 0.5, schedule.pair());
  return verify_ic(config, schedule, episodes, opts);
}

}  // namespace cheaptalk
