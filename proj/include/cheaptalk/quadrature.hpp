#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration on finite and
// semi-infinite intervals.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "cheaptalk/errors.hpp"

namespace cheaptalk::quadrature {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t intervals = 0;
};

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_intervals = 4000;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod_15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

// Integrates f over the finite intervals delimited by consecutive breakpoints,
// refining whichever segment carries the largest error estimate until the
// total error meets the tolerance.
template <class F>
Result integrate(F&& f, std::span<const double> breakpoints, const Options& opts = {}) {
  std::priority_queue<detail::Segment> queue;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) continue;
    auto seg = detail::gauss_kronrod_15(f, breakpoints[i], breakpoints[i + 1]);
    total += seg.value;
    error += seg.error;
    queue.push(seg);
  }
  std::size_t intervals = queue.size();
  auto converged = [&] {
    return error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  };
  while (!queue.empty() && !converged()) {
    if (intervals >= opts.max_intervals) {
      throw QuadratureFailure("adaptive quadrature did not converge within " +
                              std::to_string(opts.max_intervals) + " intervals");
    }
    const auto worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      throw QuadratureFailure("adaptive quadrature exhausted floating-point resolution");
    }
    const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++intervals;
  }
  if (!std::isfinite(total)) throw QuadratureFailure("integrand produced a non-finite value");
  // Re-sum so the reported value does not carry cancellation from the
  // incremental updates.
  double value = 0.0;
  double err = 0.0;
  while (!queue.empty()) {
    value += queue.top().value;
    err += queue.top().error;
    queue.pop();
  }
  return {value, err, intervals};
}

// Integrates f over the whole real line. Finite breakpoints (sorted
// internally) split the line; the two outer tails are mapped onto [0, 1) by
// x = edge +/- scale * t / (1 - t).
template <class F>
Result integrate_real_line(F&& f, std::vector<double> breakpoints, double scale,
                           const Options& opts = {}) {
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  if (breakpoints.empty()) breakpoints.push_back(0.0);
  const double lo = breakpoints.front();
  const double hi = breakpoints.back();

  // Map the problem onto a single parameter s in (-1, n + 1): s in (-1, 0]
  // covers the left tail, [0, n] walks the finite breakpoints, [n, n + 1)
  // covers the right tail. One adaptive pass then balances error globally.
  const double n = static_cast<double>(breakpoints.size() - 1);
  auto mapped = [&](double s) -> double {
    if (s < 0.0) {
      const double t = -s;
      const double u = 1.0 - t;
      const double x = lo - scale * t / u;
      const double jac = scale / (u * u);
      const double fx = f(x);
      return fx == 0.0 ? 0.0 : fx * jac;
    }
    if (s > n) {
      const double t = s - n;
      const double u = 1.0 - t;
      const double x = hi + scale * t / u;
      const double jac = scale / (u * u);
      const double fx = f(x);
      return fx == 0.0 ? 0.0 : fx * jac;
    }
    const auto idx = std::min(static_cast<std::size_t>(s), breakpoints.size() - 2);
    if (breakpoints.size() == 1) return 0.0;
    const double frac = s - static_cast<double>(idx);
    const double width = breakpoints[idx + 1] - breakpoints[idx];
    return f(breakpoints[idx] + frac * width) * width;
  };
  std::vector<double> params;
  params.reserve(breakpoints.size() + 2);
  params.push_back(-1.0);
  for (std::size_t i = 0; i < breakpoints.size(); ++i) params.push_back(static_cast<double>(i));
  params.push_back(n + 1.0);
  return integrate(mapped, params, opts);
}

}  // namespace cheaptalk::quadrature
