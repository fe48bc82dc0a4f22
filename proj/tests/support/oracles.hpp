// Test-side oracles, kept independent of the library's numerical paths:
// the integrator here is adaptive Gauss-Legendre (the library uses adaptive
// Simpson), derivatives are central differences, and distributional checks
// go through empirical CDFs.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dprh/likelihood.hpp"
#include "dprh/numerics.hpp"

namespace oracle {

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

// 20-point Gauss-Legendre nodes/weights on [-1, 1], computed by Newton
// iteration on the Legendre recurrence.
inline const std::vector<std::pair<double, double>>& gl_nodes() {
  static const std::vector<std::pair<double, double>> nodes = [] {
    constexpr int n = 20;
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double p1 = 0.0, p0 = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-15) break;
      }
      p0 = 1.0;
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      out.emplace_back(x, 2.0 / ((1.0 - x * x) * dp * dp));
    }
    return out;
  }();
  return nodes;
}

inline double gl20(const Fn1& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (const auto& [x, w] : gl_nodes()) sum += w * f(mid + half * x);
  return half * sum;
}

inline double integrate_impl(const Fn1& f, double a, double b, double whole,
                             double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gl20(f, a, mid);
  const double right = gl20(f, mid, b);
  if (depth <= 0 || std::fabs(left + right - whole) <= tol)
    return left + right;
  return integrate_impl(f, a, mid, left, 0.5 * tol, depth - 1) +
         integrate_impl(f, mid, b, right, 0.5 * tol, depth - 1);
}

inline double integrate(const Fn1& f, double a, double b, double tol = 1e-9,
                        int depth = 24) {
  if (a == b) return 0.0;
  return integrate_impl(f, a, b, gl20(f, a, b), tol, depth);
}

// Integral over (a, +inf) via y = a + t/(1-t); good for fast-decaying
// integrands (exponential tails).
inline double integrate_to_inf(const Fn1& f, double a, double tol = 1e-9) {
  auto g = [&](double t) {
    const double om = 1.0 - t;
    const double y = a + t / om;
    return f(y) / (om * om);
  };
  return integrate(g, 0.0, 1.0, tol);
}

// Integral over (a, +inf) for integrands with an algebraic tail
// ~ C y^-(alpha+1): direct on (a, a+1], then t = (y-a)^-alpha on the
// remainder, which maps the tail to a bounded smooth integrand on (0, 1].
inline double integrate_to_inf_tail(const Fn1& f, double a, double alpha,
                                    double tol = 1e-9) {
  const double head = integrate(f, a, a + 1.0, tol);
  auto g = [&](double t) {
    const double w = std::pow(t, -1.0 / alpha);
    return f(a + w) * w / (alpha * t);
  };
  return head + integrate(g, 0.0, 1.0, tol);
}

// Central difference d/dy.
inline double central_diff(const Fn1& f, double y, double h) {
  return (f(y + h) - f(y - h)) / (2.0 * h);
}

// Mixed second partial d^2/dx dy by a 4-point stencil.
inline double mixed_second(const Fn2& f, double x, double y, double h) {
  return (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) +
          f(x - h, y - h)) /
         (4.0 * h * h);
}

inline double ks_distance_1d(std::vector<double> sample, const Fn1& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double model = cdf(sample[i]);
    sup = std::max(sup, std::fabs((i + 1.0) / n - model));
    sup = std::max(sup, std::fabs(i / n - model));
  }
  return sup;
}

// Supremum over the sample points of |empirical joint CDF - model CDF|.
inline double ks_distance_2d(std::span<const std::pair<double, double>> sample,
                             const Fn2& cdf) {
  const std::size_t n = sample.size();
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (sample[j].first <= sample[i].first &&
          sample[j].second <= sample[i].second)
        ++count;
    const double empirical = static_cast<double>(count) / static_cast<double>(n);
    sup = std::max(sup, std::fabs(empirical - cdf(sample[i].first,
                                                  sample[i].second)));
  }
  return sup;
}

// Batch-means Monte-Carlo standard error of a chain mean.
inline double batch_means_mcse(std::span<const double> xs, int batches = 20) {
  const std::size_t n = xs.size();
  const std::size_t len = n / batches;
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += xs[i];
    means.push_back(s / static_cast<double>(len));
  }
  return std::sqrt(dprh::sample_variance(means) / batches);
}

// Marsaglia-Tsang gamma draw (shape, rate), for test fixtures only.
inline double gamma_draw(dprh::RngStream& rng, double shape, double rate) {
  if (shape < 1.0) {
    const double u = rng.uniform();
    return gamma_draw(rng, shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v / rate;
  }
}

// Parameter draws for property tests.
inline double uniform_in(dprh::RngStream& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform();
}

inline dprh::DprhParams random_iw_params(dprh::RngStream& rng,
                                         int force_case = 1) {
  const double t1 = uniform_in(rng, 0.4, 2.2);
  const double t2 = uniform_in(rng, 0.4, 2.2);
  double t1p = uniform_in(rng, 0.4, 2.8);
  double t2p = uniform_in(rng, 0.4, 2.8);
  if (force_case == 2 || force_case == 4) t1p = t1 + t2;
  if (force_case == 3 || force_case == 4) t2p = t1 + t2;
  const double alpha = uniform_in(rng, 0.8, 2.5);
  return dprh::DprhParams(t1, t2, t1p, t2p,
                          dprh::Baseline::inverse_weibull(alpha));
}

}  // namespace oracle
