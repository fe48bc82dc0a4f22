#include "dprh/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "dprh/numerics.hpp"

namespace dprh {

double iw_joint_cdf_tied(double theta, double theta1_prime, double theta2_prime,
                         double alpha, double y1, double y2) {
  if (!(theta > 0.0) || !(theta1_prime > 0.0) || !(theta2_prime > 0.0) ||
      !(alpha > 0.0))
    throw std::invalid_argument("iw_joint_cdf_tied: parameters must be positive");
  if (y1 <= 0.0 || y2 <= 0.0) return 0.0;
  const double s = 2.0 * theta;
  // Work on the y1 < y2 branch; mirror otherwise.
  const double lo = std::min(y1, y2);
  const double hi = std::max(y1, y2);
  const double prime = (y1 <= y2) ? theta1_prime : theta2_prime;
  const double g_lo = std::pow(lo, -alpha);  // -log F0(lo)
  const double g_hi = std::pow(hi, -alpha);
  const double gap = g_lo - g_hi;  // >= 0
  if (std::fabs(s - prime) < kCaseEpsilon) {
    // Logarithmic limit: F0(lo)^{2 theta} (1 + theta * (g_lo - g_hi)).
    return std::exp(-s * g_lo) * (1.0 + theta * gap);
  }
  const double denom = s - prime;
  return std::exp(-s * g_hi) * ((theta - prime) / denom * std::exp(-s * gap) +
                                theta / denom * std::exp(-prime * gap));
}

double solve_censoring_threshold(const std::function<double(double)>& marginal_cdf,
                                 double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("solve_censoring_threshold: p must be in (0,1)");
  auto mean_cdf = [&](double z) {
    const double tol = std::max(1e-14, 1e-11 * z);
    return integrate(marginal_cdf, 0.0, z, tol) / z;
  };
  auto g = [&](double z) { return mean_cdf(z) - p; };
  double hi = 1.0;
  while (g(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e6)
      throw std::runtime_error(
          "solve_censoring_threshold: no bracket found up to z = 1e6");
  }
  double lo = hi * 0.5;
  while (lo > 1e-12 && g(lo) > 0.0) lo *= 0.5;
  const double z = find_root(g, lo, hi, 1e-12 * std::max(1.0, hi));
  if (std::fabs(g(z)) > 1e-8)
    throw std::runtime_error(
        "solve_censoring_threshold: residual above 1e-8 after root solve");
  return z;
}

CensoringScheme make_censoring_scheme(const DprhParams& params, double p) {
  if (!(p >= 0.0 && p < 1.0))
    throw std::domain_error("censoring proportion p must be in [0,1)");
  CensoringScheme scheme;
  scheme.p = p;
  if (p == 0.0) return scheme;
  scheme.z1 = solve_censoring_threshold(
      [&](double c) { return marginal_cdf(params, 1, c); }, p);
  scheme.z2 = solve_censoring_threshold(
      [&](double c) { return marginal_cdf(params, 2, c); }, p);
  return scheme;
}

std::vector<CensoredPair> generate_sample(const DprhParams& params, int n,
                                          double p, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("generate_sample: n must be >= 0");
  const CensoringScheme scheme = make_censoring_scheme(params, p);
  const double s = params.theta_sum();
  const double branch_cut = params.theta2 / s;  // 1/2 under tied theta
  std::vector<CensoredPair> sample(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    RngStream rng(RngStream::derive(seed, static_cast<std::uint64_t>(k)));
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double u3 = rng.uniform();
    const double u4 = rng.uniform();
    const double u5 = rng.uniform();
    const double c1 = scheme.z1 * u1;
    const double c2 = scheme.z2 * u2;
    const double log_f0_max = std::log(u4) / s;  // F0(max)^s = U4
    double t1, t2;
    if (u3 >= branch_cut) {
      t1 = params.baseline.quantile_from_log(log_f0_max);
      t2 = params.baseline.quantile_from_log(log_f0_max +
                                             std::log(u5) / params.theta2_prime);
    } else {
      t2 = params.baseline.quantile_from_log(log_f0_max);
      t1 = params.baseline.quantile_from_log(log_f0_max +
                                             std::log(u5) / params.theta1_prime);
    }
    CensoredPair& pair = sample[static_cast<std::size_t>(k)];
    pair.d1 = t1 >= c1;
    pair.d2 = t2 >= c2;
    pair.t1 = pair.d1 ? t1 : c1;
    pair.t2 = pair.d2 ? t2 : c2;
  }
  return sample;
}

std::vector<CensoredPair> generate_sample_iw(double theta, double theta1_prime,
                                             double theta2_prime, double alpha,
                                             int n, double p,
                                             std::uint64_t seed) {
  DprhParams params(theta, theta, theta1_prime, theta2_prime,
                    Baseline::inverse_weibull(alpha));
  return generate_sample(params, n, p, seed);
}

}  // namespace dprh
