#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dprh/likelihood.hpp"

namespace dprh {

// Closed-form joint CDF of the tied-theta (theta1 = theta2 = theta) DPRH
// model with inverse Weibull baseline, transcribed directly from the
// two-term mixture form; the logarithmic limit is used when 2*theta is
// within kCaseEpsilon of a primed parameter.
double iw_joint_cdf_tied(double theta, double theta1_prime, double theta2_prime,
                         double alpha, double y1, double y2);

struct CensoringScheme {
  double p = 0.0;
  double z1 = 0.0;
  double z2 = 0.0;
};

// Solves (1/z) * int_0^z F(c) dc = p for z: the censoring time is z*U with
// U uniform, so the left side is P(Y <= C).  Bracketed root finding with
// adaptive quadrature for the inner integral; residual below 1e-8.
double solve_censoring_threshold(const std::function<double(double)>& marginal_cdf,
                                 double p);

// Thresholds z1, z2 from the model's two marginal CDFs; p = 0 disables
// censoring (z = 0).
CensoringScheme make_censoring_scheme(const DprhParams& params, double p);

// Left-censored bivariate sample of size n.  Five uniforms per observation:
// two censoring times c_j = z_j U_j, the branch pick (coordinate 1 carries
// the max when U3 >= theta2/(theta1+theta2), i.e. >= 1/2 under tied theta,
// ties taking the first branch), the max draw F0(max)^(theta1+theta2) = U4,
// and the conditional ratio F0(min)/F0(max) with CDF r^(theta'), inverted
// through the baseline quantile.  Deterministic per-index substreams.
std::vector<CensoredPair> generate_sample(const DprhParams& params, int n,
                                          double p, std::uint64_t seed);

// Convenience wrapper: inverse Weibull baseline with tied theta.
std::vector<CensoredPair> generate_sample_iw(double theta, double theta1_prime,
                                             double theta2_prime, double alpha,
                                             int n, double p,
                                             std::uint64_t seed);

}  // namespace dprh
