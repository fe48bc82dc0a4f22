#include "dprh/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dprh/numerics.hpp"

namespace dprh {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int classify(const CensoredPair& pair) {
  if (pair.d1 && pair.d2) {
    if (pair.t1 == pair.t2)
      throw std::domain_error(
          "classify: fully observed tie t1 == t2 (null set for the "
          "continuous model; discard simultaneous events)");
    return pair.t1 > pair.t2 ? 1 : 2;
  }
  if (pair.d1 && !pair.d2) return pair.t1 >= pair.t2 ? 3 : 5;
  if (!pair.d1 && pair.d2) return pair.t2 >= pair.t1 ? 4 : 6;
  return pair.t1 >= pair.t2 ? 7 : 8;
}

std::array<int, 8> set_counts(std::span<const CensoredPair> data) {
  std::array<int, 8> counts{};
  for (const auto& pair : data) ++counts[classify(pair) - 1];
  return counts;
}

CompleteMle complete_mle_closed_form(std::span<const CensoredPair> data,
                                     const Baseline& baseline) {
  std::vector<double> log_f_max;     // ln F0 of the larger coordinate, all pairs
  std::vector<double> gap1, gap2;    // ln F0(max) - ln F0(min) within I1 / I2
  int m1 = 0, m2 = 0;
  for (const auto& pair : data) {
    if (!pair.d1 || !pair.d2)
      throw std::invalid_argument(
          "complete_mle_closed_form: all pairs must be fully observed");
    const int set = classify(pair);
    const double l1 = baseline.log_cdf(pair.t1);
    const double l2 = baseline.log_cdf(pair.t2);
    if (set == 1) {
      ++m1;
      log_f_max.push_back(l1);
      gap1.push_back(l1 - l2);
    } else {
      ++m2;
      log_f_max.push_back(l2);
      gap2.push_back(l2 - l1);
    }
  }
  if (m1 == 0 || m2 == 0)
    throw std::runtime_error(
        "complete_mle_closed_form: estimate undefined, need both orderings "
        "present (m1 = " + std::to_string(m1) + ", m2 = " + std::to_string(m2) + ")");
  const double denom = pairwise_sum(log_f_max);  // negative
  const double g1 = pairwise_sum(gap1);          // positive
  const double g2 = pairwise_sum(gap2);
  if (!(denom < 0.0) || !(g1 > 0.0) || !(g2 > 0.0))
    throw std::runtime_error(
        "complete_mle_closed_form: zero denominator in a closed-form "
        "estimate (degenerate data)");
  return CompleteMle{-m1 / denom, -m2 / denom, m2 / g2, m1 / g1};
}

double complete_log_likelihood(const DprhParams& params,
                               std::span<const CensoredPair> data) {
  std::vector<double> l_max, l_all, gap1, gap2, log_dens;
  int m1 = 0, m2 = 0;
  const Baseline& b = params.baseline;
  for (const auto& pair : data) {
    if (!pair.d1 || !pair.d2)
      throw std::invalid_argument(
          "complete_log_likelihood: all pairs must be fully observed");
    const int set = classify(pair);
    const double l1 = b.log_cdf(pair.t1);
    const double l2 = b.log_cdf(pair.t2);
    if (set == 1) {
      ++m1;
      l_max.push_back(l1);
      gap1.push_back(l2 - l1);
    } else {
      ++m2;
      l_max.push_back(l2);
      gap2.push_back(l1 - l2);
    }
    l_all.push_back(l1 + l2);
    log_dens.push_back(b.log_pdf(pair.t1) + b.log_pdf(pair.t2));
  }
  const double d = pairwise_sum(l_max);
  return m1 * std::log(params.theta1) + params.theta1 * d +
         m2 * std::log(params.theta2) + params.theta2 * d +
         m2 * std::log(params.theta1_prime) + params.theta1_prime * pairwise_sum(gap2) +
         m1 * std::log(params.theta2_prime) + params.theta2_prime * pairwise_sum(gap1) +
         pairwise_sum(log_dens) - pairwise_sum(l_all);
}

namespace {

// log of the f5/f6 bracket
//   s - other * e^{x*delta} + s * other * expm1(x*delta) / x
// via a signed log-sum-exp over its three terms; the |x| < eps band uses
// the L'Hopital limit own + s * other * delta.  Returns -inf when the
// total is nonpositive.
double log_mixture_bracket(double own, double other, double s, double x,
                           double delta) {
  if (std::fabs(x) < kCaseEpsilon) {
    const double limit = own + s * other * delta;
    return limit > 0.0 ? std::log(limit) : -kInf;
  }
  const double w = x * delta;
  double log_ratio;  // log(expm1(w)/x), the quotient is >= 0
  if (w == 0.0) {
    log_ratio = -kInf;
  } else if (w > 0.0) {
    const double log_expm1 =
        w > 700.0 ? w + std::log1p(-std::exp(-w)) : std::log(std::expm1(w));
    log_ratio = log_expm1 - std::log(x);
  } else {
    log_ratio = std::log(std::expm1(w) / x);
  }
  const SignedLog terms[3] = {
      {+1, std::log(s)},
      {-1, std::log(other) + w},
      {+1, std::log(s * other) + log_ratio},
  };
  const SignedLog total = signed_log_sum(terms);
  return total.sign > 0 ? total.log_mag : -kInf;
}

}  // namespace

double log_pair_contribution(const DprhParams& params,
                             const CensoredPair& pair) {
  const int set = classify(pair);
  const Baseline& b = params.baseline;
  const double s = params.theta_sum();
  const double l1 = b.log_cdf(pair.t1);
  const double l2 = b.log_cdf(pair.t2);
  switch (set) {
    case 1:
    case 2:
      return log_joint_pdf(params, pair.t1, pair.t2);
    case 3: {
      const double lf1 = b.log_pdf(pair.t1);
      if (lf1 == -kInf || l2 == -kInf) return -kInf;
      return std::log(params.theta1) + lf1 +
             (s - params.theta2_prime - 1.0) * l1 + params.theta2_prime * l2;
    }
    case 4: {
      const double lf2 = b.log_pdf(pair.t2);
      if (lf2 == -kInf || l1 == -kInf) return -kInf;
      return std::log(params.theta2) + lf2 + params.theta1_prime * l1 +
             (s - params.theta1_prime - 1.0) * l2;
    }
    case 5: {
      const double lf1 = b.log_pdf(pair.t1);
      if (lf1 == -kInf || l2 == -kInf) return -kInf;
      const double bracket =
          log_mixture_bracket(params.theta1, params.theta2, s,
                              s - params.theta1_prime, l2 - l1);
      if (bracket == -kInf) return -kInf;
      return lf1 + (s - 1.0) * l1 + bracket;
    }
    case 6: {
      const double lf2 = b.log_pdf(pair.t2);
      if (lf2 == -kInf || l1 == -kInf) return -kInf;
      const double bracket =
          log_mixture_bracket(params.theta2, params.theta1, s,
                              s - params.theta2_prime, l1 - l2);
      if (bracket == -kInf) return -kInf;
      return lf2 + (s - 1.0) * l2 + bracket;
    }
    case 7:
    case 8:
      return log_joint_cdf(params, pair.t1, pair.t2);
    default:
      throw std::logic_error("unreachable");
  }
}

double censored_log_likelihood(const DprhParams& params,
                               std::span<const CensoredPair> data) {
  std::vector<double> contributions(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    contributions[i] = log_pair_contribution(params, data[i]);
    if (contributions[i] == -kInf) return -kInf;
  }
  return pairwise_sum(contributions);
}

}  // namespace dprh
