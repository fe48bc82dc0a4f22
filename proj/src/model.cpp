#include "dprh/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dprh/numerics.hpp"

namespace dprh {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DprhParams::DprhParams(double t1, double t2, double t1p, double t2p, Baseline b)
    : theta1(t1),
      theta2(t2),
      theta1_prime(t1p),
      theta2_prime(t2p),
      baseline(std::move(b)) {
  const double values[] = {theta1, theta2, theta1_prime, theta2_prime};
  const char* names[] = {"theta1", "theta2", "theta1_prime", "theta2_prime"};
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(values[i]) || values[i] <= 0.0)
      throw std::invalid_argument(std::string("DprhParams: ") + names[i] +
                                  " must be a positive real (got " +
                                  std::to_string(values[i]) + ")");
  }
}

CdfCase DprhParams::case_id() const {
  const double s = theta_sum();
  const bool deg1 = std::fabs(s - theta1_prime) < kCaseEpsilon;
  const bool deg2 = std::fabs(s - theta2_prime) < kCaseEpsilon;
  if (deg1 && deg2) return CdfCase::kCase4;
  if (deg1) return CdfCase::kCase2;
  if (deg2) return CdfCase::kCase3;
  return CdfCase::kCase1;
}

ReversedHazardVector reversed_hazard_vector(const DprhParams& p, double y1,
                                            double y2) {
  const double y_min = std::min(y1, y2);
  const double r_min = p.baseline.reversed_hazard(y_min);
  ReversedHazardVector v{p.theta1 * r_min, p.theta2 * r_min, std::nullopt};
  if (y1 < y2)
    v.off_diagonal = p.theta1_prime * p.baseline.reversed_hazard(y1);
  else if (y1 > y2)
    v.off_diagonal = p.theta2_prime * p.baseline.reversed_hazard(y2);
  return v;
}

double log_joint_pdf(const DprhParams& p, double y1, double y2) {
  if (y1 == y2)
    throw std::domain_error(
        "log_joint_pdf: y1 == y2 is a null set for the continuous model");
  const double lf1 = p.baseline.log_pdf(y1);
  const double lf2 = p.baseline.log_pdf(y2);
  if (lf1 == -kInf || lf2 == -kInf) return -kInf;
  const double l1 = p.baseline.log_cdf(y1);
  const double l2 = p.baseline.log_cdf(y2);
  const double s = p.theta_sum();
  if (y1 < y2) {
    return std::log(p.theta1_prime) + std::log(p.theta2) + lf1 + lf2 +
           (p.theta1_prime - 1.0) * l1 + (s - p.theta1_prime - 1.0) * l2;
  }
  return std::log(p.theta1) + std::log(p.theta2_prime) + lf1 + lf2 +
         (s - p.theta2_prime - 1.0) * l1 + (p.theta2_prime - 1.0) * l2;
}

double joint_pdf(const DprhParams& p, double y1, double y2) {
  const double lp = log_joint_pdf(p, y1, y2);
  return lp == -kInf ? 0.0 : std::exp(lp);
}

// One evaluation path covers all four parameter cases: for y_min = y1,
//   F = F0(y1)^s * [1 + theta2 * expm1((s - theta1') * (L2 - L1)) / (s - theta1')]
// and the logarithmic case-2/3/4 forms are the |s - theta_i'| < eps limits
// of the same bracket.
double log_joint_cdf(const DprhParams& p, double y1, double y2) {
  const double l1 = p.baseline.log_cdf(y1);
  const double l2 = p.baseline.log_cdf(y2);
  if (l1 == -kInf || l2 == -kInf) return -kInf;
  const double s = p.theta_sum();
  if (y1 <= y2) {
    return s * l1 + log1p_coef_expm1_ratio(p.theta2, s - p.theta1_prime,
                                           l2 - l1, kCaseEpsilon);
  }
  return s * l2 + log1p_coef_expm1_ratio(p.theta1, s - p.theta2_prime, l1 - l2,
                                         kCaseEpsilon);
}

double joint_cdf(const DprhParams& p, double y1, double y2) {
  const double lc = log_joint_cdf(p, y1, y2);
  return lc == -kInf ? 0.0 : std::exp(lc);
}

double log_marginal_cdf(const DprhParams& p, int which, double y) {
  if (which != 1 && which != 2)
    throw std::invalid_argument("marginal_cdf: which must be 1 or 2");
  const double l = p.baseline.log_cdf(y);
  if (l == -kInf) return -kInf;
  const double s = p.theta_sum();
  const double coef = (which == 1) ? p.theta2 : p.theta1;
  const double x = s - ((which == 1) ? p.theta1_prime : p.theta2_prime);
  // Limit of the joint CDF as the other coordinate grows to the upper
  // support end (its log F0 tends to 0).
  return s * l + log1p_coef_expm1_ratio(coef, x, -l, kCaseEpsilon);
}

double marginal_cdf(const DprhParams& p, int which, double y) {
  const double lc = log_marginal_cdf(p, which, y);
  return lc == -kInf ? 0.0 : std::exp(lc);
}

double marginal_pdf(const DprhParams& p, int which, double y) {
  if (which != 1 && which != 2)
    throw std::invalid_argument("marginal_pdf: which must be 1 or 2");
  const double lf = p.baseline.log_pdf(y);
  if (lf == -kInf) return 0.0;
  const double l = p.baseline.log_cdf(y);
  const double s = p.theta_sum();
  const double own = (which == 1) ? p.theta1 : p.theta2;
  const double own_prime = (which == 1) ? p.theta1_prime : p.theta2_prime;
  const double other = (which == 1) ? p.theta2 : p.theta1;
  const double x = s - own_prime;
  // f_{Yi}(y) = f0 u^{s-1} [theta_i + theta_i' theta_{3-i} expm1(-x L)/x]
  const double log_bracket =
      std::log(own) +
      log1p_coef_expm1_ratio(own_prime * other / own, x, -l, kCaseEpsilon);
  return std::exp(lf + (s - 1.0) * l + log_bracket);
}

double max_cdf(const DprhParams& p, double y) {
  const double l = p.baseline.log_cdf(y);
  return l == -kInf ? 0.0 : std::exp(p.theta_sum() * l);
}

double prob_first_exceeds(const DprhParams& p, int i) {
  if (i != 1 && i != 2)
    throw std::invalid_argument("prob_first_exceeds: i must be 1 or 2");
  return (i == 1 ? p.theta1 : p.theta2) / p.theta_sum();
}

double tp2_log_margin(const DprhParams& p, const Tp2Quadruple& q) {
  if (!(q.y11 < q.y12) || !(q.y21 < q.y22))
    throw std::domain_error("tp2: need y11 < y12 and y21 < y22");
  return log_joint_pdf(p, q.y11, q.y21) + log_joint_pdf(p, q.y12, q.y22) -
         log_joint_pdf(p, q.y12, q.y21) - log_joint_pdf(p, q.y11, q.y22);
}

bool tp2_holds(const DprhParams& p, const Tp2Quadruple& q, double tolerance) {
  return tp2_log_margin(p, q) >= -tolerance;
}

double local_dependence_beta(const DprhParams& p, double y1, double y2) {
  if (y1 == y2)
    throw std::domain_error("local_dependence_beta: y1 == y2 not allowed");
  const double l1 = p.baseline.log_cdf(y1);
  const double l2 = p.baseline.log_cdf(y2);
  if (l1 == -kInf || l2 == -kInf)
    throw std::domain_error("local_dependence_beta: F0(y) = 0 at an argument");
  // i = index of the smaller coordinate.
  const bool first_smaller = y1 < y2;
  const double theta_i = first_smaller ? p.theta1 : p.theta2;
  const double theta_o = first_smaller ? p.theta2 : p.theta1;
  const double prime_i = first_smaller ? p.theta1_prime : p.theta2_prime;
  const double li = first_smaller ? l1 : l2;
  const double lo = first_smaller ? l2 : l1;
  const double s = p.theta_sum();
  const double x = s - prime_i;
  const double delta = lo - li;  // >= 0
  const double mix = prime_i * theta_o;
  if (std::fabs(x) < kCaseEpsilon) {
    return (prime_i + mix * delta) / (theta_i + mix * delta);
  }
  const double a = theta_i - prime_i;
  // Divide numerator and denominator by the dominant exponential so that
  // the surviving weight w lies in (0, 1].  Both may be negative together
  // (they share a signed common factor relative to F*f and F1*F2); the
  // ratio itself is the positive quantity.
  const double w = std::exp(-std::fabs(x) * delta);
  double num, den;
  if (x > 0.0) {
    num = prime_i * a * w + mix;
    den = s * a * w + mix;
  } else {
    num = prime_i * a + mix * w;
    den = s * a + mix * w;
  }
  if (den == 0.0 || !(num / den > 0.0))
    throw std::domain_error("local_dependence_beta: degenerate denominator");
  return num / den;
}

double conditional_cdf(const DprhParams& p, int pred_which, double y_pred,
                       double y_cond) {
  if (pred_which != 1 && pred_which != 2)
    throw std::invalid_argument("conditional_cdf: pred_which must be 1 or 2");
  const int cond_which = 3 - pred_which;
  const double lf_cond = p.baseline.log_pdf(y_cond);
  if (lf_cond == -kInf)
    throw std::domain_error(
        "conditional_cdf: conditioning point outside the support");
  const double lp = p.baseline.log_cdf(y_pred);
  if (lp == -kInf) return 0.0;
  const double lc = p.baseline.log_cdf(y_cond);
  const double s = p.theta_sum();
  const double prime_pred = (pred_which == 1) ? p.theta1_prime : p.theta2_prime;
  const double prime_cond = (pred_which == 1) ? p.theta2_prime : p.theta1_prime;
  const double theta_pred = (pred_which == 1) ? p.theta1 : p.theta2;
  const double theta_cond = (pred_which == 1) ? p.theta2 : p.theta1;

  // N = integral of f(u, y_cond) over u <= y_pred  (= dF/dy_cond section).
  double log_n;
  if (y_pred < y_cond) {
    log_n = std::log(theta_cond) + lf_cond + prime_pred * lp +
            (s - prime_pred - 1.0) * lc;
  } else {
    const double x = s - prime_cond;
    log_n = lf_cond + (s - 1.0) * lc + std::log(theta_cond) +
            log1p_coef_expm1_ratio(theta_pred * prime_cond / theta_cond, x,
                                   lp - lc, kCaseEpsilon);
  }
  const double den = marginal_pdf(p, cond_which, y_cond);
  if (!(den > 0.0))
    throw std::domain_error("conditional_cdf: vanishing marginal density");
  const double value = std::exp(log_n - std::log(den));
  return std::min(value, 1.0);
}

}  // namespace dprh
