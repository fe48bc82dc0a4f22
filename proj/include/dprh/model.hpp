#pragma once

#include <array>
#include <optional>

#include "dprh/baselines.hpp"

namespace dprh {

// Tolerance for classifying the degenerate manifolds theta1+theta2 = theta_i'.
inline constexpr double kCaseEpsilon = 1e-9;

// Joint-CDF parameter regimes.  Case 1: both sums distinct; Case 2:
// theta1+theta2 = theta1'; Case 3: theta1+theta2 = theta2'; Case 4: both.
enum class CdfCase { kCase1 = 1, kCase2 = 2, kCase3 = 3, kCase4 = 4 };

struct DprhParams {
  double theta1;
  double theta2;
  double theta1_prime;
  double theta2_prime;
  Baseline baseline;

  DprhParams(double t1, double t2, double t1p, double t2p, Baseline b);

  double theta_sum() const { return theta1 + theta2; }
  CdfCase case_id() const;
  bool independent() const {
    return theta1 == theta1_prime && theta2 == theta2_prime;
  }
};

// The reversed hazard vector evaluated at (y1, y2): the two
// diagonal components theta_i * r0(min(y1,y2)) and, when y1 != y2, the
// off-diagonal component of the earlier coordinate (theta1' r0(y1) for
// y1 < y2, theta2' r0(y2) for y1 > y2).
struct ReversedHazardVector {
  double diagonal1;
  double diagonal2;
  double diagonal_sum() const { return diagonal1 + diagonal2; }
  std::optional<double> off_diagonal;  // absent on the diagonal y1 == y2
};
ReversedHazardVector reversed_hazard_vector(const DprhParams& p, double y1,
                                            double y2);

// log of the joint density; -inf outside the support.  y1 == y2 is a null
// set and is rejected with std::domain_error.
double log_joint_pdf(const DprhParams& p, double y1, double y2);
double joint_pdf(const DprhParams& p, double y1, double y2);

// Joint CDF, all four parameter cases; continuous through the degenerate
// manifolds (the logarithmic limit forms are used inside the kCaseEpsilon
// band).
double joint_cdf(const DprhParams& p, double y1, double y2);
double log_joint_cdf(const DprhParams& p, double y1, double y2);

// Marginal CDF / pdf of Y_which, which in {1, 2}.
double marginal_cdf(const DprhParams& p, int which, double y);
double log_marginal_cdf(const DprhParams& p, int which, double y);
double marginal_pdf(const DprhParams& p, int which, double y);

// CDF of max(Y1, Y2): F0(y)^(theta1+theta2).
double max_cdf(const DprhParams& p, double y);

// P(Y_i > Y_{3-i}) = theta_i / (theta_1 + theta_2); free of the primed
// parameters and of the baseline.
double prob_first_exceeds(const DprhParams& p, int i);

// Total positivity of order two on one quadruple: requires y11 < y12 and
// y21 < y22 with no coordinate ties.  tp2_log_margin returns
// log f(y11,y21) + log f(y12,y22) - log f(y12,y21) - log f(y11,y22).
struct Tp2Quadruple {
  double y11, y12, y21, y22;
};
double tp2_log_margin(const DprhParams& p, const Tp2Quadruple& q);
bool tp2_holds(const DprhParams& p, const Tp2Quadruple& q,
               double tolerance = 1e-10);

// Local dependence measure beta(y1, y2) = F * f / (F1 * F2); equals 1
// exactly under independence.
double local_dependence_beta(const DprhParams& p, double y1, double y2);

// P[Y_pred <= y_pred | Y_other = y_cond], pred_which in {1, 2}.  Closed
// form from the joint-CDF partial derivatives; both orderings of
// (y_pred, y_cond) are supported.
double conditional_cdf(const DprhParams& p, int pred_which, double y_pred,
                       double y_cond);

}  // namespace dprh
