#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dprh {

enum class BaselineFamily {
  kExponentiatedGumbel,
  kGeneralizedExponential,
  kGeneralizedInverseRayleigh,
  kGeneralizedRayleigh,
  kInverseExponential,
  kBurrIII,
  kInverseWeibull,
};

// Lowercase CLI/config key, e.g. "inverse-weibull".
std::string_view family_key(BaselineFamily f);
BaselineFamily family_from_key(std::string_view key);
// Parameter names in the order stored in eta().
std::vector<std::string> family_param_names(BaselineFamily f);
const std::vector<BaselineFamily>& all_families();

// A univariate baseline distribution: CDF, pdf, their logs, quantile, and
// support bounds.  Values are immutable after construction; every operation
// is a pure function.
class Baseline {
 public:
  // Validates parameters: strictly positive except the location mu of the
  // generalized inverse Rayleigh, which may be any real.
  Baseline(BaselineFamily family, std::vector<double> eta);

  static Baseline exponentiated_gumbel(double lambda);
  static Baseline generalized_exponential(double lambda);
  static Baseline generalized_inverse_rayleigh(double alpha, double lambda,
                                               double mu);
  static Baseline generalized_rayleigh(double alpha, double lambda);
  static Baseline inverse_exponential(double lambda);
  static Baseline burr_iii(double c);
  static Baseline inverse_weibull(double alpha);

  BaselineFamily family() const { return family_; }
  const std::vector<double>& eta() const { return eta_; }
  Baseline with_eta(std::vector<double> eta) const {
    return Baseline(family_, std::move(eta));
  }

  double support_lower() const;
  double support_upper() const;

  // F0(y); values below the support map to 0, above to 1.
  double cdf(double y) const;
  // f0(y); 0 outside the open support.
  double pdf(double y) const;
  // log F0(y); -inf below the support.
  double log_cdf(double y) const;
  double log_pdf(double y) const;
  // y with F0(y) = u, u in (0,1); closed form for all seven families.
  double quantile(double u) const;
  // y with log F0(y) = log_u, log_u in (-inf, 0); avoids underflow when
  // composing powers of F0.
  double quantile_from_log(double log_u) const;
  // r0(y) = f0(y)/F0(y), computed as exp(log f0 - log F0).
  double reversed_hazard(double y) const;

 private:
  BaselineFamily family_;
  std::vector<double> eta_;
};

}  // namespace dprh
