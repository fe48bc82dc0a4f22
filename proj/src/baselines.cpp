#include "dprh/baselines.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dprh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FamilyInfo {
  BaselineFamily family;
  std::string_view key;
  std::vector<std::string> params;
};

const std::vector<FamilyInfo>& family_table() {
  static const std::vector<FamilyInfo> table = {
      {BaselineFamily::kExponentiatedGumbel, "exponentiated-gumbel", {"lambda"}},
      {BaselineFamily::kGeneralizedExponential, "generalized-exponential", {"lambda"}},
      {BaselineFamily::kGeneralizedInverseRayleigh,
       "generalized-inverse-rayleigh",
       {"alpha", "lambda", "mu"}},
      {BaselineFamily::kGeneralizedRayleigh, "generalized-rayleigh", {"alpha", "lambda"}},
      {BaselineFamily::kInverseExponential, "inverse-exponential", {"lambda"}},
      {BaselineFamily::kBurrIII, "burr-iii", {"c"}},
      {BaselineFamily::kInverseWeibull, "inverse-weibull", {"alpha"}},
  };
  return table;
}

const FamilyInfo& info_for(BaselineFamily f) {
  for (const auto& fi : family_table())
    if (fi.family == f) return fi;
  throw std::logic_error("unknown baseline family");
}

}  // namespace

std::string_view family_key(BaselineFamily f) { return info_for(f).key; }

BaselineFamily family_from_key(std::string_view key) {
  for (const auto& fi : family_table())
    if (fi.key == key) return fi.family;
  throw std::invalid_argument("unknown baseline key '" + std::string(key) +
                              "' (expected one of: exponentiated-gumbel, "
                              "generalized-exponential, generalized-inverse-rayleigh, "
                              "generalized-rayleigh, inverse-exponential, burr-iii, "
                              "inverse-weibull)");
}

std::vector<std::string> family_param_names(BaselineFamily f) {
  return info_for(f).params;
}

const std::vector<BaselineFamily>& all_families() {
  static const std::vector<BaselineFamily> fams = [] {
    std::vector<BaselineFamily> v;
    for (const auto& fi : family_table()) v.push_back(fi.family);
    return v;
  }();
  return fams;
}

Baseline::Baseline(BaselineFamily family, std::vector<double> eta)
    : family_(family), eta_(std::move(eta)) {
  const FamilyInfo& fi = info_for(family);
  if (eta_.size() != fi.params.size())
    throw std::invalid_argument(std::string(fi.key) + ": expected " +
                                std::to_string(fi.params.size()) +
                                " parameter(s), got " + std::to_string(eta_.size()));
  for (std::size_t i = 0; i < eta_.size(); ++i) {
    if (!std::isfinite(eta_[i]))
      throw std::invalid_argument(std::string(fi.key) + ": parameter " +
                                  fi.params[i] + " must be finite");
    const bool is_location = fi.params[i] == "mu";
    if (!is_location && eta_[i] <= 0.0)
      throw std::invalid_argument(std::string(fi.key) + ": parameter " +
                                  fi.params[i] + " must be positive (got " +
                                  std::to_string(eta_[i]) + ")");
  }
}

Baseline Baseline::exponentiated_gumbel(double lambda) {
  return Baseline(BaselineFamily::kExponentiatedGumbel, {lambda});
}
Baseline Baseline::generalized_exponential(double lambda) {
  return Baseline(BaselineFamily::kGeneralizedExponential, {lambda});
}
Baseline Baseline::generalized_inverse_rayleigh(double alpha, double lambda,
                                                double mu) {
  return Baseline(BaselineFamily::kGeneralizedInverseRayleigh, {alpha, lambda, mu});
}
Baseline Baseline::generalized_rayleigh(double alpha, double lambda) {
  return Baseline(BaselineFamily::kGeneralizedRayleigh, {alpha, lambda});
}
Baseline Baseline::inverse_exponential(double lambda) {
  return Baseline(BaselineFamily::kInverseExponential, {lambda});
}
Baseline Baseline::burr_iii(double c) {
  return Baseline(BaselineFamily::kBurrIII, {c});
}
Baseline Baseline::inverse_weibull(double alpha) {
  return Baseline(BaselineFamily::kInverseWeibull, {alpha});
}

double Baseline::support_lower() const {
  switch (family_) {
    case BaselineFamily::kExponentiatedGumbel:
      return -kInf;
    case BaselineFamily::kGeneralizedInverseRayleigh:
      return eta_[2];
    default:
      return 0.0;
  }
}

double Baseline::support_upper() const { return kInf; }

double Baseline::log_cdf(double y) const {
  if (y <= support_lower()) return -kInf;
  switch (family_) {
    case BaselineFamily::kExponentiatedGumbel:
      return -std::exp(-eta_[0] * y);
    case BaselineFamily::kGeneralizedExponential:
      return std::log(-std::expm1(-eta_[0] * y));
    case BaselineFamily::kGeneralizedInverseRayleigh: {
      const double alpha = eta_[0], lambda = eta_[1], mu = eta_[2];
      const double s = lambda / ((y - mu) * (y - mu));
      const double log_k = std::log(-std::expm1(-s));  // k = 1 - e^{-s}
      return std::log(-std::expm1(alpha * log_k));     // F0 = 1 - k^alpha
    }
    case BaselineFamily::kGeneralizedRayleigh: {
      const double alpha = eta_[0], lambda = eta_[1];
      const double w = (lambda * y) * (lambda * y);
      return alpha * std::log1p(-std::exp(-w));
    }
    case BaselineFamily::kInverseExponential:
      return -eta_[0] / y;
    case BaselineFamily::kBurrIII:
      return -std::log1p(std::pow(y, -eta_[0]));
    case BaselineFamily::kInverseWeibull:
      return -std::pow(y, -eta_[0]);
  }
  return -kInf;
}

double Baseline::log_pdf(double y) const {
  if (y <= support_lower()) return -kInf;
  switch (family_) {
    case BaselineFamily::kExponentiatedGumbel: {
      const double lambda = eta_[0];
      return std::log(lambda) - lambda * y - std::exp(-lambda * y);
    }
    case BaselineFamily::kGeneralizedExponential:
      return std::log(eta_[0]) - eta_[0] * y;
    case BaselineFamily::kGeneralizedInverseRayleigh: {
      const double alpha = eta_[0], lambda = eta_[1], mu = eta_[2];
      const double d = y - mu;
      const double s = lambda / (d * d);
      const double log_k = std::log(-std::expm1(-s));
      return std::log(2.0 * alpha * lambda) - s + (alpha - 1.0) * log_k -
             3.0 * std::log(d);
    }
    case BaselineFamily::kGeneralizedRayleigh: {
      const double alpha = eta_[0], lambda = eta_[1];
      const double w = (lambda * y) * (lambda * y);
      return std::log(2.0 * alpha * lambda * lambda * y) - w +
             (alpha - 1.0) * std::log1p(-std::exp(-w));
    }
    case BaselineFamily::kInverseExponential:
      return std::log(eta_[0]) - 2.0 * std::log(y) - eta_[0] / y;
    case BaselineFamily::kBurrIII: {
      const double c = eta_[0];
      return std::log(c) - (c + 1.0) * std::log(y) -
             2.0 * std::log1p(std::pow(y, -c));
    }
    case BaselineFamily::kInverseWeibull: {
      const double alpha = eta_[0];
      return std::log(alpha) - (alpha + 1.0) * std::log(y) - std::pow(y, -alpha);
    }
  }
  return -kInf;
}

double Baseline::cdf(double y) const { return std::exp(log_cdf(y)); }

double Baseline::pdf(double y) const {
  const double lp = log_pdf(y);
  return lp == -kInf ? 0.0 : std::exp(lp);
}

double Baseline::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("baseline quantile: u must be in (0,1)");
  return quantile_from_log(std::log(u));
}

double Baseline::quantile_from_log(double log_u) const {
  if (!(log_u < 0.0) || log_u == -kInf)
    throw std::domain_error("baseline quantile: log u must be in (-inf, 0)");
  switch (family_) {
    case BaselineFamily::kExponentiatedGumbel:
      return -std::log(-log_u) / eta_[0];
    case BaselineFamily::kGeneralizedExponential:
      // y = -log(1-u)/lambda with 1-u = -expm1(log u)
      return -std::log(-std::expm1(log_u)) / eta_[0];
    case BaselineFamily::kGeneralizedInverseRayleigh: {
      const double alpha = eta_[0], lambda = eta_[1], mu = eta_[2];
      const double log_one_minus_u = std::log(-std::expm1(log_u));
      const double k = std::exp(log_one_minus_u / alpha);
      const double s = -std::log1p(-k);
      return mu + std::sqrt(lambda / s);
    }
    case BaselineFamily::kGeneralizedRayleigh: {
      const double alpha = eta_[0], lambda = eta_[1];
      const double t = std::exp(log_u / alpha);  // u^{1/alpha}
      const double w = -std::log1p(-t);
      return std::sqrt(w) / lambda;
    }
    case BaselineFamily::kInverseExponential:
      return eta_[0] / (-log_u);
    case BaselineFamily::kBurrIII: {
      // y = (u/(1-u))^{1/c}
      const double log_ratio = log_u - std::log(-std::expm1(log_u));
      return std::exp(log_ratio / eta_[0]);
    }
    case BaselineFamily::kInverseWeibull:
      return std::exp(-std::log(-log_u) / eta_[0]);
  }
  throw std::logic_error("unreachable");
}

double Baseline::reversed_hazard(double y) const {
  const double lc = log_cdf(y);
  if (lc == -kInf)
    throw std::domain_error("reversed hazard: F0(y) = 0 at y = " +
                            std::to_string(y));
  return std::exp(log_pdf(y) - lc);
}

}  // namespace dprh
