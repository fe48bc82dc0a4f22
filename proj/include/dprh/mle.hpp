#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dprh/likelihood.hpp"
#include "dprh/numerics.hpp"

namespace dprh {

// Tie/fix constraints applied during estimation.
struct TieSpec {
  bool tie_theta = false;        // theta1 = theta2 = theta
  bool tie_theta_prime = false;  // theta1' = theta2' = theta'
  // theta1' = theta2' = theta (the independence null of the dependence
  // test); implies both ties above.
  bool tie_prime_to_theta = false;
  // Known common theta (implies tie_theta); excluded from the free vector.
  std::optional<double> fixed_theta;
  // Baseline parameters held at their initial values.
  bool fix_eta = false;
};

// Maps between the free-parameter vector on its natural scale, the
// unconstrained image used by the optimizer (log for positive entries,
// identity for the location mu), and full DprhParams.
class ParamLayout {
 public:
  ParamLayout(BaselineFamily family, std::vector<double> eta_init, TieSpec spec);

  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  // Whether free parameter i is positivity-constrained (all are, except a
  // location parameter).
  bool is_positive(int i) const { return positive_.at(i); }
  const TieSpec& spec() const { return spec_; }
  BaselineFamily family() const { return family_; }

  std::vector<double> pack(const DprhParams& p) const;
  DprhParams unpack(std::span<const double> natural) const;
  bool valid(std::span<const double> natural) const;
  std::vector<double> to_unconstrained(std::span<const double> natural) const;
  std::vector<double> to_natural(std::span<const double> unconstrained) const;

 private:
  BaselineFamily family_;
  std::vector<double> eta_init_;
  TieSpec spec_;
  std::vector<std::string> names_;
  std::vector<bool> positive_;
  int eta_offset_ = 0;  // index of the first eta entry in the free vector
};

struct FitOptions {
  int starts = 5;          // multi-start count (first start is the given init)
  double jitter = 0.3;     // start jitter, unconstrained scale
  std::uint64_t seed = 20240901;
  int max_iters = 4000;
  bool refine = true;      // quasi-Newton polish after the simplex
  // Optimize log-transformed positive parameters (default) or the natural
  // scale directly; estimates agree on well-conditioned problems.
  bool log_scale = true;
  double ci_alpha = 0.05;
  bool compute_dispersion = true;
  int threads = 1;         // parallelism across restarts
};

struct FitResult {
  explicit FitResult(DprhParams p) : params(std::move(p)) {}

  DprhParams params;
  double loglik = 0.0;
  double aic = 0.0;
  std::vector<std::string> free_names;
  std::vector<double> free_values;
  Matrix dispersion;  // empty when unavailable (see dispersion_error)
  std::vector<double> std_errors;
  std::vector<std::pair<double, double>> ci;
  double ci_alpha = 0.05;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
  // Estimate within 10 * kCaseEpsilon of a degenerate manifold
  // theta1+theta2 = theta_i'; asymptotic theory may be unreliable there.
  bool near_degenerate = false;
  // Observed information had a nonpositive diagonal entry.
  bool hessian_warning = false;
  std::string dispersion_error;  // nonempty when dispersion/CI computation failed
};

double aic_value(double loglik, int free_param_count);

// Maximizes the censored log-likelihood over the layout's free parameters.
// Multi-start Nelder-Mead in the unconstrained space with an optional
// quasi-Newton refinement pass; deterministic for a fixed seed.
FitResult fit_mle(std::span<const CensoredPair> data, const ParamLayout& layout,
                  std::span<const double> init_natural,
                  const FitOptions& opts = {});

// Negative Hessian of the censored log-likelihood at `natural` (original
// scale), central finite differences with per-coordinate step
// max(1e-5, 1e-4 |lambda_i|), symmetrized.
Matrix observed_information(const ParamLayout& layout,
                            std::span<const double> natural,
                            std::span<const CensoredPair> data);

// lambda_hat_i +- z_{alpha/2} sqrt(Sigma_ii).  Throws when a variance is
// negative, naming the parameter.
std::vector<std::pair<double, double>> asymptotic_ci(
    std::span<const double> estimates, const std::vector<std::string>& names,
    const Matrix& dispersion, double alpha);

struct LrtResult {
  double statistic;
  int dof;
  double p_value;
  double loglik_null;
  double loglik_alt;
};

// 2 (logL_alt - logL_null) against the chi-square upper tail; the null
// layout must be nested in the alternative.
LrtResult likelihood_ratio_test(std::span<const CensoredPair> data,
                                const ParamLayout& null_layout,
                                std::span<const double> null_init,
                                const ParamLayout& alt_layout,
                                std::span<const double> alt_init,
                                const FitOptions& opts = {});

}  // namespace dprh
