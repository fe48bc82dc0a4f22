#include "dprh/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dprh {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ParamLayout::ParamLayout(BaselineFamily family, std::vector<double> eta_init,
                         TieSpec spec)
    : family_(family), eta_init_(std::move(eta_init)), spec_(spec) {
  // Validate eta by constructing a baseline once.
  Baseline probe(family_, eta_init_);
  if (spec_.tie_prime_to_theta) {
    spec_.tie_theta = true;
    spec_.tie_theta_prime = true;
  }
  if (spec_.fixed_theta) {
    spec_.tie_theta = true;
    if (!(*spec_.fixed_theta > 0.0))
      throw std::invalid_argument("ParamLayout: fixed theta must be positive");
  } else if (spec_.tie_theta) {
    names_.push_back("theta");
    positive_.push_back(true);
  } else {
    names_.push_back("theta1");
    positive_.push_back(true);
    names_.push_back("theta2");
    positive_.push_back(true);
  }
  if (!spec_.tie_prime_to_theta) {
    if (spec_.tie_theta_prime) {
      names_.push_back("theta_prime");
      positive_.push_back(true);
    } else {
      names_.push_back("theta1_prime");
      positive_.push_back(true);
      names_.push_back("theta2_prime");
      positive_.push_back(true);
    }
  }
  eta_offset_ = static_cast<int>(names_.size());
  if (!spec_.fix_eta) {
    for (const auto& pname : family_param_names(family_)) {
      names_.push_back(pname);
      positive_.push_back(pname != "mu");
    }
  }
}

std::vector<double> ParamLayout::pack(const DprhParams& p) const {
  std::vector<double> v;
  if (!spec_.fixed_theta) {
    if (spec_.tie_theta) {
      v.push_back(p.theta1);
    } else {
      v.push_back(p.theta1);
      v.push_back(p.theta2);
    }
  }
  if (!spec_.tie_prime_to_theta) {
    if (spec_.tie_theta_prime) {
      v.push_back(p.theta1_prime);
    } else {
      v.push_back(p.theta1_prime);
      v.push_back(p.theta2_prime);
    }
  }
  if (!spec_.fix_eta)
    for (double e : p.baseline.eta()) v.push_back(e);
  return v;
}

DprhParams ParamLayout::unpack(std::span<const double> natural) const {
  if (static_cast<int>(natural.size()) != size())
    throw std::invalid_argument("ParamLayout::unpack: wrong vector length");
  std::size_t i = 0;
  double t1, t2;
  if (spec_.fixed_theta) {
    t1 = t2 = *spec_.fixed_theta;
  } else if (spec_.tie_theta) {
    t1 = t2 = natural[i++];
  } else {
    t1 = natural[i++];
    t2 = natural[i++];
  }
  double t1p, t2p;
  if (spec_.tie_prime_to_theta) {
    t1p = t2p = t1;
  } else if (spec_.tie_theta_prime) {
    t1p = t2p = natural[i++];
  } else {
    t1p = natural[i++];
    t2p = natural[i++];
  }
  std::vector<double> eta = eta_init_;
  if (!spec_.fix_eta)
    for (std::size_t k = 0; k < eta.size(); ++k) eta[k] = natural[i++];
  return DprhParams(t1, t2, t1p, t2p, Baseline(family_, std::move(eta)));
}

bool ParamLayout::valid(std::span<const double> natural) const {
  if (static_cast<int>(natural.size()) != size()) return false;
  for (int i = 0; i < size(); ++i) {
    if (!std::isfinite(natural[i])) return false;
    if (positive_[i] && natural[i] <= 0.0) return false;
  }
  return true;
}

std::vector<double> ParamLayout::to_unconstrained(
    std::span<const double> natural) const {
  std::vector<double> u(natural.begin(), natural.end());
  for (int i = 0; i < size(); ++i)
    if (positive_[i]) u[i] = std::log(natural[i]);
  return u;
}

std::vector<double> ParamLayout::to_natural(
    std::span<const double> unconstrained) const {
  std::vector<double> v(unconstrained.begin(), unconstrained.end());
  for (int i = 0; i < size(); ++i)
    if (positive_[i]) v[i] = std::exp(unconstrained[i]);
  return v;
}

double aic_value(double loglik, int free_param_count) {
  return -2.0 * loglik + 2.0 * free_param_count;
}

namespace {

double objective(const ParamLayout& layout, std::span<const CensoredPair> data,
                 std::span<const double> point, bool log_scale) {
  std::vector<double> natural =
      log_scale ? layout.to_natural(point)
                : std::vector<double>(point.begin(), point.end());
  if (!layout.valid(natural)) return kInf;
  try {
    const double ll = censored_log_likelihood(layout.unpack(natural), data);
    return ll == -kInf ? kInf : -ll;
  } catch (const std::exception&) {
    return kInf;
  }
}

}  // namespace

FitResult fit_mle(std::span<const CensoredPair> data, const ParamLayout& layout,
                  std::span<const double> init_natural, const FitOptions& opts) {
  if (data.size() < 5)
    throw std::invalid_argument("fit_mle: need at least 5 observations");
  if (!layout.valid(init_natural))
    throw std::invalid_argument(
        "fit_mle: initial values violate positivity constraints");
  const std::vector<double> u0 =
      opts.log_scale ? layout.to_unconstrained(init_natural)
                     : std::vector<double>(init_natural.begin(), init_natural.end());
  auto f = [&](std::span<const double> u) {
    return objective(layout, data, u, opts.log_scale);
  };
  if (!std::isfinite(f(u0)))
    throw std::runtime_error(
        "fit_mle: log-likelihood is -inf at the initial point; check the "
        "initial parameters against the data");

  const int starts = std::max(1, opts.starts);
  std::vector<MinimizeResult> runs(starts);
  MinimizeOptions mopts;
  mopts.max_iters = opts.max_iters;
  parallel_for(static_cast<std::size_t>(starts), opts.threads, [&](std::size_t s) {
    std::vector<double> start = u0;
    if (s > 0) {
      RngStream rng(RngStream::derive(opts.seed, s));
      for (double& v : start) {
        const double step = opts.jitter * rng.normal();
        v += opts.log_scale ? step : step * (std::fabs(v) + 0.1);
      }
    }
    MinimizeResult run = nelder_mead(f, start, mopts);
    if (opts.refine && std::isfinite(run.f)) {
      MinimizeResult polished = bfgs_refine(f, run.x, 60, 1e-7);
      if (polished.f <= run.f) {
        polished.converged = polished.converged || run.converged;
        polished.iterations += run.iterations;
        polished.evaluations += run.evaluations;
        run = polished;
      }
    }
    runs[s] = std::move(run);
  });
  int best = 0;
  for (int s = 1; s < starts; ++s)
    if (runs[s].f < runs[best].f) best = s;
  const MinimizeResult& winner = runs[best];
  if (winner.f == -kInf)
    throw std::runtime_error(
        "fit_mle: the log-likelihood is unbounded above in this "
        "configuration (typically a free location parameter approaching a "
        "data point with theta_i' exceeding theta1+theta2); fix the "
        "location or constrain the parameters");
  if (!std::isfinite(winner.f))
    throw std::runtime_error("fit_mle: all optimization starts failed");

  const std::vector<double> natural =
      opts.log_scale ? layout.to_natural(winner.x) : winner.x;
  FitResult result(layout.unpack(natural));
  result.loglik = -winner.f;
  result.aic = aic_value(result.loglik, layout.size());
  result.free_names = layout.names();
  result.free_values = natural;
  result.ci_alpha = opts.ci_alpha;
  result.converged = winner.converged;
  result.iterations = winner.iterations;
  result.evaluations = winner.evaluations;
  const double sum = result.params.theta_sum();
  result.near_degenerate =
      std::fabs(sum - result.params.theta1_prime) < 10.0 * kCaseEpsilon ||
      std::fabs(sum - result.params.theta2_prime) < 10.0 * kCaseEpsilon;

  if (opts.compute_dispersion) {
    try {
      const Matrix info = observed_information(layout, natural, data);
      for (int i = 0; i < layout.size(); ++i)
        if (info[i][i] <= 0.0) result.hessian_warning = true;
      result.dispersion = invert_matrix(info);
      result.ci = asymptotic_ci(natural, layout.names(), result.dispersion,
                                opts.ci_alpha);
      result.std_errors.resize(layout.size());
      for (int i = 0; i < layout.size(); ++i)
        result.std_errors[i] = std::sqrt(std::max(0.0, result.dispersion[i][i]));
    } catch (const std::exception& e) {
      result.dispersion.clear();
      result.ci.clear();
      result.std_errors.clear();
      result.dispersion_error = e.what();
    }
  }
  return result;
}

Matrix observed_information(const ParamLayout& layout,
                            std::span<const double> natural,
                            std::span<const CensoredPair> data) {
  const int n = layout.size();
  auto loglik = [&](std::span<const double> v) {
    std::vector<double> point(v.begin(), v.end());
    if (!layout.valid(point)) return -kInf;
    return censored_log_likelihood(layout.unpack(point), data);
  };
  std::vector<double> h(n);
  for (int i = 0; i < n; ++i) {
    h[i] = std::max(1e-5, 1e-4 * std::fabs(natural[i]));
    // Keep the stencil inside the positivity region.
    if (layout.is_positive(i) && natural[i] - 2.0 * h[i] <= 0.0)
      h[i] = natural[i] / 4.0;
  }
  return fd_negative_hessian(loglik, natural, h);
}

std::vector<std::pair<double, double>> asymptotic_ci(
    std::span<const double> estimates, const std::vector<std::string>& names,
    const Matrix& dispersion, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("asymptotic_ci: alpha must be in (0,1)");
  const double z = normal_quantile(1.0 - alpha / 2.0);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double var = dispersion[i][i];
    if (var < 0.0)
      throw std::runtime_error("asymptotic_ci: negative variance for parameter " +
                               (i < names.size() ? names[i] : std::to_string(i)));
    const double half = z * std::sqrt(var);
    out.emplace_back(estimates[i] - half, estimates[i] + half);
  }
  return out;
}

LrtResult likelihood_ratio_test(std::span<const CensoredPair> data,
                                const ParamLayout& null_layout,
                                std::span<const double> null_init,
                                const ParamLayout& alt_layout,
                                std::span<const double> alt_init,
                                const FitOptions& opts) {
  if (null_layout.size() > alt_layout.size())
    throw std::invalid_argument(
        "likelihood_ratio_test: null model has more free parameters than the "
        "alternative");
  FitOptions fopts = opts;
  fopts.compute_dispersion = false;
  const FitResult null_fit = fit_mle(data, null_layout, null_init, fopts);
  const FitResult alt_fit = fit_mle(data, alt_layout, alt_init, fopts);
  if (alt_fit.loglik < null_fit.loglik - 1e-6)
    throw std::runtime_error(
        "likelihood_ratio_test: alternative log-likelihood fell below the "
        "null's; optimization failed or the models are not nested");
  const double stat = std::max(0.0, 2.0 * (alt_fit.loglik - null_fit.loglik));
  const int dof = alt_layout.size() - null_layout.size();
  const double p = dof == 0 ? 1.0 : chi_square_sf(stat, dof);
  return {stat, dof, p, null_fit.loglik, alt_fit.loglik};
}

}  // namespace dprh
