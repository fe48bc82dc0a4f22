#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dprh/mle.hpp"

namespace dprh {

// Per-parameter prior.  The Gamma follows the density as printed,
// pi(x | m,p) = m^p / Gamma(p) * e^{-m x} x^{p-1}: `shape` is p, `rate` is m,
// mean p/m, variance p/m^2.
struct Prior {
  enum class Kind { kFlat, kGamma, kNormal };
  Kind kind = Kind::kFlat;
  double a = 0.0;  // Gamma shape / Normal mean
  double b = 0.0;  // Gamma rate / Normal sigma

  double log_density(double x) const;

  static Prior flat() { return {}; }
  static Prior gamma(double shape, double rate);
  static Prior normal(double mu, double sigma);
  // shape/rate solved from mean = shape/rate, variance = shape/rate^2.
  static Prior gamma_moment_matched(double mean, double variance);
};

struct PriorSpec {
  std::vector<Prior> priors;  // one per free parameter
  double log_density(std::span<const double> natural) const;
};

struct MhOptions {
  int steps = 10000;
  double burn_in_fraction = 0.2;  // first fraction of steps
  int thin = 1;                   // stride between stored states
  double target_accept = 0.3;     // Robbins-Monro target during burn-in
  std::vector<double> initial_scales;  // empty: 0.1|init| + 0.01 per parameter
  std::uint64_t seed = 4242;
};

// Ordered MH states with acceptance bookkeeping.  `draws` holds every
// `thin`-th state from step 0 on; the first `burn_in` stored states belong
// to the adaptation phase.
struct PosteriorChain {
  std::vector<std::vector<double>> draws;
  std::vector<double> log_posts;
  std::vector<std::uint8_t> accepted;
  int burn_in = 0;
  int thin = 1;
  std::vector<double> proposal_scales;  // frozen post-burn-in scales
  double post_burn_in_acceptance = 0.0;

  int post_burn_in_size() const {
    return static_cast<int>(draws.size()) - burn_in;
  }
  // Post-burn-in marginal draws of one parameter.
  std::vector<double> parameter_draws(int index) const;
};

using LogDensityFn = std::function<double(std::span<const double>)>;

// Random-walk Metropolis-Hastings with component-wise Normal proposal
// scales, adapted toward the target acceptance during burn-in only and
// frozen afterwards.  Bit-reproducible for a fixed seed and options.
PosteriorChain mh_sample(const LogDensityFn& log_target,
                         std::span<const double> init, const MhOptions& opts);

// Unnormalized log posterior: censored log-likelihood plus prior terms.
double log_posterior(const ParamLayout& layout, std::span<const double> natural,
                     std::span<const CensoredPair> data, const PriorSpec& prior);

// Per-parameter marginal posterior mode (Gaussian KDE, Silverman bandwidth,
// 512-point grid).  Requires at least 500 post-burn-in draws.
std::vector<double> posterior_mode(const PosteriorChain& chain);

// Central credible interval from the empirical alpha/2 and 1-alpha/2
// posterior quantiles.
std::pair<double, double> credible_interval(const PosteriorChain& chain,
                                            int param_index, double alpha);

struct BootstrapResult {
  // Step-5 value (a variance) and its square root, both reported.
  std::vector<double> variance;
  std::vector<double> se;
  std::vector<double> mean_estimate;
  int requested_b = 0;
  int effective_b = 0;
  int dropped = 0;
};

// Estimator applied to one resampled dataset; throwing marks the replicate
// as failed (dropped with a reported effective count).
using BootstrapEstimator = std::function<std::vector<double>(
    std::span<const CensoredPair>, std::uint64_t replicate_seed)>;

BootstrapResult bootstrap_se_generic(std::span<const CensoredPair> data,
                                     const BootstrapEstimator& estimator,
                                     int b_count, std::uint64_t seed,
                                     int threads = 1);

// Nonparametric bootstrap of the posterior-mode estimate: resample pairs
// with replacement, rerun the chain, take per-parameter modes.  Failed
// replicates are dropped with the effective count reported.
BootstrapResult bootstrap_se(std::span<const CensoredPair> data,
                             const ParamLayout& layout, const PriorSpec& prior,
                             std::span<const double> init_natural, int b_count,
                             std::uint64_t seed, const MhOptions& mh_opts,
                             int threads = 1);

}  // namespace dprh
