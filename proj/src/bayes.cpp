#include "dprh/bayes.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace dprh {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Prior Prior::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("Prior::gamma: shape and rate must be positive");
  return {Kind::kGamma, shape, rate};
}

Prior Prior::normal(double mu, double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("Prior::normal: sigma must be positive");
  return {Kind::kNormal, mu, sigma};
}

Prior Prior::gamma_moment_matched(double mean, double variance) {
  if (!(mean > 0.0) || !(variance > 0.0))
    throw std::invalid_argument(
        "Prior::gamma_moment_matched: mean and variance must be positive");
  const double rate = mean / variance;
  const double shape = mean * mean / variance;
  return gamma(shape, rate);
}

double Prior::log_density(double x) const {
  switch (kind) {
    case Kind::kFlat:
      return 0.0;
    case Kind::kGamma:
      if (x <= 0.0) return -kInf;
      return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(x) - b * x;
    case Kind::kNormal: {
      const double z = (x - a) / b;
      return -0.5 * z * z - std::log(b) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
  }
  return -kInf;
}

double PriorSpec::log_density(std::span<const double> natural) const {
  if (priors.size() != natural.size())
    throw std::invalid_argument("PriorSpec: one prior per free parameter required");
  double total = 0.0;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    const double term = priors[i].log_density(natural[i]);
    if (term == -kInf) return -kInf;
    total += term;
  }
  return total;
}

double log_posterior(const ParamLayout& layout, std::span<const double> natural,
                     std::span<const CensoredPair> data, const PriorSpec& prior) {
  if (!layout.valid(natural)) return -kInf;
  const double lp = prior.log_density(natural);
  if (lp == -kInf) return -kInf;
  double ll;
  try {
    ll = censored_log_likelihood(layout.unpack(natural), data);
  } catch (const std::exception&) {
    return -kInf;
  }
  return ll == -kInf ? -kInf : ll + lp;
}

std::vector<double> PosteriorChain::parameter_draws(int index) const {
  std::vector<double> out;
  out.reserve(post_burn_in_size());
  for (std::size_t i = burn_in; i < draws.size(); ++i)
    out.push_back(draws[i][index]);
  return out;
}

PosteriorChain mh_sample(const LogDensityFn& log_target,
                         std::span<const double> init, const MhOptions& opts) {
  const std::size_t dim = init.size();
  if (dim == 0) throw std::invalid_argument("mh_sample: empty initial point");
  if (opts.steps < 2) throw std::invalid_argument("mh_sample: need steps >= 2");
  if (opts.thin < 1) throw std::invalid_argument("mh_sample: thin must be >= 1");

  std::vector<double> current(init.begin(), init.end());
  double current_lp = log_target(current);
  if (!std::isfinite(current_lp))
    throw std::invalid_argument(
        "mh_sample: log target is not finite at the initial point");

  std::vector<double> scales = opts.initial_scales;
  if (scales.empty()) {
    scales.resize(dim);
    for (std::size_t j = 0; j < dim; ++j)
      scales[j] = 0.1 * std::fabs(current[j]) + 0.01;
  } else if (scales.size() != dim) {
    throw std::invalid_argument("mh_sample: initial_scales size mismatch");
  }

  const int burn_steps =
      static_cast<int>(std::floor(opts.steps * opts.burn_in_fraction));
  RngStream rng(opts.seed);
  PosteriorChain chain;
  chain.thin = opts.thin;

  std::vector<double> candidate(dim);
  int consecutive_rejects = 0;
  long post_burn_total = 0, post_burn_accepted = 0;
  for (int step = 0; step < opts.steps; ++step) {
    for (std::size_t j = 0; j < dim; ++j)
      candidate[j] = current[j] + scales[j] * rng.normal();
    const double cand_lp = log_target(candidate);
    const double u = rng.uniform();
    const bool accept = std::log(u) < cand_lp - current_lp;
    if (accept) {
      current = candidate;
      current_lp = cand_lp;
      consecutive_rejects = 0;
    } else if (++consecutive_rejects >= 10000) {
      throw std::runtime_error(
          "mh_sample: 10000 consecutive rejections; proposal scales are too "
          "large for this target");
    }
    if (step < burn_steps) {
      // Robbins-Monro adaptation toward the target acceptance rate,
      // burn-in only so the post-burn-in kernel is fixed.
      const double gain = 1.0 / std::pow(step + 1.0, 0.6);
      const double factor =
          std::exp(gain * ((accept ? 1.0 : 0.0) - opts.target_accept));
      for (double& sc : scales) sc *= factor;
    } else {
      ++post_burn_total;
      if (accept) ++post_burn_accepted;
    }
    if (step % opts.thin == 0) {
      chain.draws.push_back(current);
      chain.log_posts.push_back(current_lp);
      chain.accepted.push_back(accept ? 1 : 0);
      if (step < burn_steps) chain.burn_in = static_cast<int>(chain.draws.size());
    }
  }
  chain.proposal_scales = scales;
  chain.post_burn_in_acceptance =
      post_burn_total > 0
          ? static_cast<double>(post_burn_accepted) / post_burn_total
          : 0.0;
  return chain;
}

std::vector<double> posterior_mode(const PosteriorChain& chain) {
  if (chain.post_burn_in_size() < 500)
    throw std::runtime_error(
        "posterior_mode: need at least 500 post-burn-in draws, have " +
        std::to_string(chain.post_burn_in_size()));
  const std::size_t dim = chain.draws.front().size();
  std::vector<double> modes(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const std::vector<double> xs = chain.parameter_draws(static_cast<int>(j));
    modes[j] = kde_mode(xs);
  }
  return modes;
}

std::pair<double, double> credible_interval(const PosteriorChain& chain,
                                            int param_index, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("credible_interval: alpha must be in (0,1)");
  if (chain.post_burn_in_size() < 2)
    throw std::runtime_error("credible_interval: chain too short");
  const std::vector<double> xs = chain.parameter_draws(param_index);
  return {sample_quantile(xs, alpha / 2.0), sample_quantile(xs, 1.0 - alpha / 2.0)};
}

BootstrapResult bootstrap_se_generic(std::span<const CensoredPair> data,
                                     const BootstrapEstimator& estimator,
                                     int b_count, std::uint64_t seed,
                                     int threads) {
  if (b_count < 2)
    throw std::invalid_argument("bootstrap_se: need at least 2 replicates");
  if (data.empty()) throw std::invalid_argument("bootstrap_se: empty dataset");
  const std::size_t n = data.size();
  std::vector<std::optional<std::vector<double>>> estimates(b_count);
  parallel_for(static_cast<std::size_t>(b_count), threads, [&](std::size_t b) {
    RngStream resampler(RngStream::derive(seed, 2 * b));
    std::vector<CensoredPair> resampled(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx =
          static_cast<std::size_t>(resampler.uniform() * static_cast<double>(n));
      resampled[i] = data[std::min(idx, n - 1)];
    }
    try {
      estimates[b] = estimator(resampled, RngStream::derive(seed, 2 * b + 1));
    } catch (const std::exception&) {
      estimates[b] = std::nullopt;  // dropped replicate, counted below
    }
  });

  BootstrapResult result;
  result.requested_b = b_count;
  std::vector<std::vector<double>> kept;
  for (const auto& m : estimates) {
    if (m)
      kept.push_back(*m);
    else
      ++result.dropped;
  }
  result.effective_b = static_cast<int>(kept.size());
  if (result.effective_b < 2)
    throw std::runtime_error(
        "bootstrap_se: fewer than 2 replicates converged (" +
        std::to_string(result.dropped) + " dropped)");
  const std::size_t dim = kept.front().size();
  result.mean_estimate.assign(dim, 0.0);
  result.variance.assign(dim, 0.0);
  result.se.assign(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<double> column(kept.size());
    for (std::size_t b = 0; b < kept.size(); ++b) column[b] = kept[b][j];
    const double mean = sample_mean(column);
    std::vector<double> sq(column.size());
    for (std::size_t b = 0; b < column.size(); ++b)
      sq[b] = (column[b] - mean) * (column[b] - mean);
    result.mean_estimate[j] = mean;
    result.variance[j] = pairwise_sum(sq) / (kept.size() - 1.0);
    result.se[j] = std::sqrt(result.variance[j]);
  }
  return result;
}

BootstrapResult bootstrap_se(std::span<const CensoredPair> data,
                             const ParamLayout& layout, const PriorSpec& prior,
                             std::span<const double> init_natural, int b_count,
                             std::uint64_t seed, const MhOptions& mh_opts,
                             int threads) {
  std::vector<double> init(init_natural.begin(), init_natural.end());
  auto estimator = [&layout, &prior, init, mh_opts](
                       std::span<const CensoredPair> resampled,
                       std::uint64_t replicate_seed) {
    MhOptions opts = mh_opts;
    opts.seed = replicate_seed;
    auto target = [&](std::span<const double> v) {
      return log_posterior(layout, v, resampled, prior);
    };
    const PosteriorChain chain = mh_sample(target, init, opts);
    return posterior_mode(chain);
  };
  return bootstrap_se_generic(data, estimator, b_count, seed, threads);
}

}  // namespace dprh
