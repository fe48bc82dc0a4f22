#include "dprh/studies.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace dprh {

std::string_view estimator_key(Estimator e) {
  switch (e) {
    case Estimator::kMleThetaKnown:
      return "mle-theta-known";
    case Estimator::kMle:
      return "mle";
    case Estimator::kBayesGamma:
      return "bayes-gamma";
    case Estimator::kBayesNormal:
      return "bayes-normal";
  }
  throw std::logic_error("unknown estimator");
}

Estimator estimator_from_key(std::string_view key) {
  if (key == "mle-theta-known") return Estimator::kMleThetaKnown;
  if (key == "mle") return Estimator::kMle;
  if (key == "bayes-gamma") return Estimator::kBayesGamma;
  if (key == "bayes-normal") return Estimator::kBayesNormal;
  throw std::invalid_argument("unknown estimator key '" + std::string(key) +
                              "' (expected mle-theta-known, mle, bayes-gamma "
                              "or bayes-normal)");
}

namespace {

ParamLayout layout_for(const StudyConfig& cfg) {
  TieSpec spec;
  spec.tie_theta = true;
  if (cfg.estimator == Estimator::kMleThetaKnown) spec.fixed_theta = cfg.theta;
  return ParamLayout(BaselineFamily::kInverseWeibull, {cfg.alpha}, spec);
}

std::vector<double> truth_for(const StudyConfig& cfg) {
  if (cfg.estimator == Estimator::kMleThetaKnown)
    return {cfg.theta1_prime, cfg.theta2_prime, cfg.alpha};
  return {cfg.theta, cfg.theta1_prime, cfg.theta2_prime, cfg.alpha};
}

FitOptions fit_options_for(const StudyConfig& cfg, std::uint64_t replicate_seed) {
  FitOptions opts;
  opts.starts = cfg.starts;
  opts.seed = replicate_seed;
  opts.ci_alpha = cfg.ci_alpha;
  opts.threads = 1;  // replicate-level parallelism only
  return opts;
}

}  // namespace

std::vector<double> study_estimate(const StudyConfig& cfg,
                                   std::span<const CensoredPair> data,
                                   std::uint64_t replicate_seed,
                                   std::vector<std::pair<double, double>>* ci_out) {
  const ParamLayout layout = layout_for(cfg);
  const std::vector<double> init = truth_for(cfg);

  if (cfg.estimator == Estimator::kMleThetaKnown ||
      cfg.estimator == Estimator::kMle) {
    const FitResult fit =
        fit_mle(data, layout, init, fit_options_for(cfg, replicate_seed));
    if (!fit.converged) throw std::runtime_error("replicate fit did not converge");
    if (ci_out) {
      if (!fit.dispersion_error.empty())
        throw std::runtime_error("replicate dispersion failed: " +
                                 fit.dispersion_error);
      *ci_out = fit.ci;
    }
    return fit.free_values;
  }

  // Bayes estimators: center the priors on the replicate's own MLE.
  FitOptions mle_opts = fit_options_for(cfg, replicate_seed);
  mle_opts.compute_dispersion = false;
  const FitResult fit = fit_mle(data, layout, init, mle_opts);
  if (!fit.converged)
    throw std::runtime_error("replicate prior-centering fit did not converge");
  PriorSpec prior;
  for (double mle : fit.free_values) {
    if (cfg.estimator == Estimator::kBayesGamma)
      prior.priors.push_back(
          Prior::gamma_moment_matched(mle, cfg.prior_variance));
    else
      prior.priors.push_back(Prior::normal(mle, cfg.prior_sigma));
  }
  MhOptions mh;
  mh.steps = cfg.mh_steps;
  mh.seed = RngStream::derive(replicate_seed, 0x6d68);
  auto target = [&](std::span<const double> v) {
    return log_posterior(layout, v, data, prior);
  };
  const PosteriorChain chain = mh_sample(target, fit.free_values, mh);
  if (ci_out) {
    ci_out->clear();
    for (int j = 0; j < layout.size(); ++j)
      ci_out->push_back(credible_interval(chain, j, cfg.ci_alpha));
  }
  return posterior_mode(chain);
}

StudyReport run_study(const StudyConfig& cfg) {
  return run_study_with_estimator(cfg, study_estimate);
}

StudyReport run_study_with_estimator(const StudyConfig& cfg,
                                     const StudyEstimatorFn& estimator) {
  if (cfg.r < 2) throw std::invalid_argument("run_study: need r >= 2 replicates");
  if (cfg.n < 5) throw std::invalid_argument("run_study: need n >= 5");
  const std::vector<double> truth = truth_for(cfg);
  const ParamLayout layout = layout_for(cfg);
  const bool with_coverage = cfg.estimator == Estimator::kMleThetaKnown ||
                             cfg.estimator == Estimator::kMle;

  struct Slot {
    std::optional<std::vector<double>> estimate;
    std::vector<bool> covered;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(cfg.r));
  parallel_for(static_cast<std::size_t>(cfg.r), cfg.threads, [&](std::size_t k) {
    try {
      const auto data = generate_sample_iw(
          cfg.theta, cfg.theta1_prime, cfg.theta2_prime, cfg.alpha, cfg.n,
          cfg.p, RngStream::derive(cfg.seed, k));
      std::vector<std::pair<double, double>> ci;
      const std::vector<double> est =
          estimator(cfg, data, RngStream::derive(cfg.seed, 1000000 + k),
                    with_coverage ? &ci : nullptr);
      if (est.size() != truth.size())
        throw std::runtime_error("estimator returned a wrong-sized vector");
      Slot slot;
      slot.estimate = est;
      if (with_coverage) {
        if (ci.size() != truth.size())
          throw std::runtime_error("estimator did not supply intervals");
        slot.covered.resize(truth.size());
        for (std::size_t j = 0; j < truth.size(); ++j)
          slot.covered[j] = ci[j].first <= truth[j] && truth[j] <= ci[j].second;
      }
      slots[k] = std::move(slot);
    } catch (const std::exception&) {
      slots[k] = Slot{};  // replicate failure, excluded from the aggregates
    }
  });

  StudyReport report;
  report.config = cfg;
  report.replicates_requested = cfg.r;
  std::vector<const Slot*> used;
  for (const auto& slot : slots) {
    if (slot.estimate)
      used.push_back(&slot);
    else
      ++report.failures;
  }
  report.replicates_used = static_cast<int>(used.size());
  report.unreliable = report.failures * 10 > cfg.r;
  if (used.empty()) {
    report.unreliable = true;
    return report;
  }
  const std::vector<std::string>& names = layout.names();
  for (std::size_t j = 0; j < truth.size(); ++j) {
    std::vector<double> devs(used.size()), sq(used.size()), est(used.size());
    double covered = 0.0;
    for (std::size_t k = 0; k < used.size(); ++k) {
      const double e = (*used[k]->estimate)[j];
      est[k] = e;
      devs[k] = e - truth[j];
      sq[k] = devs[k] * devs[k];
      if (with_coverage && used[k]->covered[j]) covered += 1.0;
    }
    ParamSummary summary;
    summary.name = names[j];
    summary.truth = truth[j];
    summary.mean_estimate = sample_mean(est);
    summary.bias = pairwise_sum(devs) / static_cast<double>(used.size());
    summary.mse = pairwise_sum(sq) / static_cast<double>(used.size());
    summary.has_coverage = with_coverage;
    if (with_coverage) summary.coverage = covered / static_cast<double>(used.size());
    report.params.push_back(std::move(summary));
  }
  return report;
}

}  // namespace dprh
