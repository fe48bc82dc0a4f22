// dprh: dynamic proportional reversed hazards model toolkit.
//
// Subcommands: eval, simulate, fit-mle, fit-bayes, study, analyze-twins.
// Structured results are JSON (schema_version 1) with the resolved
// configuration embedded; tabular data is CSV.  Every seeded command is
// deterministic: rerunning writes byte-identical files.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "dprh/bayes.hpp"
#include "dprh/dataio.hpp"
#include "dprh/mle.hpp"
#include "dprh/model.hpp"
#include "dprh/sampling.hpp"
#include "dprh/studies.hpp"
#include "dprh/twin.hpp"

using nlohmann::json;
using namespace dprh;

namespace {

constexpr int kSchemaVersion = 1;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "name=value,name=value" -> ordered map
std::map<std::string, double> parse_named_values(const std::string& text) {
  std::map<std::string, double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw UsageError("expected name=value, got '" + item + "'");
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("cannot parse value in '" + item + "'");
    }
  }
  return out;
}

Baseline make_baseline(const std::string& key, const std::string& params) {
  const BaselineFamily family = family_from_key(key);
  const auto named = parse_named_values(params);
  std::vector<double> eta;
  for (const auto& name : family_param_names(family)) {
    const auto it = named.find(name);
    if (it == named.end())
      throw UsageError("baseline '" + key + "' needs parameter '" + name +
                       "' (give --baseline-params " + name + "=...)");
    eta.push_back(it->second);
  }
  if (named.size() != eta.size())
    throw UsageError("unknown baseline parameter among '" + params + "'");
  return Baseline(family, eta);
}

json config_json(const std::map<std::string, json>& entries) {
  json out;
  for (const auto& [k, v] : entries) out[k] = v;
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << content;
}

json fit_result_json(const FitResult& fit) {
  json out;
  out["loglik"] = fit.loglik;
  out["aic"] = fit.aic;
  out["converged"] = fit.converged;
  out["iterations"] = fit.iterations;
  out["evaluations"] = fit.evaluations;
  out["near_degenerate"] = fit.near_degenerate;
  json params = json::object();
  for (std::size_t i = 0; i < fit.free_names.size(); ++i) {
    json entry;
    entry["estimate"] = fit.free_values[i];
    if (i < fit.std_errors.size()) entry["std_error"] = fit.std_errors[i];
    if (i < fit.ci.size())
      entry["ci"] = json::array({fit.ci[i].first, fit.ci[i].second});
    params[fit.free_names[i]] = entry;
  }
  out["parameters"] = params;
  out["ci_alpha"] = fit.ci_alpha;
  if (!fit.dispersion.empty()) out["dispersion"] = fit.dispersion;
  if (!fit.dispersion_error.empty()) out["dispersion_error"] = fit.dispersion_error;
  if (fit.hessian_warning) out["hessian_warning"] = true;
  out["theta"] = json::array({fit.params.theta1, fit.params.theta2,
                              fit.params.theta1_prime, fit.params.theta2_prime});
  out["eta"] = fit.params.baseline.eta();
  return out;
}

std::string fit_result_table(const FitResult& fit) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-14s %12s %12s %12s %12s\n", "parameter",
                "estimate", "std.error", "lcl", "ucl");
  out += line;
  for (std::size_t i = 0; i < fit.free_names.size(); ++i) {
    const double se = i < fit.std_errors.size() ? fit.std_errors[i] : 0.0;
    const double lo = i < fit.ci.size() ? fit.ci[i].first : 0.0;
    const double hi = i < fit.ci.size() ? fit.ci[i].second : 0.0;
    std::snprintf(line, sizeof(line), "%-14s %12.4f %12.4f %12.4f %12.4f\n",
                  fit.free_names[i].c_str(), fit.free_values[i], se, lo, hi);
    out += line;
  }
  std::snprintf(line, sizeof(line),
                "loglik %.4f  AIC %.2f  converged %s  (alpha %.3f)\n",
                fit.loglik, fit.aic, fit.converged ? "yes" : "no",
                fit.ci_alpha);
  out += line;
  return out;
}

struct GlobalOptions {
  std::string output;
  std::string format = "json";
  int threads = 0;
  int verbosity = 0;
};

// ---------------------------------------------------------------------------
// eval

int run_eval(const std::string& baseline_key, const std::string& baseline_params,
             double t1, double t2, double t1p, double t2p, double y1, double y2,
             const GlobalOptions& global) {
  const DprhParams params(t1, t2, t1p, t2p,
                          make_baseline(baseline_key, baseline_params));
  json out;
  out["schema_version"] = kSchemaVersion;
  out["config"] = config_json({{"baseline", baseline_key},
                               {"baseline_params", baseline_params},
                               {"theta1", t1},
                               {"theta2", t2},
                               {"theta1_prime", t1p},
                               {"theta2_prime", t2p},
                               {"y1", y1},
                               {"y2", y2}});
  out["case"] = static_cast<int>(params.case_id());
  out["joint_cdf"] = joint_cdf(params, y1, y2);
  out["max_cdf"] = max_cdf(params, std::min(y1, y2));
  out["marginal_cdf_1"] = marginal_cdf(params, 1, y1);
  out["marginal_cdf_2"] = marginal_cdf(params, 2, y2);
  out["prob_y1_exceeds_y2"] = prob_first_exceeds(params, 1);
  if (y1 != y2) {
    out["joint_pdf"] = joint_pdf(params, y1, y2);
    out["log_joint_pdf"] = log_joint_pdf(params, y1, y2);
    try {
      out["beta"] = local_dependence_beta(params, y1, y2);
    } catch (const std::domain_error&) {
      out["beta"] = nullptr;
    }
  }
  write_output(global.output, out.dump(2));
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

int run_simulate(double theta, double theta1, double theta2, double t1p,
                 double t2p, const std::string& baseline_key,
                 const std::string& baseline_params, int n, double p,
                 std::uint64_t seed, const GlobalOptions& global) {
  double th1 = theta1 > 0.0 ? theta1 : theta;
  double th2 = theta2 > 0.0 ? theta2 : theta;
  const DprhParams params(th1, th2, t1p, t2p,
                          make_baseline(baseline_key, baseline_params));
  const auto sample = generate_sample(params, n, p, seed);
  if (global.output.empty())
    throw UsageError("simulate requires an output path (-o)");
  write_pairs_csv(global.output, sample);
  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["config"] = config_json({{"theta1", th1},
                                   {"theta2", th2},
                                   {"theta1_prime", t1p},
                                   {"theta2_prime", t2p},
                                   {"baseline", baseline_key},
                                   {"baseline_params", baseline_params},
                                   {"n", n},
                                   {"p", p},
                                   {"seed", seed},
                                   {"output", global.output}});
  summary["rows"] = static_cast<int>(sample.size());
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fit-mle

TieSpec make_tie_spec(bool tie_theta, bool tie_theta_prime, bool independence,
                      double fixed_theta, bool fix_eta) {
  TieSpec spec;
  spec.tie_theta = tie_theta;
  spec.tie_theta_prime = tie_theta_prime;
  spec.tie_prime_to_theta = independence;
  if (fixed_theta > 0.0) spec.fixed_theta = fixed_theta;
  spec.fix_eta = fix_eta;
  return spec;
}

std::vector<double> initial_values(const ParamLayout& layout,
                                   const Baseline& baseline,
                                   const std::string& init_text) {
  const auto named = parse_named_values(init_text);
  std::vector<double> init;
  const auto eta_names = family_param_names(baseline.family());
  for (const auto& name : layout.names()) {
    const auto it = named.find(name);
    if (it != named.end()) {
      init.push_back(it->second);
      continue;
    }
    bool is_eta = false;
    for (std::size_t j = 0; j < eta_names.size(); ++j) {
      if (eta_names[j] == name) {
        init.push_back(baseline.eta()[j]);
        is_eta = true;
        break;
      }
    }
    if (!is_eta) init.push_back(1.0);  // theta-type default
  }
  return init;
}

int run_fit_mle(const std::string& data_path, const std::string& baseline_key,
                const std::string& baseline_params, bool tie_theta,
                bool tie_theta_prime, bool independence, double fixed_theta,
                bool fix_eta, const std::string& init_text, double alpha_level,
                int starts, std::uint64_t seed, const GlobalOptions& global) {
  const auto data = read_pairs_csv(data_path);
  const Baseline baseline = make_baseline(baseline_key, baseline_params);
  const TieSpec spec = make_tie_spec(tie_theta, tie_theta_prime, independence,
                                     fixed_theta, fix_eta);
  const ParamLayout layout(baseline.family(), baseline.eta(), spec);
  const std::vector<double> init = initial_values(layout, baseline, init_text);
  FitOptions opts;
  opts.starts = starts;
  opts.seed = seed;
  opts.ci_alpha = alpha_level;
  opts.threads = global.threads > 0 ? global.threads : 1;
  const FitResult fit = fit_mle(data, layout, init, opts);
  if (global.verbosity > 0)
    std::cerr << "fit-mle: " << fit.iterations << " iterations, "
              << fit.evaluations << " likelihood evaluations, converged="
              << (fit.converged ? "yes" : "no") << "\n";
  json out;
  out["schema_version"] = kSchemaVersion;
  out["config"] = config_json({{"data", data_path},
                               {"baseline", baseline_key},
                               {"baseline_params", baseline_params},
                               {"tie_theta", tie_theta},
                               {"tie_theta_prime", tie_theta_prime},
                               {"independence", independence},
                               {"fixed_theta", fixed_theta},
                               {"fix_eta", fix_eta},
                               {"init", init_text},
                               {"alpha_level", alpha_level},
                               {"starts", starts},
                               {"seed", seed},
                               {"n", static_cast<int>(data.size())}});
  out["fit"] = fit_result_json(fit);
  if (global.format == "text")
    std::cout << fit_result_table(fit);
  else if (global.output.empty() || global.output == "-")
    std::cout << out.dump(2) << "\n";
  if (!global.output.empty() && global.output != "-")
    write_output(global.output, out.dump(2));
  return fit.converged ? 0 : 2;
}

// ---------------------------------------------------------------------------
// fit-bayes

Prior parse_prior(const std::string& text) {
  // family:hyper1[,hyper2]; families flat | gamma (shape,rate) |
  // normal (mu,sigma)
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  if (family == "flat") return Prior::flat();
  if (colon == std::string::npos)
    throw UsageError("prior '" + text + "' needs hyperparameters");
  const std::string rest = text.substr(colon + 1);
  const auto comma = rest.find(',');
  if (comma == std::string::npos)
    throw UsageError("prior '" + text + "' needs two hyperparameters");
  const double a = std::stod(rest.substr(0, comma));
  const double b = std::stod(rest.substr(comma + 1));
  if (family == "gamma") return Prior::gamma(a, b);
  if (family == "normal") return Prior::normal(a, b);
  throw UsageError("unknown prior family '" + family + "'");
}

int run_fit_bayes(const std::string& data_path, const std::string& baseline_key,
                  const std::string& baseline_params, bool tie_theta,
                  bool tie_theta_prime, double fixed_theta, bool fix_eta,
                  const std::string& init_text,
                  const std::vector<std::string>& prior_flags,
                  const std::string& auto_prior, double prior_variance,
                  double prior_sigma, int steps, double burn_in_fraction,
                  int thin, double alpha_level, int bootstrap_b,
                  std::uint64_t seed, const std::string& chain_csv,
                  const GlobalOptions& global) {
  const auto data = read_pairs_csv(data_path);
  const Baseline baseline = make_baseline(baseline_key, baseline_params);
  const TieSpec spec =
      make_tie_spec(tie_theta, tie_theta_prime, false, fixed_theta, fix_eta);
  const ParamLayout layout(baseline.family(), baseline.eta(), spec);
  std::vector<double> init = initial_values(layout, baseline, init_text);

  PriorSpec prior;
  prior.priors.assign(layout.size(), Prior::flat());
  if (!auto_prior.empty()) {
    // center the priors on the MLE, per-parameter
    FitOptions fopts;
    fopts.seed = seed;
    fopts.compute_dispersion = false;
    fopts.threads = global.threads > 0 ? global.threads : 1;
    const FitResult mle = fit_mle(data, layout, init, fopts);
    for (int i = 0; i < layout.size(); ++i) {
      if (auto_prior == "gamma")
        prior.priors[i] =
            Prior::gamma_moment_matched(mle.free_values[i], prior_variance);
      else if (auto_prior == "normal")
        prior.priors[i] = Prior::normal(mle.free_values[i], prior_sigma);
      else
        throw UsageError("--auto-prior must be gamma or normal");
    }
    init = mle.free_values;
  }
  for (const auto& flag : prior_flags) {
    const auto eq = flag.find('=');
    if (eq == std::string::npos)
      throw UsageError("--prior expects name=family:hyper,hyper");
    const std::string name = flag.substr(0, eq);
    bool found = false;
    for (int i = 0; i < layout.size(); ++i) {
      if (layout.names()[i] == name) {
        prior.priors[i] = parse_prior(flag.substr(eq + 1));
        found = true;
      }
    }
    if (!found) throw UsageError("--prior: unknown parameter '" + name + "'");
  }

  MhOptions mh;
  mh.steps = steps;
  mh.burn_in_fraction = burn_in_fraction;
  mh.thin = thin;
  mh.seed = seed;
  auto target = [&](std::span<const double> v) {
    return log_posterior(layout, v, data, prior);
  };
  const PosteriorChain chain = mh_sample(target, init, mh);
  if (global.verbosity > 0)
    std::cerr << "fit-bayes: " << chain.draws.size()
              << " stored states, post-burn-in acceptance "
              << chain.post_burn_in_acceptance << "\n";
  const std::vector<double> modes = posterior_mode(chain);

  json out;
  out["schema_version"] = kSchemaVersion;
  out["config"] = config_json({{"data", data_path},
                               {"baseline", baseline_key},
                               {"baseline_params", baseline_params},
                               {"tie_theta", tie_theta},
                               {"tie_theta_prime", tie_theta_prime},
                               {"fixed_theta", fixed_theta},
                               {"fix_eta", fix_eta},
                               {"auto_prior", auto_prior},
                               {"prior_variance", prior_variance},
                               {"prior_sigma", prior_sigma},
                               {"steps", steps},
                               {"burn_in_fraction", burn_in_fraction},
                               {"thin", thin},
                               {"alpha_level", alpha_level},
                               {"bootstrap_b", bootstrap_b},
                               {"seed", seed},
                               {"n", static_cast<int>(data.size())}});
  json params = json::object();
  for (int i = 0; i < layout.size(); ++i) {
    const auto xs = chain.parameter_draws(i);
    const auto [lo, hi] = credible_interval(chain, i, alpha_level);
    json entry;
    entry["posterior_mode"] = modes[i];
    entry["posterior_mean"] = sample_mean(xs);
    entry["credible_interval"] = json::array({lo, hi});
    params[layout.names()[i]] = entry;
  }
  out["parameters"] = params;
  out["acceptance_rate"] = chain.post_burn_in_acceptance;
  out["draws_stored"] = static_cast<int>(chain.draws.size());
  out["burn_in_draws"] = chain.burn_in;
  out["proposal_scales"] = chain.proposal_scales;

  if (bootstrap_b > 0) {
    const BootstrapResult boot =
        bootstrap_se(data, layout, prior, init, bootstrap_b,
                     RngStream::derive(seed, 0xb00), mh,
                     global.threads > 0 ? global.threads : 1);
    json bj;
    bj["requested_b"] = boot.requested_b;
    bj["effective_b"] = boot.effective_b;
    bj["dropped"] = boot.dropped;
    json per = json::object();
    for (int i = 0; i < layout.size(); ++i) {
      json entry;
      entry["variance"] = boot.variance[i];
      entry["se"] = boot.se[i];
      entry["mean_estimate"] = boot.mean_estimate[i];
      per[layout.names()[i]] = entry;
    }
    bj["parameters"] = per;
    out["bootstrap"] = bj;
  }

  if (!chain_csv.empty()) {
    std::string csv = "step,theta1,theta2,theta1_prime,theta2_prime";
    for (const auto& name : family_param_names(baseline.family()))
      csv += "," + name;
    csv += ",log_post,accepted\n";
    for (std::size_t i = 0; i < chain.draws.size(); ++i) {
      const DprhParams full = layout.unpack(chain.draws[i]);
      csv += std::to_string(static_cast<long long>(i) * chain.thin);
      csv += "," + format_double(full.theta1);
      csv += "," + format_double(full.theta2);
      csv += "," + format_double(full.theta1_prime);
      csv += "," + format_double(full.theta2_prime);
      for (double e : full.baseline.eta()) csv += "," + format_double(e);
      csv += "," + format_double(chain.log_posts[i]);
      csv += chain.accepted[i] ? ",1\n" : ",0\n";
    }
    write_output(chain_csv, csv);
  }
  write_output(global.output, out.dump(2));
  return 0;
}

// ---------------------------------------------------------------------------
// study

StudyConfig study_config_from_json(const json& j) {
  StudyConfig cfg;
  if (j.contains("theta")) cfg.theta = j["theta"];
  if (j.contains("theta1_prime")) cfg.theta1_prime = j["theta1_prime"];
  if (j.contains("theta2_prime")) cfg.theta2_prime = j["theta2_prime"];
  if (j.contains("alpha")) cfg.alpha = j["alpha"];
  if (j.contains("n")) cfg.n = j["n"];
  if (j.contains("p")) cfg.p = j["p"];
  if (j.contains("r")) cfg.r = j["r"];
  if (j.contains("estimator"))
    cfg.estimator = estimator_from_key(j["estimator"].get<std::string>());
  if (j.contains("seed")) cfg.seed = j["seed"];
  if (j.contains("ci_alpha")) cfg.ci_alpha = j["ci_alpha"];
  if (j.contains("starts")) cfg.starts = j["starts"];
  if (j.contains("mh_steps")) cfg.mh_steps = j["mh_steps"];
  if (j.contains("prior_variance")) cfg.prior_variance = j["prior_variance"];
  if (j.contains("prior_sigma")) cfg.prior_sigma = j["prior_sigma"];
  if (j.contains("threads")) cfg.threads = j["threads"];
  return cfg;
}

json study_config_to_json(const StudyConfig& cfg) {
  json j;
  j["theta"] = cfg.theta;
  j["theta1_prime"] = cfg.theta1_prime;
  j["theta2_prime"] = cfg.theta2_prime;
  j["alpha"] = cfg.alpha;
  j["n"] = cfg.n;
  j["p"] = cfg.p;
  j["r"] = cfg.r;
  j["estimator"] = std::string(estimator_key(cfg.estimator));
  j["seed"] = cfg.seed;
  j["ci_alpha"] = cfg.ci_alpha;
  j["starts"] = cfg.starts;
  j["mh_steps"] = cfg.mh_steps;
  j["prior_variance"] = cfg.prior_variance;
  j["prior_sigma"] = cfg.prior_sigma;
  j["threads"] = cfg.threads;
  return j;
}

std::string study_table(const StudyReport& report) {
  std::string out;
  char line[200];
  std::snprintf(line, sizeof(line), "%-12s", "");
  out += line;
  for (const auto& p : report.params) {
    std::snprintf(line, sizeof(line), " %12s", p.name.c_str());
    out += line;
  }
  out += "\n";
  auto row = [&](const char* label, auto getter, bool always) {
    std::snprintf(line, sizeof(line), "%-12s", label);
    out += line;
    for (const auto& p : report.params) {
      if (always || p.has_coverage)
        std::snprintf(line, sizeof(line), " %12.4f", getter(p));
      else
        std::snprintf(line, sizeof(line), " %12s", "-");
      out += line;
    }
    out += "\n";
  };
  row("Estimates", [](const ParamSummary& p) { return p.mean_estimate; }, true);
  row("Bias", [](const ParamSummary& p) { return p.bias; }, true);
  row("MSE", [](const ParamSummary& p) { return p.mse; }, true);
  row("Cov. Prob.", [](const ParamSummary& p) { return p.coverage; }, false);
  std::snprintf(line, sizeof(line),
                "replicates used %d of %d (%d failed)%s\n",
                report.replicates_used, report.replicates_requested,
                report.failures, report.unreliable ? "  [unreliable]" : "");
  out += line;
  return out;
}

int run_study_cmd(const std::string& config_path, StudyConfig cfg,
                  bool cfg_from_flags, const GlobalOptions& global) {
  if (!config_path.empty()) {
    if (cfg_from_flags)
      throw UsageError("give either --config or individual study flags");
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config " + config_path);
    json j;
    in >> j;
    cfg = study_config_from_json(j);
  }
  if (global.threads > 0) cfg.threads = global.threads;
  const StudyReport report = run_study(cfg);
  json out;
  out["schema_version"] = kSchemaVersion;
  out["config"] = study_config_to_json(report.config);
  json params = json::object();
  for (const auto& p : report.params) {
    json entry;
    entry["truth"] = p.truth;
    entry["mean_estimate"] = p.mean_estimate;
    entry["bias"] = p.bias;
    entry["mse"] = p.mse;
    if (p.has_coverage) entry["coverage"] = p.coverage;
    params[p.name] = entry;
  }
  out["parameters"] = params;
  out["replicates_requested"] = report.replicates_requested;
  out["replicates_used"] = report.replicates_used;
  out["failures"] = report.failures;
  out["unreliable"] = report.unreliable;
  if (global.format == "text")
    std::cout << study_table(report);
  else if (global.output.empty() || global.output == "-")
    std::cout << out.dump(2) << "\n";
  if (!global.output.empty() && global.output != "-")
    write_output(global.output, out.dump(2));
  return report.unreliable ? 2 : 0;
}

// ---------------------------------------------------------------------------
// analyze-twins

int run_analyze_twins(const std::string& data_path,
                      const std::string& baseline_key,
                      const std::string& baseline_params, int category,
                      double b, bool bayes, int steps, double threshold,
                      int starts, std::uint64_t seed,
                      const std::string& probs_csv,
                      const GlobalOptions& global) {
  const TwinLoadResult loaded =
      load_twin_csv(data_path, category > 0 ? std::optional<int>(category)
                                            : std::nullopt);
  const BaselineFamily family = family_from_key(baseline_key);
  TwinOptions opts;
  opts.b = b;
  opts.fit.starts = starts;
  opts.fit.seed = seed;
  opts.fit.threads = global.threads > 0 ? global.threads : 1;
  if (!baseline_params.empty()) {
    const Baseline base = make_baseline(baseline_key, baseline_params);
    std::vector<double> init{1.0, 1.0};
    for (double e : base.eta()) init.push_back(e);
    opts.init = init;
  }
  const FitResult fit = analyze(loaded.records, family, opts);

  // dependence test: theta' = theta against the fitted tied model
  const auto pairs = to_censored_pairs(loaded.records, b);
  TieSpec alt_spec;
  alt_spec.tie_theta = true;
  alt_spec.tie_theta_prime = true;
  TieSpec null_spec;
  null_spec.tie_prime_to_theta = true;
  const ParamLayout alt_layout(family, fit.params.baseline.eta(), alt_spec);
  const ParamLayout null_layout(family, fit.params.baseline.eta(), null_spec);
  std::vector<double> alt_init = fit.free_values;
  std::vector<double> null_init{fit.free_values[0]};
  for (double e : fit.params.baseline.eta()) null_init.push_back(e);
  FitOptions lrt_opts;
  lrt_opts.starts = starts;
  lrt_opts.seed = seed;
  lrt_opts.threads = global.threads > 0 ? global.threads : 1;
  json lrt_json;
  try {
    const LrtResult lrt = likelihood_ratio_test(pairs, null_layout, null_init,
                                                alt_layout, alt_init, lrt_opts);
    lrt_json["statistic"] = lrt.statistic;
    lrt_json["dof"] = lrt.dof;
    lrt_json["p_value"] = lrt.p_value;
  } catch (const std::exception& e) {
    lrt_json["error"] = e.what();
  }

  const auto probs = pair_probabilities(fit.params, loaded.records, b);
  const ValidationSummary validation = summarize_validation(probs, threshold);

  json out;
  out["schema_version"] = kSchemaVersion;
  out["config"] = config_json({{"data", data_path},
                               {"baseline", baseline_key},
                               {"baseline_params", baseline_params},
                               {"category", category},
                               {"b", b},
                               {"bayes", bayes},
                               {"steps", steps},
                               {"threshold", threshold},
                               {"starts", starts},
                               {"seed", seed}});
  out["records"] = static_cast<int>(loaded.records.size());
  out["excluded_simultaneous"] = loaded.excluded_simultaneous;
  out["filtered_out"] = loaded.filtered_out;
  out["fit"] = fit_result_json(fit);
  out["dependence_lrt"] = lrt_json;
  json vj;
  vj["pairs"] = validation.pairs;
  vj["consistent"] = validation.consistent;
  vj["fraction"] = validation.fraction;
  vj["ambiguous_conditioning"] = validation.ambiguous;
  vj["threshold"] = validation.threshold;
  out["validation"] = vj;

  if (bayes) {
    PriorSpec prior;
    for (double v : fit.free_values)
      prior.priors.push_back(Prior::gamma_moment_matched(v, 1.2));
    MhOptions mh;
    mh.steps = steps;
    mh.seed = RngStream::derive(seed, 0xbe5);
    auto target = [&](std::span<const double> v) {
      return log_posterior(alt_layout, v, pairs, prior);
    };
    const PosteriorChain chain = mh_sample(target, fit.free_values, mh);
    const auto modes = posterior_mode(chain);
    json bj = json::object();
    for (int i = 0; i < alt_layout.size(); ++i) {
      const auto [lo, hi] = credible_interval(chain, i, fit.ci_alpha);
      json entry;
      entry["posterior_mode"] = modes[i];
      entry["posterior_mean"] = sample_mean(chain.parameter_draws(i));
      entry["credible_interval"] = json::array({lo, hi});
      bj[alt_layout.names()[i]] = entry;
    }
    out["bayes"] = bj;
    out["bayes_acceptance_rate"] = chain.post_burn_in_acceptance;
  }

  if (!probs_csv.empty()) {
    std::string csv =
        "pair_id,t1,c1,t2,c2,predicted_twin,probability,ambiguous\n";
    for (const auto& pp : probs) {
      csv += std::to_string(pp.record.pair_id);
      csv += "," + format_double(pp.record.t1);
      csv += "," + std::to_string(pp.record.c1);
      csv += "," + format_double(pp.record.t2);
      csv += "," + std::to_string(pp.record.c2);
      csv += "," + std::to_string(pp.predicted_twin);
      csv += "," + format_double(pp.probability);
      csv += pp.ambiguous_conditioning ? ",1\n" : ",0\n";
    }
    write_output(probs_csv, csv);
  }

  if (global.format == "text") {
    std::cout << fit_result_table(fit);
    char line[160];
    std::snprintf(line, sizeof(line),
                  "records %d (excluded %d simultaneous, %d other category)\n",
                  static_cast<int>(loaded.records.size()),
                  loaded.excluded_simultaneous, loaded.filtered_out);
    std::cout << line;
    std::snprintf(line, sizeof(line), "validation consistency %.4f at threshold %.2f\n",
                  validation.fraction, validation.threshold);
    std::cout << line;
  } else if (global.output.empty() || global.output == "-") {
    std::cout << out.dump(2) << "\n";
  }
  if (!global.output.empty() && global.output != "-")
    write_output(global.output, out.dump(2));
  return fit.converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic proportional reversed hazards (DPRH) model toolkit"};
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("-o,--output", global.output,
                 "output file for the structured result (default stdout)");
  app.add_option("--format", global.format, "stdout format: json or text")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("--threads", global.threads,
                 "worker threads for replicate/restart parallelism (0 = auto)");
  app.add_flag("-v,--verbose", global.verbosity, "increase diagnostics");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate model quantities at a point");
  std::string baseline_key = "inverse-weibull", baseline_params;
  double t1 = 1.0, t2 = 1.0, t1p = 1.0, t2p = 1.0, y1 = 1.0, y2 = 2.0;
  eval_cmd->add_option("--baseline", baseline_key, "baseline family key");
  eval_cmd->add_option("--baseline-params", baseline_params,
                       "baseline parameters, name=value[,name=value]");
  eval_cmd->add_option("--theta1", t1, "theta1")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--theta2", t2, "theta2")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--theta1p", t1p, "theta1 prime")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--theta2p", t2p, "theta2 prime")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--y1", y1, "first coordinate")->required();
  eval_cmd->add_option("--y2", y2, "second coordinate")->required();

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate",
                                     "generate a left-censored sample (CSV)");
  double sim_theta = 1.5, sim_theta1 = 0.0, sim_theta2 = 0.0;
  double sim_t1p = 1.7, sim_t2p = 1.8, sim_p = 0.0;
  double sim_alpha = 1.3;
  int sim_n = 100;
  std::uint64_t sim_seed = 1;
  std::string sim_baseline = "inverse-weibull", sim_baseline_params;
  sim_cmd->add_option("--theta", sim_theta, "tied theta (theta1 = theta2)");
  sim_cmd->add_option("--theta1", sim_theta1, "untie: explicit theta1");
  sim_cmd->add_option("--theta2", sim_theta2, "untie: explicit theta2");
  sim_cmd->add_option("--theta1p", sim_t1p, "theta1 prime")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--theta2p", sim_t2p, "theta2 prime")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--alpha", sim_alpha,
                      "inverse Weibull shape (used unless --baseline overrides)");
  sim_cmd->add_option("--baseline", sim_baseline, "baseline family key");
  sim_cmd->add_option("--baseline-params", sim_baseline_params,
                      "baseline parameters for non-default families");
  sim_cmd->add_option("--n", sim_n, "sample size")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--p", sim_p, "target censoring proportion in [0,1)");
  sim_cmd->add_option("--seed", sim_seed, "random seed");

  // fit-mle
  auto* mle_cmd = app.add_subcommand("fit-mle",
                                     "maximum likelihood fit of the model");
  std::string mle_data, mle_baseline = "inverse-weibull", mle_baseline_params;
  std::string mle_init;
  bool mle_tie_theta = false, mle_tie_theta_prime = false, mle_indep = false;
  bool mle_fix_eta = false;
  double mle_fixed_theta = 0.0, mle_alpha_level = 0.05;
  int mle_starts = 5;
  std::uint64_t mle_seed = 20240901;
  mle_cmd->add_option("--data", mle_data, "dataset CSV (t1,d1,t2,d2)")->required();
  mle_cmd->add_option("--baseline", mle_baseline, "baseline family key");
  mle_cmd->add_option("--baseline-params", mle_baseline_params,
                      "baseline parameter initial values, name=value[,...]");
  mle_cmd->add_flag("--tie-theta", mle_tie_theta, "constrain theta1 = theta2");
  mle_cmd->add_flag("--tie-theta-prime", mle_tie_theta_prime,
                    "constrain theta1' = theta2'");
  mle_cmd->add_flag("--independence", mle_indep,
                    "constrain theta' = theta (independence null)");
  mle_cmd->add_option("--fixed-theta", mle_fixed_theta,
                      "hold a known common theta fixed (> 0 to enable)");
  mle_cmd->add_flag("--fix-eta", mle_fix_eta,
                    "hold the baseline parameters at their initial values");
  mle_cmd->add_option("--init", mle_init,
                      "initial values override, name=value[,...]");
  mle_cmd->add_option("--alpha-level", mle_alpha_level,
                      "confidence level complement");
  mle_cmd->add_option("--starts", mle_starts, "optimizer restarts");
  mle_cmd->add_option("--seed", mle_seed, "seed for restart jitter");

  // fit-bayes
  auto* bayes_cmd = app.add_subcommand("fit-bayes",
                                       "Metropolis-Hastings posterior fit");
  std::string bayes_data, bayes_baseline = "inverse-weibull";
  std::string bayes_baseline_params, bayes_init, bayes_chain_csv;
  std::string bayes_auto_prior;
  std::vector<std::string> bayes_priors;
  bool bayes_tie_theta = false, bayes_tie_theta_prime = false, bayes_fix_eta = false;
  double bayes_fixed_theta = 0.0, bayes_alpha_level = 0.05;
  double bayes_prior_variance = 1.2, bayes_prior_sigma = 0.1;
  double bayes_burn_in = 0.2;
  int bayes_steps = 10000, bayes_thin = 1, bayes_bootstrap = 0;
  std::uint64_t bayes_seed = 4242;
  bayes_cmd->add_option("--data", bayes_data, "dataset CSV (t1,d1,t2,d2)")->required();
  bayes_cmd->add_option("--baseline", bayes_baseline, "baseline family key");
  bayes_cmd->add_option("--baseline-params", bayes_baseline_params,
                        "baseline parameter initial values");
  bayes_cmd->add_flag("--tie-theta", bayes_tie_theta, "constrain theta1 = theta2");
  bayes_cmd->add_flag("--tie-theta-prime", bayes_tie_theta_prime,
                      "constrain theta1' = theta2'");
  bayes_cmd->add_option("--fixed-theta", bayes_fixed_theta,
                        "hold a known common theta fixed (> 0 to enable)");
  bayes_cmd->add_flag("--fix-eta", bayes_fix_eta,
                      "hold the baseline parameters fixed");
  bayes_cmd->add_option("--init", bayes_init, "initial values, name=value[,...]");
  bayes_cmd->add_option("--prior", bayes_priors,
                        "per-parameter prior, name=family:h1,h2 "
                        "(families: flat, gamma, normal)");
  bayes_cmd->add_option("--auto-prior", bayes_auto_prior,
                        "center priors on the MLE: gamma or normal");
  bayes_cmd->add_option("--prior-variance", bayes_prior_variance,
                        "gamma prior variance for --auto-prior gamma");
  bayes_cmd->add_option("--prior-sigma", bayes_prior_sigma,
                        "normal prior sigma for --auto-prior normal");
  bayes_cmd->add_option("--steps", bayes_steps, "total MH steps");
  bayes_cmd->add_option("--burn-in", bayes_burn_in, "burn-in fraction");
  bayes_cmd->add_option("--thin", bayes_thin, "storage stride");
  bayes_cmd->add_option("--alpha-level", bayes_alpha_level,
                        "credible level complement");
  bayes_cmd->add_option("-B,--bootstrap", bayes_bootstrap,
                        "bootstrap replicates for standard errors");
  bayes_cmd->add_option("--seed", bayes_seed, "chain seed");
  bayes_cmd->add_option("--chain-csv", bayes_chain_csv,
                        "write the full chain to this CSV");

  // study
  auto* study_cmd = app.add_subcommand("study", "Monte-Carlo simulation study");
  std::string study_config_path, study_estimator = "mle";
  StudyConfig study_cfg;
  bool study_flags_used = false;
  study_cmd->add_option("--config", study_config_path, "study config JSON file");
  study_cmd->add_option("--theta", study_cfg.theta, "true tied theta")
      ->each([&](const std::string&) { study_flags_used = true; });
  study_cmd->add_option("--theta1p", study_cfg.theta1_prime, "true theta1 prime")
      ->each([&](const std::string&) { study_flags_used = true; });
  study_cmd->add_option("--theta2p", study_cfg.theta2_prime, "true theta2 prime")
      ->each([&](const std::string&) { study_flags_used = true; });
  study_cmd->add_option("--alpha", study_cfg.alpha, "true inverse Weibull shape")
      ->each([&](const std::string&) { study_flags_used = true; });
  study_cmd->add_option("--n", study_cfg.n, "sample size per replicate")
      ->each([&](const std::string&) { study_flags_used = true; });
  study_cmd->add_option("--p", study_cfg.p, "censoring proportion")
      ->each([&](const std::string&) { study_flags_used = true; });
  study_cmd->add_option("--r", study_cfg.r, "replicates")
      ->each([&](const std::string&) { study_flags_used = true; });
  study_cmd->add_option("--estimator", study_estimator,
                        "mle-theta-known | mle | bayes-gamma | bayes-normal")
      ->each([&](const std::string&) { study_flags_used = true; });
  study_cmd->add_option("--seed", study_cfg.seed, "master seed")
      ->each([&](const std::string&) { study_flags_used = true; });
  study_cmd->add_option("--alpha-level", study_cfg.ci_alpha, "CI level complement")
      ->each([&](const std::string&) { study_flags_used = true; });
  study_cmd->add_option("--starts", study_cfg.starts, "optimizer restarts")
      ->each([&](const std::string&) { study_flags_used = true; });
  study_cmd->add_option("--mh-steps", study_cfg.mh_steps, "MH steps (bayes)")
      ->each([&](const std::string&) { study_flags_used = true; });

  // analyze-twins
  auto* twins_cmd = app.add_subcommand("analyze-twins",
                                       "twin registry analysis pipeline");
  std::string twins_data, twins_baseline = "generalized-rayleigh";
  std::string twins_baseline_params, twins_probs_csv;
  int twins_category = 2, twins_steps = 10000, twins_starts = 7;
  double twins_b = 80.0, twins_threshold = 0.5;
  bool twins_bayes = false;
  std::uint64_t twins_seed = 7;
  twins_cmd->add_option("--data", twins_data, "registry CSV")->required();
  twins_cmd->add_option("--baseline", twins_baseline, "baseline family key");
  twins_cmd->add_option("--baseline-params", twins_baseline_params,
                        "baseline parameter initial values");
  twins_cmd->add_option("--category", twins_category,
                        "zygosity category filter (0 = all)");
  twins_cmd->add_option("--b", twins_b, "horizon age for the risk-free time");
  twins_cmd->add_flag("--bayes", twins_bayes, "add a posterior summary");
  twins_cmd->add_option("--steps", twins_steps, "MH steps for --bayes");
  twins_cmd->add_option("--threshold", twins_threshold,
                        "validation consistency threshold");
  twins_cmd->add_option("--starts", twins_starts, "optimizer restarts");
  twins_cmd->add_option("--seed", twins_seed, "seed");
  twins_cmd->add_option("--probs-csv", twins_probs_csv,
                        "write per-pair probabilities to this CSV");

  // Let global flags (-o, --format, --threads) appear after the subcommand.
  for (CLI::App* sub :
       {eval_cmd, sim_cmd, mle_cmd, bayes_cmd, study_cmd, twins_cmd})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1, --help exits 0
  }

  try {
    if (eval_cmd->parsed())
      return run_eval(baseline_key, baseline_params, t1, t2, t1p, t2p, y1, y2,
                      global);
    if (sim_cmd->parsed())
      return run_simulate(sim_theta, sim_theta1, sim_theta2, sim_t1p, sim_t2p,
                          sim_baseline,
                          sim_baseline.empty() || sim_baseline == "inverse-weibull"
                              ? (sim_baseline_params.empty()
                                     ? "alpha=" + format_double(sim_alpha)
                                     : sim_baseline_params)
                              : sim_baseline_params,
                          sim_n, sim_p, sim_seed, global);
    if (mle_cmd->parsed())
      return run_fit_mle(mle_data, mle_baseline, mle_baseline_params,
                         mle_tie_theta, mle_tie_theta_prime, mle_indep,
                         mle_fixed_theta, mle_fix_eta, mle_init,
                         mle_alpha_level, mle_starts, mle_seed, global);
    if (bayes_cmd->parsed())
      return run_fit_bayes(bayes_data, bayes_baseline, bayes_baseline_params,
                           bayes_tie_theta, bayes_tie_theta_prime,
                           bayes_fixed_theta, bayes_fix_eta, bayes_init,
                           bayes_priors, bayes_auto_prior, bayes_prior_variance,
                           bayes_prior_sigma, bayes_steps, bayes_burn_in,
                           bayes_thin, bayes_alpha_level, bayes_bootstrap,
                           bayes_seed, bayes_chain_csv, global);
    if (study_cmd->parsed()) {
      study_cfg.estimator = estimator_from_key(study_estimator);
      return run_study_cmd(study_config_path, study_cfg, study_flags_used,
                           global);
    }
    if (twins_cmd->parsed())
      return run_analyze_twins(twins_data, twins_baseline,
                               twins_baseline_params, twins_category, twins_b,
                               twins_bayes, twins_steps, twins_threshold,
                               twins_starts, twins_seed, twins_probs_csv,
                               global);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
