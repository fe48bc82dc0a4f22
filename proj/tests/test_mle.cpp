#include <doctest.h>

#include <cmath>

#include "dprh/mle.hpp"
#include "dprh/sampling.hpp"
#include "support/oracles.hpp"

using namespace dprh;

namespace {

ParamLayout untied_fixed_eta(double alpha) {
  TieSpec spec;
  spec.fix_eta = true;
  return ParamLayout(BaselineFamily::kInverseWeibull, {alpha}, spec);
}

ParamLayout tied_layout(double alpha_init) {
  TieSpec spec;
  spec.tie_theta = true;
  return ParamLayout(BaselineFamily::kInverseWeibull, {alpha_init}, spec);
}

}  // namespace

TEST_CASE("layout packs, unpacks and names consistently") {
  TieSpec spec;
  spec.tie_theta = true;
  spec.tie_theta_prime = true;
  const ParamLayout layout(BaselineFamily::kGeneralizedRayleigh, {1.0, 0.05},
                           spec);
  CHECK(layout.names() ==
        std::vector<std::string>{"theta", "theta_prime", "alpha", "lambda"});
  const std::vector<double> natural{2.0, 0.5, 1.3, 0.04};
  const DprhParams p = layout.unpack(natural);
  CHECK(p.theta1 == 2.0);
  CHECK(p.theta2 == 2.0);
  CHECK(p.theta1_prime == 0.5);
  CHECK(p.theta2_prime == 0.5);
  CHECK(layout.pack(p) == natural);
  const auto u = layout.to_unconstrained(natural);
  const auto back = layout.to_natural(u);
  for (std::size_t i = 0; i < natural.size(); ++i)
    CHECK(back[i] == doctest::Approx(natural[i]).epsilon(1e-14));

  TieSpec null_spec;
  null_spec.tie_prime_to_theta = true;
  const ParamLayout null_layout(BaselineFamily::kInverseWeibull, {1.3}, null_spec);
  CHECK(null_layout.names() == std::vector<std::string>{"theta", "alpha"});
  const DprhParams q = null_layout.unpack(std::vector<double>{1.4, 1.1});
  CHECK(q.theta1_prime == 1.4);
  CHECK(q.theta2_prime == 1.4);

  TieSpec fixed;
  fixed.fixed_theta = 1.5;
  const ParamLayout known(BaselineFamily::kInverseWeibull, {1.3}, fixed);
  CHECK(known.names() ==
        std::vector<std::string>{"theta1_prime", "theta2_prime", "alpha"});
  const DprhParams r = known.unpack(std::vector<double>{1.7, 1.8, 1.2});
  CHECK(r.theta1 == 1.5);
  CHECK(r.theta2 == 1.5);
}

TEST_CASE("complete-data fit matches the closed form") {
  RngStream rng(101);
  for (int rep = 0; rep < 3; ++rep) {
    const DprhParams truth = oracle::random_iw_params(rng);
    const auto data = generate_sample(truth, 200, 0.0, 500 + rep);
    const CompleteMle closed =
        complete_mle_closed_form(data, truth.baseline);
    const ParamLayout layout = untied_fixed_eta(truth.baseline.eta()[0]);
    FitOptions opts;
    opts.starts = 3;
    const FitResult fit =
        fit_mle(data, layout, std::vector<double>{1.0, 1.0, 1.0, 1.0}, opts);
    CHECK(fit.converged);
    CHECK(fit.free_values[0] == doctest::Approx(closed.theta1).epsilon(1e-5));
    CHECK(fit.free_values[1] == doctest::Approx(closed.theta2).epsilon(1e-5));
    CHECK(fit.free_values[2] ==
          doctest::Approx(closed.theta1_prime).epsilon(1e-5));
    CHECK(fit.free_values[3] ==
          doctest::Approx(closed.theta2_prime).epsilon(1e-5));
  }
}

TEST_CASE("fit result invariants: dispersion, intervals, AIC") {
  const auto data = generate_sample_iw(1.5, 1.7, 1.8, 1.3, 150, 0.10, 31);
  const ParamLayout layout = tied_layout(1.3);
  FitOptions opts;
  opts.starts = 3;
  const FitResult fit =
      fit_mle(data, layout, std::vector<double>{1.5, 1.7, 1.8, 1.3}, opts);
  REQUIRE(fit.converged);
  REQUIRE(fit.dispersion_error.empty());
  const int k = layout.size();
  // symmetric within 1e-8 and positive semi-definite
  double trace = 0.0;
  for (int i = 0; i < k; ++i) {
    trace += fit.dispersion[i][i];
    for (int j = 0; j < k; ++j)
      CHECK(std::fabs(fit.dispersion[i][j] - fit.dispersion[j][i]) < 1e-8);
  }
  const auto eig = symmetric_eigenvalues(fit.dispersion);
  for (double e : eig) CHECK(e >= -1e-8 * trace);
  // intervals bracket the estimates
  for (int i = 0; i < k; ++i) {
    CHECK(fit.ci[i].first <= fit.free_values[i]);
    CHECK(fit.free_values[i] <= fit.ci[i].second);
  }
  CHECK(fit.aic ==
        doctest::Approx(-2.0 * fit.loglik + 2.0 * k).epsilon(1e-12));
}

TEST_CASE("observed information is stable under step halving") {
  const auto data = generate_sample_iw(1.5, 1.7, 1.8, 1.3, 150, 0.10, 37);
  const ParamLayout layout = tied_layout(1.3);
  FitOptions opts;
  opts.starts = 2;
  opts.compute_dispersion = false;
  const FitResult fit =
      fit_mle(data, layout, std::vector<double>{1.5, 1.7, 1.8, 1.3}, opts);
  auto loglik = [&](std::span<const double> v) {
    std::vector<double> point(v.begin(), v.end());
    if (!layout.valid(point))
      return -std::numeric_limits<double>::infinity();
    return censored_log_likelihood(layout.unpack(point), data);
  };
  std::vector<double> h(layout.size()), h_half(layout.size());
  for (int i = 0; i < layout.size(); ++i) {
    h[i] = std::max(1e-5, 1e-4 * std::fabs(fit.free_values[i]));
    h_half[i] = 0.5 * h[i];
  }
  const Matrix info = fd_negative_hessian(loglik, fit.free_values, h);
  const Matrix info_half = fd_negative_hessian(loglik, fit.free_values, h_half);
  double scale = 0.0;
  for (int i = 0; i < layout.size(); ++i)
    for (int j = 0; j < layout.size(); ++j)
      scale = std::max(scale, std::fabs(info[i][j]));
  for (int i = 0; i < layout.size(); ++i)
    for (int j = 0; j < layout.size(); ++j)
      CHECK(std::fabs(info[i][j] - info_half[i][j]) < 1e-3 * scale);
}

TEST_CASE("asymptotic intervals") {
  const Matrix unit{{1.0}};
  const auto ci = asymptotic_ci(std::vector<double>{0.0}, {"x"}, unit, 0.05);
  CHECK(ci[0].first == doctest::Approx(-1.959964).epsilon(1e-6));
  CHECK(ci[0].second == doctest::Approx(1.959964).epsilon(1e-6));
  const Matrix negative{{-0.5}};
  CHECK_THROWS_WITH_AS(
      asymptotic_ci(std::vector<double>{0.0}, {"theta"}, negative, 0.05),
      doctest::Contains("theta"), std::runtime_error);
}

TEST_CASE("estimates are invariant to the optimization scale") {
  const auto data = generate_sample_iw(1.5, 1.7, 1.8, 1.3, 120, 0.10, 41);
  const ParamLayout layout = tied_layout(1.3);
  FitOptions log_opts;
  log_opts.starts = 3;
  log_opts.compute_dispersion = false;
  FitOptions direct_opts = log_opts;
  direct_opts.log_scale = false;
  const std::vector<double> init{1.5, 1.7, 1.8, 1.3};
  const FitResult a = fit_mle(data, layout, init, log_opts);
  const FitResult b = fit_mle(data, layout, init, direct_opts);
  for (int i = 0; i < layout.size(); ++i)
    CHECK(a.free_values[i] == doctest::Approx(b.free_values[i]).epsilon(1e-5));
}

TEST_CASE("restarting from the solution does not move it") {
  const auto data = generate_sample_iw(1.5, 1.7, 1.8, 1.3, 100, 0.10, 43);
  const ParamLayout layout = tied_layout(1.3);
  FitOptions opts;
  opts.starts = 2;
  opts.compute_dispersion = false;
  const FitResult first =
      fit_mle(data, layout, std::vector<double>{1.5, 1.7, 1.8, 1.3}, opts);
  FitOptions again = opts;
  again.starts = 1;
  const FitResult second = fit_mle(data, layout, first.free_values, again);
  for (int i = 0; i < layout.size(); ++i)
    CHECK(std::fabs(second.free_values[i] - first.free_values[i]) < 1e-6);
}

TEST_CASE("failure modes are loud") {
  const ParamLayout layout = tied_layout(1.3);
  const auto tiny = generate_sample_iw(1.5, 1.7, 1.8, 1.3, 4, 0.0, 3);
  CHECK_THROWS_AS(
      fit_mle(tiny, layout, std::vector<double>{1.5, 1.7, 1.8, 1.3}, {}),
      std::invalid_argument);
  // -inf at the initial point: a value outside the support poisons every pair
  std::vector<CensoredPair> bad{{-1.0, true, 2.0, true},
                                {0.5, true, 1.0, true},
                                {0.7, true, 0.3, true},
                                {1.5, true, 0.2, true},
                                {0.9, true, 2.2, true}};
  CHECK_THROWS_AS(
      fit_mle(bad, layout, std::vector<double>{1.0, 1.0, 1.0, 1.0}, {}),
      std::runtime_error);
  // unreachable iteration budget reports non-convergence instead of lying
  const auto data = generate_sample_iw(1.5, 1.7, 1.8, 1.3, 80, 0.10, 47);
  FitOptions stunted;
  stunted.starts = 1;
  stunted.max_iters = 3;
  stunted.refine = false;
  stunted.compute_dispersion = false;
  const FitResult fit =
      fit_mle(data, layout, std::vector<double>{1.0, 1.0, 1.0, 1.0}, stunted);
  CHECK_FALSE(fit.converged);
}

TEST_CASE("information stencil around an unconstrained location parameter") {
  // generalized inverse Rayleigh carries a location mu that may be
  // negative; the finite-difference steps must not be clipped toward zero
  // for it
  const DprhParams truth(1.2, 1.2, 0.8, 0.8,
                         Baseline::generalized_inverse_rayleigh(1.5, 2.0, -0.5));
  const auto data = generate_sample(truth, 150, 0.0, 71);
  TieSpec spec;
  spec.tie_theta = true;
  spec.tie_theta_prime = true;
  const ParamLayout layout(BaselineFamily::kGeneralizedInverseRayleigh,
                           {1.5, 2.0, -0.5}, spec);
  CHECK_FALSE(layout.is_positive(4));  // mu
  const std::vector<double> at{1.2, 0.8, 1.5, 2.0, -0.5};
  const Matrix info = observed_information(layout, at, data);
  for (int i = 0; i < layout.size(); ++i)
    for (int j = 0; j < layout.size(); ++j)
      CHECK(std::isfinite(info[i][j]));
}

TEST_CASE("free-location fits report the unbounded-likelihood pathology") {
  // with a free support endpoint the likelihood diverges as mu approaches
  // a data point once theta_i' exceeds theta1 + theta2; the fit must say
  // so instead of returning a diverged estimate
  const DprhParams truth(1.2, 1.2, 0.8, 0.8,
                         Baseline::generalized_inverse_rayleigh(1.5, 2.0, -0.5));
  const auto data = generate_sample(truth, 150, 0.0, 71);
  TieSpec spec;
  spec.tie_theta = true;
  spec.tie_theta_prime = true;
  const ParamLayout layout(BaselineFamily::kGeneralizedInverseRayleigh,
                           {1.5, 2.0, -0.5}, spec);
  FitOptions opts;
  opts.starts = 2;
  CHECK_THROWS_WITH_AS(
      fit_mle(data, layout, std::vector<double>{1.2, 0.8, 1.5, 2.0, -0.5}, opts),
      doctest::Contains("unbounded"), std::runtime_error);
}

TEST_CASE("likelihood ratio test: degenerate nesting and dependence") {
  const auto data = generate_sample_iw(1.5, 1.7, 1.8, 1.3, 150, 0.10, 53);
  TieSpec tied;
  tied.tie_theta = true;
  tied.tie_theta_prime = true;
  const ParamLayout alt(BaselineFamily::kInverseWeibull, {1.3}, tied);
  FitOptions opts;
  opts.starts = 2;
  // identical specs: statistic 0, p-value 1
  const LrtResult same = likelihood_ratio_test(
      data, alt, std::vector<double>{1.5, 1.7, 1.3}, alt,
      std::vector<double>{1.5, 1.7, 1.3}, opts);
  CHECK(same.statistic == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  CHECK(same.dof == 0);
  CHECK(same.p_value == doctest::Approx(1.0));
  // strongly dependent data reject the independence null
  const auto dep = generate_sample_iw(0.6, 2.4, 2.6, 1.3, 250, 0.05, 59);
  TieSpec null_spec;
  null_spec.tie_prime_to_theta = true;
  const ParamLayout null_layout(BaselineFamily::kInverseWeibull, {1.3}, null_spec);
  const LrtResult lrt = likelihood_ratio_test(
      dep, null_layout, std::vector<double>{1.0, 1.3}, alt,
      std::vector<double>{1.0, 1.0, 1.3}, opts);
  CHECK(lrt.dof == 1);
  CHECK(lrt.statistic > 10.0);
  CHECK(lrt.p_value < 0.001);
}

TEST_CASE("likelihood ratio test size under the null") {
  // data simulated under theta' = theta: rejection rate near the level
  TieSpec null_spec;
  null_spec.tie_prime_to_theta = true;
  TieSpec alt_spec;
  alt_spec.tie_theta = true;
  alt_spec.tie_theta_prime = true;
  const ParamLayout null_layout(BaselineFamily::kInverseWeibull, {1.3}, null_spec);
  const ParamLayout alt_layout(BaselineFamily::kInverseWeibull, {1.3}, alt_spec);
  const int reps = 160;
  std::vector<int> rejected(reps, 0);
  parallel_for(reps, 0, [&](std::size_t k) {
    const auto data = generate_sample_iw(1.5, 1.5, 1.5, 1.3, 100, 0.10,
                                         RngStream::derive(7777, k));
    FitOptions opts;
    opts.starts = 1;
    try {
      const LrtResult lrt = likelihood_ratio_test(
          data, null_layout, std::vector<double>{1.5, 1.3}, alt_layout,
          std::vector<double>{1.5, 1.5, 1.3}, opts);
      rejected[k] = lrt.p_value < 0.05 ? 1 : 0;
    } catch (const std::exception&) {
      rejected[k] = 0;
    }
  });
  int total = 0;
  for (int r : rejected) total += r;
  const double rate = total / static_cast<double>(reps);
  CHECK(rate > 0.01);
  CHECK(rate < 0.09);
}
