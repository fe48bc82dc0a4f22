#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "dprh/numerics.hpp"
#include "support/oracles.hpp"

using namespace dprh;

TEST_CASE("normal quantile matches reference values") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-8));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963985).epsilon(1e-8));
  CHECK(normal_quantile(0.9995) == doctest::Approx(3.290526731).epsilon(1e-7));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902).epsilon(1e-6));
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("chi-square upper tail") {
  // Known 5% critical values.
  CHECK(chi_square_sf(3.841458821, 1) == doctest::Approx(0.05).epsilon(1e-7));
  CHECK(chi_square_sf(5.991464547, 2) == doctest::Approx(0.05).epsilon(1e-7));
  CHECK(chi_square_sf(0.0, 3) == doctest::Approx(1.0));
  // dof = 2 is an exponential: sf(x) = exp(-x/2).
  for (double x : {0.3, 1.0, 4.4, 11.0})
    CHECK(chi_square_sf(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-12));
}

TEST_CASE("pairwise sum equals plain sum on benign data") {
  std::vector<double> xs;
  RngStream rng(7);
  double plain = 0.0;
  for (int i = 0; i < 1000; ++i) {
    xs.push_back(rng.uniform() - 0.3);
    plain += xs.back();
  }
  CHECK(pairwise_sum(xs) == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("signed log-sum-exp") {
  // 5 - 3 + 0.5 = 2.5
  const SignedLog terms[3] = {{+1, std::log(5.0)}, {-1, std::log(3.0)},
                              {+1, std::log(0.5)}};
  const SignedLog total = signed_log_sum(terms);
  CHECK(total.sign == 1);
  CHECK(total.log_mag == doctest::Approx(std::log(2.5)).epsilon(1e-14));
  // exact cancellation
  const SignedLog cancel[2] = {{+1, 1.25}, {-1, 1.25}};
  CHECK(signed_log_sum(cancel).sign == 0);
  // negative total
  const SignedLog negative[2] = {{+1, std::log(1.0)}, {-1, std::log(4.0)}};
  const SignedLog neg = signed_log_sum(negative);
  CHECK(neg.sign == -1);
  CHECK(neg.log_mag == doctest::Approx(std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("log1p_coef_expm1_ratio is continuous at x -> 0 and overflow safe") {
  const double coef = 1.7, delta = 2.3;
  const double limit = std::log1p(coef * delta);
  CHECK(log1p_coef_expm1_ratio(coef, 0.0, delta) ==
        doctest::Approx(limit).epsilon(1e-12));
  for (double x : {1e-7, -1e-7, 1e-4, -1e-4}) {
    CHECK(log1p_coef_expm1_ratio(coef, x, delta) ==
          doctest::Approx(limit).epsilon(1e-3));
  }
  // overflow regime: w = x * delta = 1500
  const double big = log1p_coef_expm1_ratio(2.0, 5.0, 300.0);
  CHECK(std::isfinite(big));
  CHECK(big == doctest::Approx(std::log(2.0 / 5.0) + 1500.0).epsilon(1e-10));
  // negative x stays bounded
  CHECK(log1p_coef_expm1_ratio(2.0, -5.0, 300.0) ==
        doctest::Approx(std::log1p(2.0 / 5.0)).epsilon(1e-10));
}

TEST_CASE("adaptive Simpson integrates smooth functions") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 3.0, 1e-12) ==
        doctest::Approx(9.0).epsilon(1e-10));
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 20.0, 1e-12) ==
        doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("Brent root finding") {
  const double r = find_root([](double x) { return x * x - 2.0; }, 0.0, 2.0);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("rng streams are deterministic and children are decorrelated") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  CHECK(RngStream::derive(1, 0) != RngStream::derive(1, 1));
  CHECK(RngStream::derive(1, 0) != RngStream::derive(2, 0));
  RngStream c(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("sample quantile, mean, variance") {
  std::vector<double> xs{4.0, 1.0, 3.0, 2.0};
  CHECK(sample_quantile(xs, 0.0) == doctest::Approx(1.0));
  CHECK(sample_quantile(xs, 1.0) == doctest::Approx(4.0));
  CHECK(sample_quantile(xs, 0.5) == doctest::Approx(2.5));
  CHECK(sample_mean(xs) == doctest::Approx(2.5));
  CHECK(sample_variance(xs) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("kde mode recovers the mode of gamma draws") {
  RngStream rng(1234);
  std::vector<double> draws(100000);
  for (double& d : draws) d = oracle::gamma_draw(rng, 4.0, 2.0);
  // analytic mode (shape-1)/rate = 1.5
  CHECK(kde_mode(draws) == doctest::Approx(1.5).epsilon(0.02));
}

TEST_CASE("matrix inverse and eigenvalues") {
  const Matrix a{{4.0, 1.0}, {1.0, 3.0}};
  const Matrix inv = invert_matrix(a);
  CHECK(inv[0][0] == doctest::Approx(3.0 / 11.0).epsilon(1e-12));
  CHECK(inv[0][1] == doctest::Approx(-1.0 / 11.0).epsilon(1e-12));
  CHECK(inv[1][1] == doctest::Approx(4.0 / 11.0).epsilon(1e-12));
  const auto eig = symmetric_eigenvalues(a);
  // eigenvalues of [[4,1],[1,3]]: (7 +- sqrt(5))/2
  CHECK(eig[0] == doctest::Approx((7.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-10));
  CHECK(eig[1] == doctest::Approx((7.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-10));
  const Matrix singular{{1.0, 1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(invert_matrix(singular), std::runtime_error);
}

TEST_CASE("nelder mead with refinement minimizes a quartic basin") {
  auto f = [](std::span<const double> x) {
    const double a = x[0] - 1.5;
    const double b = x[1] + 0.5;
    return a * a + 3.0 * b * b + 0.1 * a * a * a * a;
  };
  const std::vector<double> x0{-2.0, 4.0};
  MinimizeResult nm = nelder_mead(f, x0);
  CHECK(nm.converged);
  MinimizeResult refined = bfgs_refine(f, nm.x);
  CHECK(refined.x[0] == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(refined.x[1] == doctest::Approx(-0.5).epsilon(1e-5));
}

TEST_CASE("fd negative hessian recovers a quadratic's matrix") {
  // f = -1/2 (x-c)^T A (x-c): negative Hessian of f is A.
  const Matrix a{{2.0, 0.4, 0.0}, {0.4, 1.5, -0.2}, {0.0, -0.2, 3.0}};
  const std::vector<double> c{1.0, -2.0, 0.5};
  auto f = [&](std::span<const double> x) {
    double q = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) q += (x[i] - c[i]) * a[i][j] * (x[j] - c[j]);
    return -0.5 * q;
  };
  const std::vector<double> x{0.3, 0.7, -1.1};
  const std::vector<double> h{1e-5, 1e-5, 1e-5};
  const Matrix neg = fd_negative_hessian(f, x, h);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(neg[i][j] == doctest::Approx(a[i][j]).epsilon(1e-4));
}

TEST_CASE("parallel_for writes every slot exactly once") {
  std::vector<int> slots(1000, 0);
  parallel_for(slots.size(), 4, [&](std::size_t i) { slots[i] += 1; });
  for (int v : slots) CHECK(v == 1);
}

TEST_CASE("oracle integrator sanity") {
  CHECK(oracle::integrate([](double x) { return std::sin(x); }, 0.0,
                          std::numbers::pi) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(oracle::integrate_to_inf([](double y) { return std::exp(-y); }, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-8));
}
