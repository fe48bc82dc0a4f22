#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace dprh {

// Pairwise (tree) summation; deterministic regardless of how the
// contributions were produced, and more accurate than a running sum.
double pairwise_sum(std::span<const double> values);

// Standard normal quantile Phi^{-1}(p), p in (0,1).  Rational approximation
// (Wichura's AS241), |error| well below 1e-8.
double normal_quantile(double p);

// Upper tail of a chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double x, double dof);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// log(1 + coef * expm1(x * delta) / x) for coef > 0, delta >= 0.
// The bracket is >= 1 for every real x, so no cancellation can occur;
// the x -> 0 limit log1p(coef * delta) is taken inside |x| < eps_limit.
double log1p_coef_expm1_ratio(double coef, double x, double delta,
                              double eps_limit = 1e-9);

// Signed log-space value: sign in {-1,0,+1}, log_mag = log|value|.
struct SignedLog {
  int sign = 0;
  double log_mag = -std::numeric_limits<double>::infinity();
};
SignedLog signed_log(double coef_sign_carrier, double log_mag);
SignedLog signed_log_sum(std::span<const SignedLog> terms);

// Adaptive Simpson quadrature on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10, int max_depth = 48);

// Root of f on a bracketing interval [lo, hi] (f(lo), f(hi) of opposite
// sign); Brent's method.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double xtol = 1e-12, int max_iter = 200);

// Deterministic random stream.  mt19937_64 with an explicit bit-to-double
// mapping so that draws do not depend on the standard library's
// distribution implementations (std::mt19937_64 output is pinned by the
// standard; std::*_distribution is not).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next_u64() { return engine_(); }
  // Strictly inside (0,1), 53 significant bits.
  double uniform();
  // Box-Muller; second deviate cached.
  double normal();
  // Derive an independent child-stream seed (counter-based, splitmix64 mix).
  static std::uint64_t derive(std::uint64_t master, std::uint64_t index);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

double sample_mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // unbiased (n-1)
// Empirical quantile, R type-7 (linear interpolation).
double sample_quantile(std::span<const double> xs, double q);

// Marginal mode from draws: Gaussian-kernel density estimate, Silverman
// bandwidth, argmax on a 512-point grid over the sample range.
double kde_mode(std::span<const double> xs);

using Matrix = std::vector<std::vector<double>>;
// Gauss-Jordan inverse with partial pivoting; throws std::runtime_error
// with a diagnostic when the infinity-norm condition estimate exceeds
// max_condition or a pivot vanishes.
Matrix invert_matrix(const Matrix& a, double max_condition = 1e12);
// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> symmetric_eigenvalues(Matrix a);

struct MinimizeOptions {
  int max_iters = 4000;
  double f_tol = 1e-11;
  double x_tol = 1e-9;
  double initial_step = 0.1;
};
struct MinimizeResult {
  std::vector<double> x;
  double f = 0.0;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
};
// Central-finite-difference negative Hessian of f at x with per-coordinate
// steps, symmetrized as (H + H^T)/2.
Matrix fd_negative_hessian(const std::function<double(std::span<const double>)>& f,
                           std::span<const double> x,
                           std::span<const double> steps);

// Nelder-Mead simplex minimization (deterministic; no internal RNG).
MinimizeResult nelder_mead(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x0, const MinimizeOptions& opts = {});
// Quasi-Newton (BFGS) refinement with central-difference gradients and
// Armijo backtracking; intended as a polish pass from a simplex solution.
MinimizeResult bfgs_refine(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x0, int max_iters = 60, double grad_tol = 1e-7);

// Runs body(0..count-1) on up to `threads` workers (0 = hardware count).
// Results must be written to caller-owned slots indexed by the argument so
// that output is independent of scheduling.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace dprh
