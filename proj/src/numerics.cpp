#include "dprh/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace dprh {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

// AS241 (Wichura, 1988), double-precision branch.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile: p must be in (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
            1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
          1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-6) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    value = num / den;
  }
  return (q < 0.0) ? -value : value;
}

namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (a <= 0.0) throw std::domain_error("gamma_p: a must be positive");
  if (x < 0.0) throw std::domain_error("gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (a <= 0.0) throw std::domain_error("gamma_q: a must be positive");
  if (x < 0.0) throw std::domain_error("gamma_q: x must be nonnegative");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_square_sf(double x, double dof) {
  if (dof <= 0.0) throw std::domain_error("chi_square_sf: dof must be positive");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * x);
}

double log1p_coef_expm1_ratio(double coef, double x, double delta,
                              double eps_limit) {
  if (!(coef > 0.0) || delta < 0.0)
    throw std::domain_error("log1p_coef_expm1_ratio: need coef > 0, delta >= 0");
  if (delta == 0.0) return 0.0;
  if (std::fabs(x) < eps_limit) return std::log1p(coef * delta);
  const double w = x * delta;
  if (w <= 700.0) {
    // expm1(w)/x >= 0 for either sign of x, so the argument is >= 0.
    return std::log1p(coef * std::expm1(w) / x);
  }
  // w large positive forces x > 0; factor out e^w.
  const double ratio = x / coef;
  return std::log(coef / x) + w + std::log1p((ratio - 1.0) * std::exp(-w));
}

SignedLog signed_log(double coef_sign_carrier, double log_mag) {
  if (coef_sign_carrier == 0.0 || log_mag == -kInf) return {0, -kInf};
  return {coef_sign_carrier > 0.0 ? 1 : -1, log_mag};
}

SignedLog signed_log_sum(std::span<const SignedLog> terms) {
  double max_log = -kInf;
  for (const auto& t : terms)
    if (t.sign != 0 && t.log_mag > max_log) max_log = t.log_mag;
  if (max_log == -kInf) return {0, -kInf};
  double acc = 0.0;
  for (const auto& t : terms) {
    if (t.sign == 0) continue;
    acc += t.sign * std::exp(t.log_mag - max_log);
  }
  if (acc == 0.0) return {0, -kInf};
  return {acc > 0.0 ? 1 : -1, max_log + std::log(std::fabs(acc))};
}

namespace {

double simpson_segment(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double fa, double b, double fb, double m, double fm,
                        double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_segment(fa, flm, fm, a, m);
  const double right = simpson_segment(fm, frm, fb, m, b);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  double fa = f(a);
  double fb = f(b);
  const double fm = f(m);
  // Nudge inward when an endpoint value is not finite (open-interval
  // integrands evaluated at a support edge).
  if (!std::isfinite(fa)) fa = f(a + (b - a) * 1e-12);
  if (!std::isfinite(fb)) fb = f(b - (b - a) * 1e-12);
  const double whole = simpson_segment(fa, fm, fb, a, b);
  return adaptive_simpson(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double xtol, int max_iter) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw std::invalid_argument("find_root: interval does not bracket a root");
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 =
        2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      const double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
      const double min2 = std::fabs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  return b;
}

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) *
         (1.0 / 9007199254740992.0);
}

double RngStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  have_spare_ = true;
  return r * std::cos(t);
}

std::uint64_t RngStream::derive(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double sample_mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("sample_mean: empty sample");
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_variance: need n >= 2");
  const double m = sample_mean(xs);
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
  return pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
}

double sample_quantile(std::span<const double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("sample_quantile: empty sample");
  if (q < 0.0 || q > 1.0)
    throw std::domain_error("sample_quantile: q must be in [0,1]");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double kde_mode(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) throw std::invalid_argument("kde_mode: empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) return sorted.front();
  const double sd = std::sqrt(sample_variance(sorted));
  const double iqr = sample_quantile(sorted, 0.75) - sample_quantile(sorted, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.349);
  if (spread <= 0.0) spread = sd;
  // Silverman spread constant with the mode-estimation rate n^{-1/7}; the
  // density-estimation rate n^{-1/5} leaves the argmax too noisy for the
  // accuracy this estimator has to deliver.
  const double bw =
      0.9 * spread * std::pow(static_cast<double>(n), -1.0 / 7.0);
  constexpr int kGrid = 512;
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double step = (hi - lo) / (kGrid - 1);
  std::vector<double> density(kGrid);
  int best = 0;
  for (int g = 0; g < kGrid; ++g) {
    const double x = lo + g * step;
    // Kernel support truncated at 8 bandwidths; contributions beyond are
    // below 1e-14 relative.
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), x - 8.0 * bw);
    const auto last = std::upper_bound(first, sorted.end(), x + 8.0 * bw);
    double dens = 0.0;
    for (auto it = first; it != last; ++it) {
      const double t = (x - *it) / bw;
      dens += std::exp(-0.5 * t * t);
    }
    density[g] = dens;
    if (dens > density[best]) best = g;
  }
  double mode = lo + best * step;
  if (best > 0 && best + 1 < kGrid) {
    // Parabolic refinement between the neighbouring grid points.
    const double d1 = density[best - 1], d2 = density[best], d3 = density[best + 1];
    const double denom = d1 - 2.0 * d2 + d3;
    if (denom < 0.0) mode += 0.5 * step * (d1 - d3) / denom;
  }
  return mode;
}

Matrix invert_matrix(const Matrix& a, double max_condition) {
  const std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("invert_matrix: not square");
  double norm_a = 0.0;
  for (const auto& row : a) {
    double s = 0.0;
    for (double v : row) s += std::fabs(v);
    norm_a = std::max(norm_a, s);
  }
  Matrix aug(n, std::vector<double>(2 * n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
    aug[i][n + i] = 1.0;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(aug[r][col]) > std::fabs(aug[pivot][col])) pivot = r;
    if (std::fabs(aug[pivot][col]) < 1e-300)
      throw std::runtime_error("invert_matrix: singular matrix (zero pivot)");
    std::swap(aug[col], aug[pivot]);
    const double inv_p = 1.0 / aug[col][col];
    for (double& v : aug[col]) v *= inv_p;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = aug[r][col];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < 2 * n; ++j) aug[r][j] -= factor * aug[col][j];
    }
  }
  Matrix inv(n, std::vector<double>(n));
  double norm_inv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      inv[i][j] = aug[i][n + j];
      s += std::fabs(inv[i][j]);
    }
    norm_inv = std::max(norm_inv, s);
  }
  const double cond = norm_a * norm_inv;
  if (cond > max_condition)
    throw std::runtime_error(
        "invert_matrix: condition number estimate " + std::to_string(cond) +
        " exceeds " + std::to_string(max_condition));
  return inv;
}

std::vector<double> symmetric_eigenvalues(Matrix a) {
  const std::size_t n = a.size();
  for (std::size_t sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
  std::sort(eig.begin(), eig.end());
  return eig;
}

Matrix fd_negative_hessian(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, std::span<const double> steps) {
  const std::size_t n = x.size();
  if (steps.size() != n)
    throw std::invalid_argument("fd_negative_hessian: steps size mismatch");
  std::vector<double> base(x.begin(), x.end());
  const double f0 = f(base);
  Matrix hess(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v = base;
    v[i] = base[i] + steps[i];
    const double fp = f(v);
    v[i] = base[i] - steps[i];
    const double fm = f(v);
    hess[i][i] = (fp - 2.0 * f0 + fm) / (steps[i] * steps[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<double> v = base;
      v[i] = base[i] + steps[i];
      v[j] = base[j] + steps[j];
      const double fpp = f(v);
      v[j] = base[j] - steps[j];
      const double fpm = f(v);
      v[i] = base[i] - steps[i];
      const double fmm = f(v);
      v[j] = base[j] + steps[j];
      const double fmp = f(v);
      hess[i][j] = (fpp - fpm - fmp + fmm) / (4.0 * steps[i] * steps[j]);
      hess[j][i] = hess[i][j];
    }
  }
  Matrix neg(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      neg[i][j] = -0.5 * (hess[i][j] + hess[j][i]);
  return neg;
}

MinimizeResult nelder_mead(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x0, const MinimizeOptions& opts) {
  const std::size_t n = x0.size();
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? kInf : v;
  };

  std::vector<std::vector<double>> simplex(n + 1,
                                           std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = std::max(1.0, std::fabs(x0[i]));
    simplex[i + 1][i] += opts.initial_step * scale;
  }
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t u, std::size_t v) { return fv[u] < fv[v]; });
    const std::size_t best = order[0];
    const std::size_t worst = order[n];
    const std::size_t second_worst = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        diameter = std::max(diameter,
                            std::fabs(simplex[i][j] - simplex[best][j]));
    const double fspread = fv[worst] - fv[best];
    if (fspread <= opts.f_tol * (std::fabs(fv[best]) + opts.f_tol) &&
        diameter <= opts.x_tol) {
      return {simplex[best], fv[best], true, iter, evals};
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j)
        x[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
      return x;
    };

    const std::vector<double> reflected = blend(-1.0);
    const double fr = eval(reflected);
    if (fr < fv[best]) {
      const std::vector<double> expanded = blend(-2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        fv[worst] = fe;
      } else {
        simplex[worst] = reflected;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second_worst]) {
      simplex[worst] = reflected;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const std::vector<double> contracted = blend(outside ? -0.5 : 0.5);
    const double fc = eval(contracted);
    if (fc < std::min(fr, fv[worst])) {
      simplex[worst] = contracted;
      fv[worst] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j)
        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      fv[i] = eval(simplex[i]);
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  return {simplex[best], fv[best], false, iter, evals};
}

MinimizeResult bfgs_refine(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x0, int max_iters, double grad_tol) {
  const std::size_t n = x0.size();
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? kInf : v;
  };
  auto grad = [&](const std::vector<double>& x) {
    std::vector<double> g(n);
    std::vector<double> xp = x;
    for (std::size_t i = 0; i < n; ++i) {
      const double h = 1e-6 * (1.0 + std::fabs(x[i]));
      xp[i] = x[i] + h;
      const double fp = eval(xp);
      xp[i] = x[i] - h;
      const double fm = eval(xp);
      xp[i] = x[i];
      g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
  };

  std::vector<double> x(x0.begin(), x0.end());
  double fx = eval(x);
  if (!std::isfinite(fx)) return {x, fx, false, 0, evals};
  std::vector<double> g = grad(x);
  Matrix h_inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) h_inv[i][i] = 1.0;

  int iter = 0;
  for (; iter < max_iters; ++iter) {
    double gnorm = 0.0;
    for (double v : g) gnorm = std::max(gnorm, std::fabs(v));
    if (gnorm < grad_tol) return {x, fx, true, iter, evals};

    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i] -= h_inv[i][j] * g[j];
    double dg = 0.0;
    for (std::size_t i = 0; i < n; ++i) dg += d[i] * g[i];
    if (dg >= 0.0) {  // not a descent direction; reset
      for (std::size_t i = 0; i < n; ++i) {
        std::fill(h_inv[i].begin(), h_inv[i].end(), 0.0);
        h_inv[i][i] = 1.0;
        d[i] = -g[i];
      }
      dg = 0.0;
      for (std::size_t i = 0; i < n; ++i) dg += d[i] * g[i];
    }

    double t = 1.0;
    std::vector<double> xn(n);
    double fn = kInf;
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + t * d[i];
      fn = eval(xn);
      if (fn <= fx + 1e-4 * t * dg) {
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) return {x, fx, true, iter, evals};

    const std::vector<double> gn = grad(xn);
    std::vector<double> s(n), y(n);
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
      sy += s[i] * y[i];
    }
    if (sy > 1e-12) {
      // BFGS inverse-Hessian update.
      std::vector<double> hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) hy[i] += h_inv[i][j] * y[j];
      double yhy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yhy += y[i] * hy[i];
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h_inv[i][j] += (1.0 + rho * yhy) * rho * s[i] * s[j] -
                         rho * (s[i] * hy[j] + hy[i] * s[j]);
        }
      }
    }
    x = xn;
    fx = fn;
    g = gn;
  }
  return {x, fx, false, iter, evals};
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace dprh
