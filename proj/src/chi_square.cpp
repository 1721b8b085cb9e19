#include "dimv/chi_square.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dimv/errors.hpp"

namespace dimv {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Series representation of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) = 1 - P(a, x), valid for x >= a + 1
// (modified Lentz).
double gamma_q_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a)) {
    throw DomainError("regularized_gamma_p requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (!std::isfinite(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double chi_square_cdf(double x, double dof) {
  if (!(dof > 0.0)) throw DomainError("chi-square dof must be positive");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(double prob, double dof) {
  if (!(prob > 0.0) || !(prob < 1.0)) {
    throw DomainError("quantile probability must lie in (0, 1), got " +
                      std::to_string(prob));
  }
  if (!(dof > 0.0)) throw DomainError("chi-square dof must be positive");

  // Wilson-Hilferty starting point, then bracketed Newton.
  const double z = [prob] {
    // Acklam-style rational guess is overkill; a crude normal quantile via
    // bisection on erf is enough for a starting point.
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (0.5 * std::erfc(-mid / std::sqrt(2.0)) < prob ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  const double wh = 1.0 - 2.0 / (9.0 * dof) + z * std::sqrt(2.0 / (9.0 * dof));
  double x = dof * wh * wh * wh;
  if (!(x > 0.0) || !std::isfinite(x)) x = dof;

  double lo = 0.0;
  double hi = std::max(x, dof) * 2.0 + 10.0;
  while (chi_square_cdf(hi, dof) < prob) {
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw DomainError("chi-square quantile bracket overflow");
    }
  }
  if (x <= lo || x >= hi) x = 0.5 * (lo + hi);

  const double half_dof = 0.5 * dof;
  const double log_norm = -half_dof * std::log(2.0) - std::lgamma(half_dof);
  for (int i = 0; i < 200; ++i) {
    const double cdf = chi_square_cdf(x, dof);
    const double err = cdf - prob;
    if (std::abs(err) <= 1e-10) break;
    if (err > 0.0) {
      hi = std::min(hi, x);
    } else {
      lo = std::max(lo, x);
    }
    const double log_pdf = log_norm + (half_dof - 1.0) * std::log(x) - 0.5 * x;
    double next = x - err / std::exp(log_pdf);
    if (!(next > lo) || !(next < hi) || !std::isfinite(next)) {
      next = 0.5 * (lo + hi);
    }
    x = next;
  }
  return x;
}

double chi_square_upper_quantile(double sig_level, double dof) {
  if (!(sig_level > 0.0) || !(sig_level < 1.0)) {
    throw DomainError("significance level must lie in (0, 1), got " +
                      std::to_string(sig_level));
  }
  return chi_square_quantile(1.0 - sig_level, dof);
}

}  // namespace dimv
