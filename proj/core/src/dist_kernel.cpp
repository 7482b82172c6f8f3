#include "robicurve/dist_kernel.hpp"

#include <cmath>

namespace robicurve {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

// x phi(x) and x^3 phi(x) with the correct limit 0 at infinite x.
double xphi(double x) { return std::isinf(x) ? 0.0 : x * phi(x); }
double x3phi(double x) { return std::isinf(x) ? 0.0 : x * x * x * phi(x); }
}  // namespace

double phi(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double Phi(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double Phi_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("Phi_inv requires p in (0,1)");
  if (p > 0.5) return -Phi_inv(1.0 - p);
  // Hastings-type start, then Newton on Phi (erfc-accurate in this tail).
  const double t = std::sqrt(-2.0 * std::log(p));
  double x = -(t - (2.30753 + 0.27061 * t) / (1.0 + 0.99229 * t + 0.04481 * t * t));
  for (int it = 0; it < 50; ++it) {
    const double f = Phi(x) - p;
    const double d = phi(x);
    if (d == 0.0) break;
    const double dx = f / d;
    x -= dx;
    if (std::abs(dx) < 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}

double nm0(double a, double b) { return Phi(b) - Phi(a); }
double nm1(double a, double b) { return phi(a) - phi(b); }
double nm2(double a, double b) { return nm0(a, b) + xphi(a) - xphi(b); }
double nm4(double a, double b) {
  return 3.0 * nm0(a, b) + 3.0 * (xphi(a) - xphi(b)) + x3phi(a) - x3phi(b);
}

double clipped_abs_moment(double c) {
  if (is_unbounded(c)) return 0.0;
  return 2.0 * (phi(c) - c * Phi(-c));
}

double clipped_second_moment(double c) {
  if (is_unbounded(c)) return 1.0;
  return 2.0 * Phi(c) - 1.0;
}

double normal_min_sq(double c) {
  if (is_unbounded(c)) return 1.0;
  return 2.0 * Phi(c) - 1.0 - 2.0 * c * phi(c) + 2.0 * c * c * Phi(-c);
}

// --- regularized incomplete gamma --------------------------------------

namespace {

double gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double fpmin = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_contfrac(a, x);
}

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_contfrac(a, x);
}

// --- chi_k --------------------------------------------------------------

double chi_pdf(int k, double u) {
  if (u <= 0.0) return 0.0;
  const double logf = (1.0 - 0.5 * k) * std::log(2.0) - std::lgamma(0.5 * k) +
                      (k - 1) * std::log(u) - 0.5 * u * u;
  return std::exp(logf);
}

double chi_mean(int k) {
  return kSqrt2 * std::exp(std::lgamma(0.5 * (k + 1)) - std::lgamma(0.5 * k));
}

double chi_tail(int k, double c) {
  if (c <= 0.0) return 1.0;
  if (is_unbounded(c)) return 0.0;
  return gamma_q(0.5 * k, 0.5 * c * c);
}

namespace {
// E |U| 1(|U| > c) and E |U|^2 1(|U| <= c): the chi density absorbs one or
// two powers of u into chi_{k+1} / chi_{k+2} densities.
double chi_abs_above(int k, double c) {
  if (is_unbounded(c)) return 0.0;
  return chi_mean(k) * gamma_q(0.5 * (k + 1), 0.5 * c * c);
}
double chi_sq_below(int k, double c) {
  if (is_unbounded(c)) return static_cast<double>(k);
  return k * gamma_p(0.5 * k + 1.0, 0.5 * c * c);
}
}  // namespace

double chi_clipped_abs(int k, double c) {
  if (is_unbounded(c)) return 0.0;
  return chi_abs_above(k, c) - c * chi_tail(k, c);
}

double chi_clipped_second(int k, double c) {
  if (is_unbounded(c)) return static_cast<double>(k);
  return chi_sq_below(k, c) + c * chi_abs_above(k, c);
}

double chi_min_sq(int k, double c) {
  if (is_unbounded(c)) return static_cast<double>(k);
  return chi_sq_below(k, c) + c * c * chi_tail(k, c);
}

std::pair<double, double> chi_clipped_moments(int k, double c) {
  return {chi_clipped_abs(k, c), chi_clipped_second(k, c)};
}

// --- scale score T = U^2 - alpha^2 ---------------------------------------

ScaleMoments scale_clipped_moments(double alpha, double c) {
  const double a2 = alpha * alpha;
  ScaleMoments m{};
  if (is_unbounded(c)) {
    m.clipped_abs = 0.0;
    m.centered_clip = 1.0 - a2;
    m.second_clip = 3.0 - 2.0 * a2 + a2 * a2;  // E(U^2 - a2)^2
    m.min_sq = m.second_clip;
    return m;
  }
  const double hi = std::sqrt(a2 + c);
  const double lo = (a2 > c) ? std::sqrt(a2 - c) : 0.0;
  const bool two_sided = a2 > c;  // lower clipping of |u| active

  // symmetric in u: every expectation is twice the half-line integral
  const double up = 2.0 * (nm2(hi, kInf) - (a2 + c) * nm0(hi, kInf));
  const double dn = two_sided ? 2.0 * ((a2 - c) * nm0(0.0, lo) - nm2(0.0, lo)) : 0.0;
  m.clipped_abs = up + dn;

  const double mid_cen = 2.0 * (nm2(lo, hi) - a2 * nm0(lo, hi));
  m.centered_clip = mid_cen + c * 2.0 * nm0(hi, kInf) - c * 2.0 * nm0(0.0, lo);

  const double mid_sq =
      2.0 * (nm4(lo, hi) - 2.0 * a2 * nm2(lo, hi) + a2 * a2 * nm0(lo, hi));
  const double abs_hi = 2.0 * (nm2(hi, kInf) - a2 * nm0(hi, kInf));
  const double abs_lo = two_sided ? 2.0 * (a2 * nm0(0.0, lo) - nm2(0.0, lo)) : 0.0;
  m.second_clip = mid_sq + c * (abs_hi + abs_lo);
  m.min_sq = mid_sq + c * c * 2.0 * (nm0(hi, kInf) + nm0(0.0, lo));
  return m;
}

double scale_v_lower(double g) {
  if (g <= 0.0) return 0.0;
  const double s = std::sqrt(g);
  return 2.0 * (g * nm0(0.0, s) - nm2(0.0, s));
}

double scale_v_upper(double g, double c) {
  const double t = g + c;
  if (std::isinf(t)) return 0.0;
  if (t <= 0.0) return 1.0 - t;  // E(U^2 - t), no clipping region
  const double s = std::sqrt(t);
  return 2.0 * (nm2(s, kInf) - t * nm0(s, kInf));
}

}  // namespace robicurve
