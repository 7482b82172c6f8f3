#include "robicurve/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "robicurve/dist_kernel.hpp"

namespace robicurve {
namespace {

// 20-point Gauss-Legendre nodes/weights on [-1,1], generated once by Newton
// iteration on P_20.  Independent of every closed form this oracle checks.
struct GaussRule {
  std::vector<double> x, w;
  GaussRule() {
    const int n = 20;
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
      // Chebyshev-based initial guess for the i-th root.
      double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = t;
        for (int j = 2; j <= n; ++j) {
          double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        double dt = p1 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-16) break;
      }
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      x[i] = t;
      w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
  }
};

const GaussRule& rule() {
  static const GaussRule g;
  return g;
}

double gauss(const std::function<double(double)>& f, double a, double b) {
  const GaussRule& g = rule();
  const double m = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(m + h * g.x[i]);
  return h * s;
}

struct Segment {
  double a, b, value, error;
};

double adapt(const std::function<double(double)>& f, double a, double b,
             const QuadratureSpec& spec) {
  auto eval = [&](double lo, double hi) {
    Segment s{lo, hi, 0.0, 0.0};
    const double whole = gauss(f, lo, hi);
    const double mid = 0.5 * (lo + hi);
    const double halves = gauss(f, lo, mid) + gauss(f, mid, hi);
    s.value = halves;
    s.error = std::abs(halves - whole);
    return s;
  };
  std::vector<double> cuts{a};
  for (double p : spec.breakpoints) {
    if (std::isfinite(p) && p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Segment> segs;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) segs.push_back(eval(cuts[i], cuts[i + 1]));
  }
  for (int iter = 0; iter < spec.max_subdivisions; ++iter) {
    double total = 0.0, err = 0.0;
    for (const Segment& s : segs) {
      total += s.value;
      err += s.error;
    }
    if (err <= spec.abs_tol || err <= spec.rel_tol * std::abs(total)) return total;
    auto worst = std::max_element(segs.begin(), segs.end(),
                                  [](const Segment& u, const Segment& v) { return u.error < v.error; });
    Segment s = *worst;
    segs.erase(worst);
    const double mid = 0.5 * (s.a + s.b);
    segs.push_back(eval(s.a, mid));
    segs.push_back(eval(mid, s.b));
  }
  throw OracleNonconvergence("quadrature did not converge after max subdivisions");
}

}  // namespace

double integrate(const std::function<double(double)>& f, const QuadratureSpec& spec) {
  const bool lo_inf = std::isinf(spec.lo), hi_inf = std::isinf(spec.hi);
  if (!lo_inf && !hi_inf) return adapt(f, spec.lo, spec.hi, spec);
  // Map the infinite direction(s) through x = atanh(t), dx = dt/(1-t^2).
  auto g = [&](double t) {
    const double x = std::atanh(t);
    const double jac = 1.0 / (1.0 - t * t);
    return f(x) * jac;
  };
  QuadratureSpec inner = spec;
  inner.breakpoints.clear();
  if (lo_inf && hi_inf) {
    inner.lo = -1.0 + 1e-16;
    inner.hi = 1.0 - 1e-16;
    for (double p : spec.breakpoints) inner.breakpoints.push_back(std::tanh(p));
    return adapt(g, inner.lo, inner.hi, inner);
  }
  if (hi_inf) {
    // x = a + atanh(t) - shifted one-sided map on t in (tanh(0), 1).
    const double a = spec.lo;
    auto h = [&](double t) {
      const double x = a + std::atanh(t);
      return f(x) / (1.0 - t * t);
    };
    inner.lo = 0.0;
    inner.hi = 1.0 - 1e-16;
    for (double p : spec.breakpoints) inner.breakpoints.push_back(std::tanh(p - a));
    return adapt(h, inner.lo, inner.hi, inner);
  }
  const double b = spec.hi;
  auto h = [&](double t) {
    const double x = b - std::atanh(t);
    return f(x) / (1.0 - t * t);
  };
  inner.lo = 0.0;
  inner.hi = 1.0 - 1e-16;
  for (double p : spec.breakpoints) inner.breakpoints.push_back(std::tanh(b - p));
  return adapt(h, inner.lo, inner.hi, inner);
}

double normal_expectation(const std::function<double(double)>& f, double abs_tol,
                          const std::vector<double>& breakpoints) {
  QuadratureSpec spec;
  spec.abs_tol = abs_tol;
  // The Gaussian weight makes anything beyond |u| = 40 vanish at double
  // precision; a finite window avoids wasted subdivisions near t = +-1.
  spec.lo = -40.0;
  spec.hi = 40.0;
  spec.breakpoints = breakpoints;
  return integrate([&](double u) { return f(u) * phi(u); }, spec);
}

double chi_expectation(int k, const std::function<double(double)>& f, double abs_tol,
                       const std::vector<double>& breakpoints) {
  QuadratureSpec spec;
  spec.abs_tol = abs_tol;
  spec.lo = 0.0;
  spec.hi = std::sqrt(static_cast<double>(k)) + 45.0;
  spec.breakpoints = breakpoints;
  return integrate([&](double u) { return f(u) * chi_pdf(k, u); }, spec);
}

}  // namespace robicurve
