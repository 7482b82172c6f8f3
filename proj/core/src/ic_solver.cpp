#include "robicurve/ic_solver.hpp"

#include <algorithm>
#include <cmath>

#include "robicurve/dist_kernel.hpp"
#include "robicurve/quadrature.hpp"

namespace robicurve {

double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                         double tol, int max_iter) {
  double flo = f(lo), fhi = f(hi);
  int guard = 0;
  while (flo > 0.0) {  // slide the bracket down
    hi = lo;
    fhi = flo;
    lo = (lo > 0.0) ? lo * 0.5 : (lo < 0.0 ? lo * 2.0 : -1.0);
    flo = f(lo);
    if (++guard > 2000) throw SolverNonconvergence("bisect: no lower bracket");
  }
  while (fhi < 0.0) {  // expand upward
    lo = hi;
    flo = fhi;
    hi = (hi > 0.0) ? hi * 2.0 : (hi < 0.0 ? hi * 0.5 : 1.0);
    fhi = f(hi);
    if (++guard > 2000) throw SolverNonconvergence("bisect: no upper bracket");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  double mid = lo;
  for (int it = 0; it < max_iter; ++it) {
    mid = 0.5 * (lo + hi);
    if (hi - lo < tol * (1.0 + std::abs(mid))) break;
    const double fm = f(mid);
    if (fm < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// --- Huber ---------------------------------------------------------------

double HuberPsi::eval(double u) const {
  if (m == 0.0) return (u > 0.0) - (u < 0.0);
  if (is_unbounded(m)) return u;
  return std::clamp(u, -m, m);
}

HuberPsi solve_huber(double s) {
  if (s < 0.0 || s > 1.0) throw ConfigError("solve_huber: s in [0,1] required");
  HuberPsi psi;
  psi.s = s;
  if (s == 0.0) {
    psi.m = kInf;
  } else if (s == 1.0) {
    psi.m = 0.0;  // sign-score limit (median)
  } else {
    const double ratio = s / (1.0 - s);
    psi.m = bisect_increasing(
        [&](double m) { return ratio * m - clipped_abs_moment(m); }, 1e-12, 3.0);
  }
  return psi;
}

// --- location (k >= 1, chi_k moments) -------------------------------------

double InfluenceCurve::radial_factor(double t) const {
  if (min_bias_limit()) return bias / t;
  if (is_unbounded(clip_upper)) return A;
  return A * std::min(1.0, clip_upper / t);
}

InfluenceCurve solve_location(int k, double r) {
  if (k < 1 || r < 0.0) throw ConfigError("solve_location: k >= 1 and r >= 0 required");
  InfluenceCurve ic;
  ic.form = InfluenceCurve::Form::LocationC;
  ic.model = ModelSpec::location(k);
  ic.nbd = NeighborhoodSpec::contamination(r);
  ic.k = k;
  ic.r = r;
  if (r == 0.0) {
    ic.A = 1.0;
    ic.clip_upper = kInf;
    ic.bias = kInf;
    ic.variance = static_cast<double>(k);
    ic.residuals = {0.0, 0.0};
    return ic;
  }
  if (std::isinf(r)) {
    const double b_min = k / chi_mean(k);
    ic.A = kInf;
    ic.clip_upper = 0.0;
    ic.bias = b_min;
    ic.variance = b_min * b_min;
    ic.residuals = {0.0, 0.0};
    return ic;
  }
  const double c = bisect_increasing(
      [&](double cc) { return r * r * cc - chi_clipped_abs(k, cc); }, 1e-14, 4.0);
  ic.clip_upper = c;
  ic.A = k / chi_clipped_second(k, c);
  ic.bias = ic.A * c;
  ic.variance = ic.A * ic.A * chi_min_sq(k, c);
  ic.residuals = {r * r * c - chi_clipped_abs(k, c),
                  ic.A * chi_clipped_second(k, c) - k};
  return ic;
}

// --- scale, contamination ---------------------------------------------------

namespace {

double scale_c_clip_for(double alpha, double r) {
  return bisect_increasing(
      [&](double c) { return r * r * c - scale_clipped_moments(alpha, c).clipped_abs; },
      1e-14, 4.0);
}

}  // namespace

InfluenceCurve solve_scale_c(double r) {
  if (r < 0.0) throw ConfigError("solve_scale_c: r >= 0 required");
  InfluenceCurve ic;
  ic.form = InfluenceCurve::Form::ScaleC;
  ic.model = ModelSpec::scale();
  ic.nbd = NeighborhoodSpec::contamination(r);
  ic.r = r;
  if (r == 0.0) {
    ic.A = 0.5;
    ic.center = 1.0;
    ic.clip_upper = kInf;
    ic.bias = kInf;
    ic.variance = 0.5;  // A^2 E(u^2-1)^2
    ic.residuals = {0.0, 0.0, 0.0};
    return ic;
  }
  if (std::isinf(r)) {
    const double alpha = Phi_inv(0.75);
    const double b_min = 1.0 / (4.0 * alpha * phi(alpha));
    ic.A = kInf;
    ic.center = alpha;
    ic.clip_upper = 0.0;
    ic.bias = b_min;
    ic.variance = b_min * b_min;
    ic.lower_clipping_active = true;
    ic.residuals = {0.0, 0.0, 0.0};
    return ic;
  }
  // outer: centering equation in alpha (decreasing), inner: bias equation in c
  const double alpha = bisect_increasing(
      [&](double a) { return -scale_clipped_moments(a, scale_c_clip_for(a, r)).centered_clip; },
      0.4, 1.3);
  const double c = scale_c_clip_for(alpha, r);
  const ScaleMoments m = scale_clipped_moments(alpha, c);
  ic.A = 1.0 / m.second_clip;
  ic.center = alpha;
  ic.clip_upper = c;
  ic.lower_clipping_active = c < alpha * alpha;
  if (ic.lower_clipping_active) ic.clip_lower = std::sqrt(alpha * alpha - c);
  ic.bias = ic.A * c;
  ic.variance = ic.A * ic.A * m.min_sq;
  ic.residuals = {m.centered_clip, r * r * c - m.clipped_abs, ic.A * m.second_clip - 1.0};
  return ic;
}

// --- scale, total variation --------------------------------------------------

namespace {

// centering: E(g - u^2)_+ = E(u^2 - g - c)_+, increasing in g
double scale_v_center_for(double c) {
  return bisect_increasing(
      [&](double g) { return scale_v_lower(g) - scale_v_upper(g, c); },
      -(c + 10.0), 60.0);
}

}  // namespace

InfluenceCurve solve_scale_v(double r) {
  if (r < 0.0) throw ConfigError("solve_scale_v: r >= 0 required");
  InfluenceCurve ic;
  ic.form = InfluenceCurve::Form::ScaleV;
  ic.model = ModelSpec::scale();
  ic.nbd = NeighborhoodSpec::total_variation(r);
  ic.r = r;
  if (r == 0.0) {
    ic.A = 0.5;
    ic.clip_lower = -kInf;
    ic.clip_upper = kInf;
    ic.bias = kInf;
    ic.variance = 0.5;
    ic.residuals = {0.0, 0.0, 0.0};
    return ic;
  }
  if (std::isinf(r)) {
    // MADv limit: eta = omega (1(u^2 > 1) - p), total oscillation omega.
    const double omega = 1.0 / (2.0 * phi(1.0));
    const double p = 2.0 * Phi(-1.0);
    ic.A = kInf;
    ic.clip_lower = 1.0;
    ic.clip_upper = 0.0;
    ic.bias = omega;
    ic.variance = omega * omega * p * (1.0 - p);
    ic.residuals = {0.0, 0.0, 0.0};
    return ic;
  }
  const double c = bisect_increasing(
      [&](double cc) { return r * r * cc - scale_v_lower(scale_v_center_for(cc)); },
      1e-12, 8.0);
  const double g = scale_v_center_for(c);
  // closed-form region moments for clip(u^2) = g v u^2 ^ (g+c)
  const double s1 = std::sqrt(std::max(g, 0.0));
  const double s2 = std::sqrt(g + c);
  const double mean_clip = g * 2.0 * nm0(0.0, s1) + 2.0 * nm2(s1, s2) +
                           (g + c) * 2.0 * nm0(s2, kInf);
  const double fisher = g * 2.0 * (nm2(0.0, s1) - nm0(0.0, s1)) +
                        2.0 * (nm4(s1, s2) - nm2(s1, s2)) +
                        (g + c) * 2.0 * (nm2(s2, kInf) - nm0(s2, kInf));
  const double var_clip = (g - 1.0) * (g - 1.0) * 2.0 * nm0(0.0, s1) +
                          2.0 * (nm4(s1, s2) - 2.0 * nm2(s1, s2) + nm0(s1, s2)) +
                          (g + c - 1.0) * (g + c - 1.0) * 2.0 * nm0(s2, kInf);
  ic.A = 1.0 / fisher;
  ic.clip_lower = g;
  ic.clip_upper = c;
  ic.bias = ic.A * c;  // total oscillation
  ic.variance = ic.A * ic.A * var_clip;
  ic.residuals = {mean_clip - 1.0, r * r * c - scale_v_lower(g), ic.A * fisher - 1.0};
  return ic;
}

// --- regression, contamination, sigma known --------------------------------

namespace {

// E |x| f(c/|x|) style mixtures over the regressor law.
double mix_clipped_abs(const RegressorDist& K, double cc) {
  if (K.discrete_kind()) {
    double s = 0.0;
    for (size_t i = 0; i < K.atoms.size(); ++i) {
      double t = 0.0;
      for (double xi : K.atoms[i]) t += xi * xi;
      t = std::sqrt(t);
      if (t > 0.0) s += K.weights[i] * t * clipped_abs_moment(cc / t);
    }
    return s;
  }
  return chi_expectation(K.k, [cc](double t) { return t * clipped_abs_moment(cc / t); });
}

double mix_clipped_second(const RegressorDist& K, double cc) {
  if (K.discrete_kind()) {
    double s = 0.0;
    for (size_t i = 0; i < K.atoms.size(); ++i) {
      double t = 0.0;
      for (double xi : K.atoms[i]) t += xi * xi;
      t = std::sqrt(t);
      if (t > 0.0) s += K.weights[i] * t * t * clipped_second_moment(cc / t);
    }
    return s;
  }
  return chi_expectation(K.k, [cc](double t) { return t * t * clipped_second_moment(cc / t); });
}

double mix_min_sq(const RegressorDist& K, double cc) {
  if (K.discrete_kind()) {
    double s = 0.0;
    for (size_t i = 0; i < K.atoms.size(); ++i) {
      double t = 0.0;
      for (double xi : K.atoms[i]) t += xi * xi;
      t = std::sqrt(t);
      if (t > 0.0) s += K.weights[i] * t * t * normal_min_sq(cc / t);
    }
    return s;
  }
  return chi_expectation(K.k, [cc](double t) { return t * t * normal_min_sq(cc / t); });
}

}  // namespace

InfluenceCurve solve_regression_c1(double r, const RegressorDist& K, int alpha) {
  if (r < 0.0) throw ConfigError("solve_regression_c1: r >= 0 required");
  if (alpha != 1 && alpha != 2)
    throw ConfigError("solve_regression_c1: alpha in {1,2} supported");
  K.validate();
  InfluenceCurve ic;
  ic.form = InfluenceCurve::Form::RegressionC1;
  ic.model = ModelSpec::regression(K);
  ic.nbd = NeighborhoodSpec::contamination(r);
  ic.nbd.alpha = alpha;
  ic.k = K.k;
  ic.r = r;

  if (alpha == 2) {
    // Average-square conditional neighborhoods: the optimal clipping is in
    // |u| alone and the constants coincide with 1-dim location.
    InfluenceCurve loc = solve_location(1, r);
    ic.A = loc.A;
    ic.clip_upper = loc.clip_upper;
    ic.bias = loc.bias;
    ic.variance = loc.variance;
    ic.residuals = loc.residuals;
    return ic;
  }

  const int k = K.k;
  const double mean_abs = K.mean_abs();
  if (mean_abs <= 0.0) throw SingularDesign("regression design carries no mass away from 0");
  if (r == 0.0) {
    // classical: A = k / E|x|^2 (spherical / scalar designs)
    Mat xx = K.second_moment();
    double tr = 0.0;
    for (int i = 0; i < k; ++i) tr += xx(i, i);
    ic.A = k / tr;
    ic.clip_upper = kInf;
    ic.bias = kInf;
    ic.variance = ic.A * ic.A * tr;  // = A * k / ... = k^2/tr for scalar A
    ic.residuals = {0.0, 0.0};
    return ic;
  }
  if (std::isinf(r)) {
    const double b_min = std::sqrt(M_PI / 2.0) * k / mean_abs;
    ic.A = kInf;
    ic.clip_upper = 0.0;
    ic.bias = b_min;
    ic.variance = b_min * b_min;
    ic.residuals = {0.0, 0.0};
    return ic;
  }
  const double cc = bisect_increasing(
      [&](double c) { return r * r * c - mix_clipped_abs(K, c); }, 1e-14, 4.0);
  ic.A = k / mix_clipped_second(K, cc);
  ic.clip_upper = ic.A * cc;  // b = A c, clipping measured on the IC scale
  ic.bias = ic.A * cc;
  ic.variance = ic.A * ic.A * mix_min_sq(K, cc);
  ic.residuals = {r * r * cc - mix_clipped_abs(K, cc),
                  ic.A * mix_clipped_second(K, cc) - k};
  return ic;
}

// --- regression + scale ------------------------------------------------------

namespace {

// Internal discrete view of |x| under K; the standard normal design is
// replaced by a fixed high-order Gauss discretization of the half-normal law
// (the adaptive quadrature oracle re-verifies the solved system in tests).
struct AbsDesign {
  std::vector<double> x, w;
};

AbsDesign abs_design(const RegressorDist& K) {
  AbsDesign d;
  if (K.discrete_kind()) {
    for (size_t i = 0; i < K.atoms.size(); ++i) {
      double t = 0.0;
      for (double xi : K.atoms[i]) t += xi * xi;
      d.x.push_back(std::sqrt(t));
      d.w.push_back(K.weights[i]);
    }
    return d;
  }
  if (K.k != 1)
    throw ConfigError("joint regression-scale solver supports k = 1 designs");
  // 200 Gauss-Legendre nodes on [0, 10] against 2 phi(x): error far below
  // the 1e-10 residual budget for analytic integrands.
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    // reuse the oracle's nodes through integrate() is impossible here; build
    // Chebyshev-seeded Newton nodes for P_n directly.
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 1.0, p1 = t, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = t;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    const double wleg = 2.0 / ((1.0 - t * t) * dp * dp);
    const double x = 5.0 * (t + 1.0);  // map [-1,1] -> [0,10]
    d.x.push_back(x);
    d.w.push_back(5.0 * wleg * 2.0 * phi(x));
  }
  return d;
}

struct JointState {
  double A_rg, A_sc, z, b;
};

// E over (|x|, u) of f, splitting the u-axis at the |Y| = b contact points
// (quadratic in u^2) so each adaptive piece is smooth.
double joint_expect(const AbsDesign& d, const JointState& s,
                    const std::function<double(double, double)>& f) {
  double total = 0.0;
  for (size_t i = 0; i < d.x.size(); ++i) {
    const double x = d.x[i];
    // |Y|^2 = A_rg^2 x^2 v + A_sc^2 (v - 1 - z)^2, v = u^2; solve |Y| = b.
    std::vector<double> brk{0.0};
    if (std::isfinite(s.b)) {
      const double a2 = s.A_sc * s.A_sc;
      const double B = s.A_rg * s.A_rg * x * x - 2.0 * a2 * (1.0 + s.z);
      const double C = a2 * (1.0 + s.z) * (1.0 + s.z) - s.b * s.b;
      const double disc = B * B - 4.0 * a2 * C;
      if (disc > 0.0 && a2 > 0.0) {
        const double sq = std::sqrt(disc);
        for (double v : {(-B - sq) / (2.0 * a2), (-B + sq) / (2.0 * a2)})
          if (v > 0.0) brk.push_back(std::sqrt(v));
      }
    }
    brk.push_back(12.0);
    std::sort(brk.begin(), brk.end());
    double e = 0.0;
    for (size_t j = 0; j + 1 < brk.size(); ++j) {
      if (brk[j + 1] <= brk[j] || brk[j] >= 12.0) continue;
      QuadratureSpec spec;
      spec.abs_tol = 1e-13;
      spec.lo = brk[j];
      spec.hi = std::min(brk[j + 1], 12.0);
      // integrands are even in u: integrate the positive half twice
      e += 2.0 * integrate([&](double u) { return f(x, u) * phi(u); }, spec);
    }
    total += d.w[i] * e;
  }
  return total;
}

double joint_Y(const JointState& s, double x, double u) {
  const double a = s.A_rg * x * u;
  const double b = s.A_sc * (u * u - 1.0 - s.z);
  return std::sqrt(a * a + b * b);
}

}  // namespace

InfluenceCurve solve_regression_scale(double r, const RegressorDist& K, RegScaleTarget target) {
  K.validate();
  if (target == RegScaleTarget::theta) {
    // Sigma as nuisance does not alter the theta system (F symmetric).
    return solve_regression_c1(r, K, 1);
  }
  if (target == RegScaleTarget::sigma) {
    // The sigma system is the 1-dim scale-c system; z_sc = alpha_r^2 - 1.
    InfluenceCurve ic = solve_scale_c(r);
    ic.model = ModelSpec::regression_scale(K);
    return ic;
  }
  // joint
  if (r < 0.0) throw ConfigError("solve_regression_scale: r >= 0 required");
  if (std::isinf(r))
    throw ConfigError("joint regression-scale minimal-bias limit not supported");
  InfluenceCurve ic;
  ic.form = InfluenceCurve::Form::RegScaleJoint;
  ic.model = ModelSpec::regression_scale(K);
  ic.nbd = NeighborhoodSpec::contamination(r);
  ic.k = K.k;
  ic.r = r;
  Mat xx = K.second_moment();
  if (r == 0.0) {
    ic.A = 1.0 / xx(0, 0);
    ic.A2 = 0.5;
    ic.center = 0.0;
    ic.clip_upper = kInf;
    ic.bias = kInf;
    ic.variance = ic.A + 0.5;
    ic.residuals = {0.0, 0.0, 0.0, 0.0};
    return ic;
  }
  const AbsDesign d = abs_design(K);
  JointState s{solve_regression_c1(r, K, 1).A, solve_scale_c(r).A,
               solve_scale_c(r).center * solve_scale_c(r).center - 1.0, 1.0};
  auto weight = [&](double x, double u) {
    const double y = joint_Y(s, x, u);
    return (y <= s.b) ? 1.0 : s.b / y;
  };
  for (int iter = 0; iter < 300; ++iter) {
    // clipping bound
    s.b = bisect_increasing(
        [&](double bb) {
          JointState t = s;
          t.b = bb;
          const double e = joint_expect(d, t, [&](double x, double u) {
            const double y = joint_Y(t, x, u);
            return std::max(y - bb, 0.0);
          });
          return r * r * bb - e;
        },
        1e-10, 8.0, 1e-13);
    // centering of the scale block (decreasing in z)
    s.z = bisect_increasing(
        [&](double zz) {
          JointState t = s;
          t.z = zz;
          return -joint_expect(d, t, [&](double x, double u) {
            const double y = joint_Y(t, x, u);
            const double w = (y <= t.b) ? 1.0 : t.b / y;
            return (u * u - 1.0 - zz) * w;
          });
        },
        -0.9, 3.0, 1e-13);
    const double frg = joint_expect(d, s, [&](double x, double u) {
      return x * x * u * u * weight(x, u);
    });
    const double fsc = joint_expect(d, s, [&](double x, double u) {
      return (u * u - 1.0 - s.z) * (u * u - 1.0) * weight(x, u);
    });
    const double arg_new = 1.0 / frg, asc_new = 1.0 / fsc;
    const double delta = std::max(std::abs(arg_new - s.A_rg), std::abs(asc_new - s.A_sc));
    s.A_rg = 0.5 * s.A_rg + 0.5 * arg_new;
    s.A_sc = 0.5 * s.A_sc + 0.5 * asc_new;
    if (delta < 1e-12) break;
  }
  // final residuals on the solver's own discretization
  const double res_b = r * r * s.b - joint_expect(d, s, [&](double x, double u) {
                         return std::max(joint_Y(s, x, u) - s.b, 0.0);
                       });
  const double res_z = joint_expect(d, s, [&](double x, double u) {
    return (u * u - 1.0 - s.z) * weight(x, u);
  });
  const double res_rg = s.A_rg * joint_expect(d, s, [&](double x, double u) {
                          return x * x * u * u * weight(x, u);
                        }) - 1.0;
  const double res_sc = s.A_sc * joint_expect(d, s, [&](double x, double u) {
                          return (u * u - 1.0 - s.z) * (u * u - 1.0) * weight(x, u);
                        }) - 1.0;
  if (std::max({std::abs(res_b), std::abs(res_z), std::abs(res_rg), std::abs(res_sc)}) > 1e-10)
    throw SolverNonconvergence("joint regression-scale fixed point did not converge");
  ic.A = s.A_rg;
  ic.A2 = s.A_sc;
  ic.center = s.z;
  ic.clip_upper = s.b;
  ic.bias = s.b;
  ic.variance = joint_expect(d, s, [&](double x, double u) {
    const double y = joint_Y(s, x, u);
    return std::min(y * y, s.b * s.b);
  });
  ic.residuals = {res_b, res_z, res_rg, res_sc};
  return ic;
}

// --- regression with intercept nuisance ------------------------------------

InfluenceCurve solve_regression_intercept(double r, const RegressorDist& K) {
  if (r < 0.0) throw ConfigError("solve_regression_intercept: r >= 0 required");
  if (std::isinf(r))
    throw ConfigError("intercept system has no closed minimal-bias limit; finite r required");
  if (!K.discrete_kind() && K.kind != RegressorDist::Kind::StandardNormal)
    throw ConfigError("unsupported design");
  ModelSpec model = ModelSpec::regression_intercept(K);  // validates E x = 0
  if (K.k != 1) throw ConfigError("intercept solver supports k = 1 designs");

  InfluenceCurve ic;
  ic.form = InfluenceCurve::Form::RegIntercept;
  ic.model = model;
  ic.nbd = NeighborhoodSpec::contamination(r);
  ic.r = r;

  if (!K.discrete_kind()) {
    // symmetric design: robustly adaptive, A_mu = 0
    ic = solve_regression_c1(r, K, 1);
    ic.form = InfluenceCurve::Form::RegIntercept;
    ic.model = model;
    ic.A2 = 0.0;
    return ic;
  }

  const size_t n = K.atoms.size();
  std::vector<double> x(n), w(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = K.atoms[i][0];
    w[i] = K.weights[i];
  }
  double ex2 = 0.0;
  for (size_t i = 0; i < n; ++i) ex2 += w[i] * x[i] * x[i];

  if (r == 0.0) {
    ic.A = 1.0 / ex2;
    ic.A2 = 0.0;
    ic.clip_upper = kInf;
    ic.bias = kInf;
    ic.variance = 1.0 / ex2;
    ic.residuals = {0.0, 0.0, 0.0};
    return ic;
  }

  double A = solve_regression_c1(r, K, 1).A, Amu = 0.0, b = 1.0;
  std::vector<double> t(n), S(n);
  for (int iter = 0; iter < 500; ++iter) {
    for (size_t i = 0; i < n; ++i) t[i] = A * x[i] + Amu;
    b = bisect_increasing(
        [&](double bb) {
          double e = 0.0;
          for (size_t i = 0; i < n; ++i)
            if (t[i] != 0.0) e += w[i] * std::abs(t[i]) * clipped_abs_moment(bb / std::abs(t[i]));
          return r * r * bb - e;
        },
        1e-12, 8.0);
    double mxx = 0.0, mx = 0.0, m1 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      S[i] = (t[i] != 0.0) ? clipped_second_moment(b / std::abs(t[i])) : 1.0;
      mxx += w[i] * x[i] * x[i] * S[i];
      mx += w[i] * x[i] * S[i];
      m1 += w[i] * S[i];
    }
    Mat m(2);
    m(0, 0) = mxx;
    m(0, 1) = mx;
    m(1, 0) = mx;
    m(1, 1) = m1;
    const std::vector<double> sol = solve_linear(m, {1.0, 0.0});
    const double delta = std::max(std::abs(sol[0] - A), std::abs(sol[1] - Amu));
    A = 0.5 * A + 0.5 * sol[0];
    Amu = 0.5 * Amu + 0.5 * sol[1];
    if (delta < 1e-13) break;
  }
  for (size_t i = 0; i < n; ++i) {
    t[i] = A * x[i] + Amu;
    S[i] = (t[i] != 0.0) ? clipped_second_moment(b / std::abs(t[i])) : 1.0;
  }
  double res_fisher = -1.0, res_center = 0.0, res_bias = r * r * b, var = 0.0;
  double cross = 0.0;
  for (size_t i = 0; i < n; ++i) {
    res_fisher += w[i] * x[i] * (A * x[i] + Amu) * S[i] * 1.0;  // E rho x u^2 w - 1 ... see below
    cross += w[i] * (A * x[i] + Amu) * S[i];
    if (t[i] != 0.0) {
      res_bias -= w[i] * std::abs(t[i]) * clipped_abs_moment(b / std::abs(t[i]));
      var += w[i] * t[i] * t[i] * normal_min_sq(b / std::abs(t[i]));
    }
  }
  res_center = cross;  // E rho = 0 reduces to E (A x + A_mu) u^2 w = 0 pairing
  if (std::max({std::abs(res_fisher), std::abs(res_center), std::abs(res_bias)}) > 1e-10)
    throw SolverNonconvergence("intercept fixed point did not converge");
  ic.A = A;
  ic.A2 = Amu;
  ic.clip_upper = b;
  ic.bias = b;
  ic.variance = var;
  ic.residuals = {res_fisher, res_center, res_bias};
  return ic;
}

double nonadaptivity_ratio(double r, const RegressorDist& K) {
  const InfluenceCurve with_nuisance = solve_regression_intercept(r, K);
  const InfluenceCurve known = solve_regression_c1(r, K, 1);
  auto mse = [r](const InfluenceCurve& ic) {
    if (std::isinf(ic.bias)) return r == 0.0 ? ic.variance : kInf;
    return ic.variance + r * r * ic.bias * ic.bias;
  };
  return mse(with_nuisance) / mse(known) - 1.0;
}

// --- evaluators ---------------------------------------------------------

double InfluenceCurve::eval1(double u) const {
  switch (form) {
    case Form::LocationC: {
      if (min_bias_limit()) return bias * ((u > 0.0) - (u < 0.0));
      const double t = std::abs(u);
      if (is_unbounded(clip_upper) || t <= clip_upper) return A * u;
      return A * u * clip_upper / t;
    }
    case Form::ScaleC: {
      const double a2 = center * center;
      if (min_bias_limit()) {
        const double T = u * u - a2;
        return bias * ((T > 0.0) - (T < 0.0));
      }
      const double T = u * u - a2;
      if (is_unbounded(clip_upper) || std::abs(T) <= clip_upper) return A * T;
      return A * T * clip_upper / std::abs(T);
    }
    case Form::ScaleV: {
      if (min_bias_limit()) {
        const double p = 2.0 * Phi(-1.0);
        return bias * ((u * u > 1.0 ? 1.0 : 0.0) - p);
      }
      double v = u * u;
      if (!is_unbounded(clip_upper)) v = std::min(v, clip_lower + clip_upper);
      if (!std::isinf(clip_lower)) v = std::max(v, clip_lower);
      return A * (v - 1.0);
    }
    default:
      throw ConfigError("eval1: regression influence curves need (x, u)");
  }
}

double InfluenceCurve::eval2(double x, double u, int component) const {
  switch (form) {
    case Form::RegressionC1: {
      if (min_bias_limit()) {
        const double sx = (x > 0.0) - (x < 0.0), su = (u > 0.0) - (u < 0.0);
        return bias * sx * su;
      }
      const double t = A * std::abs(x * u);
      const double val = A * x * u;
      if (is_unbounded(clip_upper) || t <= clip_upper) return val;
      return val * clip_upper / t;
    }
    case Form::RegIntercept: {
      const double coef = A * x + A2;
      const double t = std::abs(coef * u);
      const double val = coef * u;
      if (is_unbounded(clip_upper) || t <= clip_upper) return val;
      return val * clip_upper / t;
    }
    case Form::RegScaleJoint: {
      const double rg = A * x * u;
      const double sc = A2 * (u * u - 1.0 - center);
      const double y = std::sqrt(rg * rg + sc * sc);
      const double w = (is_unbounded(clip_upper) || y <= clip_upper) ? 1.0 : clip_upper / y;
      return (component == 0 ? rg : sc) * w;
    }
    default:
      return eval1(u);
  }
}

}  // namespace robicurve
