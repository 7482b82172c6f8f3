#pragma once

#include <vector>

#include "robicurve/models.hpp"

namespace robicurve {

struct NeighborhoodSpec {
  enum class Kind { c, v, h };
  Kind kind = Kind::c;
  double radius = 0.0;
  int alpha = 1;  // conditional exponent for regression neighborhoods

  static NeighborhoodSpec contamination(double r) { return {Kind::c, r, 1}; }
  static NeighborhoodSpec total_variation(double r) { return {Kind::v, r, 1}; }
  static NeighborhoodSpec hellinger(double r) { return {Kind::h, r, 1}; }
};

// Huber M-estimate score psi_s(u) = (-m) v u ^ m for contamination size s.
struct HuberPsi {
  double s = 0.0;
  double m = kInf;  // infinity at s = 0; 0 encodes the sign-score at s = 1

  double eval(double u) const;
};

// A solved influence curve.  The same record carries every model variant;
// `form` says which fields are meaningful and how eval() reads them.
struct InfluenceCurve {
  enum class Form {
    LocationC,        // A u min{1, c/|u|};           k-dim via |u| ~ chi_k
    ScaleC,           // A (u^2 - a^2) min{1, c/|u^2-a^2|}
    ScaleV,           // A [(g v u^2 ^ (g+c)) - 1]
    RegressionC1,     // A x u min{1, c/|xu|}
    RegScaleJoint,    // stacked (A x u, A2 (u^2-1-z)) w,  w = min{1, b/|.|}
    RegIntercept,     // (A x + A2) u min{1, b/|(A x + A2) u|}
  };

  Form form = Form::LocationC;
  ModelSpec model;
  NeighborhoodSpec nbd;
  int k = 1;
  double r = 0.0;

  double A = 1.0;          // standardization (scalar)
  double A2 = 0.0;         // A_mu (intercept) or A_sc (joint)
  double center = 0.0;     // alpha_r (scale-c), z (scale blocks), else 0
  double clip_lower = -kInf;  // g_r for scale-v; -inf when inactive
  double clip_upper = kInf;   // c_r / b; +inf when unclipped; 0 for min-bias limits

  double bias = kInf;      // omega: sup norm (c/h) or total oscillation (v)
  double variance = 0.0;   // E |eta|^2 (trace of Cov)
  bool lower_clipping_active = false;  // scale-c regime flag (c < alpha^2)
  std::vector<double> residuals;       // defining equations at the solution

  bool min_bias_limit() const { return std::isinf(r); }

  // Scalar-argument models (location k=1, scale).
  double eval1(double u) const;
  // Regression forms; x scalar (k = 1 designs).  component 0 = theta block,
  // component 1 = sigma block (joint only).
  double eval2(double x, double u, int component = 0) const;
  // k-dim location: eta(u) = radial_factor(|u|) * u.
  double radial_factor(double norm_u) const;
};

// Contamination size s in [0,1] -> clipping constant m_s.
HuberPsi solve_huber(double s);

InfluenceCurve solve_location(int k, double r);
InfluenceCurve solve_scale_c(double r);
InfluenceCurve solve_scale_v(double r);
InfluenceCurve solve_regression_c1(double r, const RegressorDist& K, int alpha = 1);

enum class RegScaleTarget { theta, sigma, joint };
InfluenceCurve solve_regression_scale(double r, const RegressorDist& K, RegScaleTarget target);

InfluenceCurve solve_regression_intercept(double r, const RegressorDist& K);

// maxMSE with intercept nuisance / maxMSE with intercept known  -  1.
double nonadaptivity_ratio(double r, const RegressorDist& K);

// Monotone scalar root finding used across the solvers: f increasing with
// f(lo) <= 0 <= f(hi) (bracket auto-expanded upward if needed).
double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-15, int max_iter = 300);

}  // namespace robicurve
