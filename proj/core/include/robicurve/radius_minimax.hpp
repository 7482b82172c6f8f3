#pragma once

#include "robicurve/risk.hpp"

namespace robicurve {

struct RadiusMinimaxResult {
  double r_lo = 0.0;
  double r_hi = kInf;
  double r_star = 0.0;       // minimax design radius
  double inefficiency = 0.0; // sup_r relMSE(eta_{r_star}, r) - 1
  double inner_sup_argmax = 0.0;
  bool interior_sup_warning = false;  // sup not attained at an interval endpoint
};

// r_star = argmin_{r0} sup_{r in [r_lo, r_hi]} relMSE(eta_{r0}, r).
// Outer search: golden section on log r0; inner sup: interval endpoints plus
// a 64-point log-spaced refinement grid (cached optimal denominators).
RadiusMinimaxResult least_favorable_radius(RiskModel model, int k, double r_lo, double r_hi);

// The completely-unknown-radius problem: interval [0, inf).
RadiusMinimaxResult minimax_radius_unknown(RiskModel model, int k);

}  // namespace robicurve
