#pragma once

#include <functional>
#include <vector>

#include "robicurve/common.hpp"

namespace robicurve {

// The independent oracle used to cross-check every closed-form moment in the
// library.  Adaptive Gauss subdivision (20-point rule, error estimated by
// interval halving); infinite endpoints are mapped to (-1,1) by the tanh
// substitution x = atanh(t).
struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 200;
  double lo = -kInf;
  double hi = kInf;
  // Known kink locations of the integrand.  Interval-halving error estimates
  // are blind to a corner sitting symmetrically inside a panel (both the whole
  // and the halved rule miss it by the same amount), so callers must list
  // non-smooth points explicitly; they become initial segment boundaries.
  std::vector<double> breakpoints;
};

double integrate(const std::function<double(double)>& f, const QuadratureSpec& spec = {});

// E[f(U)] for U ~ N(0,1); the weight is embedded here so callers pass plain f.
double normal_expectation(const std::function<double(double)>& f, double abs_tol = 1e-12,
                          const std::vector<double>& breakpoints = {});

// E[f(|X|)] for |X| ~ chi_k (k >= 1), by quadrature against the chi density.
double chi_expectation(int k, const std::function<double(double)>& f, double abs_tol = 1e-12,
                       const std::vector<double>& breakpoints = {});

}  // namespace robicurve
