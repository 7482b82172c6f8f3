#include "robicurve/radius_minimax.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace robicurve {

namespace {

struct GridDenominators {
  std::vector<double> r;        // finite grid radii (> 0)
  std::vector<double> den;      // maxMSE(eta_r, r)
  bool include_zero = false;
  bool include_inf = false;
  double den_zero = 0.0;        // variance of the classical IC
  double bias_min_sq = 0.0;     // squared minimal bias
};

GridDenominators build_grid(RiskModel model, int k, double r_lo, double r_hi) {
  GridDenominators g;
  g.include_zero = (r_lo == 0.0);
  g.include_inf = std::isinf(r_hi);
  const double lo = std::max(r_lo, 1e-4);
  const double hi = std::isinf(r_hi) ? 1e4 : r_hi;
  const int n = 64;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    g.r.push_back(lo * std::pow(hi / lo, t));
  }
  if (r_lo > 0.0) g.r.front() = r_lo;
  if (!std::isinf(r_hi)) g.r.back() = r_hi;
  for (double r : g.r) {
    const InfluenceCurve opt = solve_for(model, k, r);
    g.den.push_back(max_mse(opt, r));
  }
  if (g.include_zero) g.den_zero = solve_for(model, k, 0.0).variance;
  const InfluenceCurve mb = solve_for(model, k, kInf);
  g.bias_min_sq = mb.bias * mb.bias;
  return g;
}

// sup over the inner grid of relMSE(eta_{r0}, .), plus where it is attained
struct SupResult {
  double sup = 0.0;
  double argmax = 0.0;
  bool interior = false;
};

SupResult inner_sup(const GridDenominators& g, RiskModel model, int k, double r0) {
  const InfluenceCurve ic0 = solve_for(model, k, r0);
  const double var0 = ic0.variance;
  const double bias0_sq = ic0.bias * ic0.bias;
  SupResult res;
  std::vector<double> vals;
  vals.reserve(g.r.size() + 2);
  std::vector<double> where;
  if (g.include_zero) {
    vals.push_back(var0 / g.den_zero);
    where.push_back(0.0);
  }
  for (size_t i = 0; i < g.r.size(); ++i) {
    const double r = g.r[i];
    vals.push_back((var0 + r * r * bias0_sq) / g.den[i]);
    where.push_back(r);
  }
  if (g.include_inf) {
    vals.push_back(bias0_sq / g.bias_min_sq);
    where.push_back(kInf);
  }
  const auto it = std::max_element(vals.begin(), vals.end());
  res.sup = *it;
  res.argmax = where[static_cast<size_t>(it - vals.begin())];
  const size_t idx = static_cast<size_t>(it - vals.begin());
  res.interior = idx != 0 && idx + 1 != vals.size() &&
                 res.sup > vals.front() + 1e-9 && res.sup > vals.back() + 1e-9;
  return res;
}

}  // namespace

RadiusMinimaxResult least_favorable_radius(RiskModel model, int k, double r_lo, double r_hi) {
  if (!(r_lo >= 0.0) || !(r_hi >= r_lo)) throw ConfigError("least_favorable_radius: 0 <= r_lo <= r_hi");
  RadiusMinimaxResult out;
  out.r_lo = r_lo;
  out.r_hi = r_hi;
  if (r_lo == r_hi) {
    // degenerate interval: the radius is known exactly
    out.r_star = r_lo;
    out.inefficiency = 0.0;
    out.inner_sup_argmax = r_lo;
    return out;
  }
  const GridDenominators grid = build_grid(model, k, r_lo, r_hi);

  // candidate design radii never include r0 = 0 (unbounded bias) and stay
  // finite; the golden section runs on log r0
  const double lo = std::log(std::max(r_lo, 1e-3));
  const double hi = std::log(std::isinf(r_hi) ? 1e3 : r_hi);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  auto sup_at = [&](double t) { return inner_sup(grid, model, k, std::exp(t)).sup; };
  double f1 = sup_at(x1), f2 = sup_at(x2);
  while (b - a > 1e-6) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = sup_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = sup_at(x2);
    }
  }
  out.r_star = std::exp(0.5 * (a + b));
  const SupResult fin = inner_sup(grid, model, k, out.r_star);
  out.inefficiency = fin.sup - 1.0;
  out.inner_sup_argmax = fin.argmax;
  out.interior_sup_warning = fin.interior;
  return out;
}

RadiusMinimaxResult minimax_radius_unknown(RiskModel model, int k) {
  return least_favorable_radius(model, k, 0.0, kInf);
}

}  // namespace robicurve
