#include "robicurve/risk.hpp"

#include <cmath>

#include "robicurve/dist_kernel.hpp"

namespace robicurve {

double max_mse(const InfluenceCurve& ic, double r) {
  if (r < 0.0) throw ConfigError("max_mse: r >= 0 required");
  if (r == 0.0) return ic.variance;
  if (std::isinf(ic.bias)) return kInf;
  if (std::isinf(r)) return kInf;
  return ic.variance + r * r * ic.bias * ic.bias;
}

double max_var_huber(const HuberPsi& psi, double s) {
  if (s < 0.0 || s >= 1.0) throw ConfigError("max_var_huber: s in [0,1) required");
  const double m = psi.m;
  if (m == 0.0) {
    // median limit m -> 0: E min(u^2, m^2)/m^2 -> 1 and the clip term s m^2/m^2
    // is s, so the numerator tends to m^2; "E psi'" has mass 2 phi(0) m.
    const double d = (1.0 - s) * 2.0 * phi(0.0);
    return 1.0 / (d * d);  // = pi/(2 (1-s)^2)
  }
  const double epsi2 = is_unbounded(m) ? 1.0 : normal_min_sq(m);
  const double m2 = is_unbounded(m) ? (s > 0.0 ? kInf : 0.0) : m * m;
  const double dpsi = is_unbounded(m) ? 1.0 : (2.0 * Phi(m) - 1.0);
  const double den = (1.0 - s) * dpsi;
  if (std::isinf(m2)) return s > 0.0 ? kInf : epsi2 / (den * den);
  return ((1.0 - s) * epsi2 + s * m2) / (den * den);
}

InfluenceCurve solve_for(RiskModel model, int k, double r) {
  switch (model) {
    case RiskModel::Location1: return solve_location(1, r);
    case RiskModel::LocationK: return solve_location(k, r);
    case RiskModel::ScaleC: return solve_scale_c(r);
    case RiskModel::ScaleV: return solve_scale_v(r);
  }
  throw ConfigError("unknown risk model");
}

double rel_mse(RiskModel model, int k, double r0, double r) {
  const InfluenceCurve ic0 = solve_for(model, k, r0);
  if (std::isinf(r)) {
    // limit of the ratio: squared bias over squared minimal bias
    const InfluenceCurve opt = solve_for(model, k, kInf);
    if (std::isinf(ic0.bias)) return kInf;
    return (ic0.bias * ic0.bias) / (opt.bias * opt.bias);
  }
  const InfluenceCurve opt = solve_for(model, k, r);
  const double num = max_mse(ic0, r);
  const double den = max_mse(opt, r);
  return num / den;
}

double rel_var(double s0, double s) {
  const HuberPsi psi0 = solve_huber(s0);
  const HuberPsi psis = solve_huber(s);
  return max_var_huber(psi0, s) / max_var_huber(psis, s);
}

double coincidence_map(double r) {
  if (r < 0.0) throw ConfigError("coincidence_map: r >= 0 required");
  if (std::isinf(r)) return 1.0;
  return r * r / (1.0 + r * r);
}

double coincidence_map_inverse(double s) {
  if (s < 0.0 || s > 1.0) throw ConfigError("coincidence_map_inverse: s in [0,1] required");
  if (s == 1.0) return kInf;
  return std::sqrt(s / (1.0 - s));
}

RiskReport risk_table(RiskModel model, int k, const std::vector<double>& r0_grid,
                      const std::vector<double>& r_grid) {
  RiskReport rep;
  switch (model) {
    case RiskModel::Location1: rep.model = "location-1d"; break;
    case RiskModel::LocationK: rep.model = "location-" + std::to_string(k) + "d"; break;
    case RiskModel::ScaleC: rep.model = "scale"; break;
    case RiskModel::ScaleV: rep.model = "scale"; break;
  }
  rep.kind = (model == RiskModel::ScaleV) ? "v" : "c";
  for (double r0 : r0_grid) {
    const InfluenceCurve ic0 = solve_for(model, k, r0);
    for (double r : r_grid) {
      RiskPoint p;
      p.r0 = r0;
      p.r = r;
      p.max_mse = max_mse(ic0, r);
      p.rel_mse = rel_mse(model, k, r0, r);
      rep.rows.push_back(p);
    }
  }
  return rep;
}

}  // namespace robicurve
