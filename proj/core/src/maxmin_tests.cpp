#include "robicurve/maxmin_tests.hpp"

#include <algorithm>
#include <cmath>

#include "robicurve/dist_kernel.hpp"
#include "robicurve/ic_solver.hpp"
#include "robicurve/quadrature.hpp"

namespace robicurve {
namespace {

double clampd(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

std::vector<double> level_kinks(const ScoreVector& s, double t) {
  if (s.coord_level_set && std::isfinite(t)) return s.coord_level_set(t);
  return {};
}

double upper_excess(const ScoreVector& s, double t) {
  if (!std::isfinite(t)) return t > 0.0 ? 0.0 : kInf;
  auto f = s.coord_score;
  return normal_expectation([&](double u) { return std::max(f(u) - t, 0.0); }, 1e-13,
                            level_kinks(s, t));
}

double lower_excess(const ScoreVector& s, double t) {
  if (!std::isfinite(t)) return t > 0.0 ? kInf : 0.0;
  auto f = s.coord_score;
  return normal_expectation([&](double u) { return std::max(t - f(u), 0.0); }, 1e-13,
                            level_kinks(s, t));
}

double inner(const std::function<double(double)>& f, const std::function<double(double)>& g,
             const std::vector<double>& kinks) {
  return normal_expectation([&](double u) { return f(u) * g(u); }, 1e-12, kinks);
}

bool is_linear_score(const ScoreVector& s) {
  for (double u : {-3.3, 0.7, 2.9})
    if (std::abs(s.coord_score(u) - u) > 1e-13) return false;
  return true;
}

void check_plan_inputs(double tau, double r0, double r1, double alpha) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("test plan: tau > 0 required");
  if (!(r0 >= 0.0) || !(r1 >= 0.0) || !std::isfinite(r0) || !std::isfinite(r1))
    throw ConfigError("test plan: r0, r1 >= 0 required");
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("test plan: alpha in (0,1) required");
}

// third partial moment of phi: antiderivative of u^3 phi is -(u^2 + 2) phi
double nm3(double a, double b) {
  auto p = [](double u) { return std::isinf(u) ? 0.0 : (u * u + 2.0) * phi(u); };
  return p(a) - p(b);
}

}  // namespace

double PiecewiseLinear::operator()(double u) const {
  size_t i = 0;
  while (i < knots.size() && u > knots[i]) ++i;
  return segs[i][0] + segs[i][1] * u;
}

TestPlan simple_test_plan(const Tangent& g0, const Tangent& g1, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("test plan: alpha in (0,1) required");
  TestPlan plan;
  plan.kind = TestPlan::Kind::simple;
  plan.alpha = alpha;
  plan.u_alpha = Phi_inv(1.0 - alpha);
  auto f0 = g0.f, f1 = g1.f;
  auto g10 = [f0, f1](double u) { return f1(u) - f0(u); };
  std::vector<double> kinks = g0.kinks;
  kinks.insert(kinks.end(), g1.kinks.begin(), g1.kinks.end());
  const double norm2 = inner(g10, g10, kinks);
  if (!(norm2 > 1e-24)) throw DegenerateTangents("simple_test_plan: g1 = g0 in L2(P)");
  plan.clipped_norm = std::sqrt(norm2);
  plan.statistic_score = g10;
  plan.q0 = f0;
  plan.q1 = f1;
  plan.critical_value = plan.clipped_norm * plan.u_alpha + inner(g10, f0, kinks);
  plan.asymptotic_power = Phi(-plan.u_alpha + plan.clipped_norm);
  return plan;
}

TestPlan hellinger_test_plan(double tau, double r0, double r1, double alpha,
                             const ScoreVector& scores) {
  check_plan_inputs(tau, r0, r1, alpha);
  TestPlan plan;
  plan.kind = TestPlan::Kind::h;
  plan.tau = tau;
  plan.r0 = r0;
  plan.r1 = r1;
  plan.alpha = alpha;
  plan.u_alpha = Phi_inv(1.0 - alpha);

  const double norm = scores.norm();
  const double rbar = r0 + r1;
  if (!(std::sqrt(8.0) * rbar < tau * norm))
    throw RadiusTooLarge("hellinger_test_plan: sqrt(8)(r0 + r1) < tau ||Lambda|| required");
  plan.gamma = std::sqrt(8.0) / norm;
  const double gamma = plan.gamma;
  auto lam = scores.coord_score;
  plan.q0 = [lam, r0, gamma](double u) { return r0 * gamma * lam(u); };
  plan.q1 = [lam, tau, r1, gamma](double u) { return (tau - r1 * gamma) * lam(u); };
  plan.statistic_score = [lam, norm](double u) { return lam(u) / norm; };
  plan.clipped_norm = 1.0;
  plan.critical_value = plan.u_alpha + std::sqrt(8.0) * r0;
  plan.asymptotic_power = Phi(-plan.u_alpha + tau * norm - std::sqrt(8.0) * rbar);

  if (is_linear_score(scores)) {
    plan.linear_scores = true;
    plan.q0_pl = {{}, {{0.0, r0 * gamma}}};
    plan.q1_pl = {{}, {{0.0, tau - r1 * gamma}}};
  }
  return plan;
}

TestPlan tv_test_plan(double tau, double r0, double r1, double alpha, const ScoreVector& scores) {
  check_plan_inputs(tau, r0, r1, alpha);
  TestPlan plan;
  plan.kind = TestPlan::Kind::v;
  plan.tau = tau;
  plan.r0 = r0;
  plan.r1 = r1;
  plan.alpha = alpha;
  plan.u_alpha = Phi_inv(1.0 - alpha);

  const double rbar = r0 + r1;
  auto lam = scores.coord_score;
  if (rbar > 0.0) {
    const double mean_abs = upper_excess(scores, 0.0) + lower_excess(scores, 0.0);
    if (!(2.0 * rbar < tau * mean_abs))
      throw RadiusTooLarge("tv_test_plan: 2(r0 + r1) < tau E|Lambda| required");
    plan.clip_hi = bisect_increasing(
        [&](double t) { return rbar - tau * upper_excess(scores, t); }, -8.0, 8.0);
    const double floor = std::isfinite(scores.coord_inf) ? scores.coord_inf + 1e-12 : -8.0;
    plan.clip_lo = bisect_increasing(
        [&](double t) { return tau * lower_excess(scores, t) - rbar; }, floor, 8.0);
  }
  const double lo = plan.clip_lo, hi = plan.clip_hi;
  plan.statistic_score = [lam, lo, hi](double u) { return clampd(lam(u), lo, hi); };
  std::vector<double> kinks = level_kinks(scores, lo);
  for (double p : level_kinks(scores, hi)) kinks.push_back(p);
  plan.clipped_norm = std::sqrt(inner(plan.statistic_score, plan.statistic_score, kinks));
  // r g_tilde = tau (Lambda - v'')_+ - tau (v' - Lambda)_+
  auto gtilde = [lam, lo, hi, tau, rbar](double u) {
    if (rbar == 0.0) return 0.0;
    return tau / rbar * (std::max(lam(u) - hi, 0.0) - std::max(lo - lam(u), 0.0));
  };
  plan.q0 = [gtilde, r0](double u) { return r0 * gtilde(u); };
  plan.q1 = [gtilde, lam, tau, r1](double u) { return tau * lam(u) - r1 * gtilde(u); };
  plan.critical_value =
      plan.clipped_norm * plan.u_alpha + (rbar > 0.0 ? r0 * (hi - lo) : 0.0);
  plan.asymptotic_power = Phi(-plan.u_alpha + tau * plan.clipped_norm);

  if (is_linear_score(scores)) {
    plan.linear_scores = true;
    if (rbar == 0.0) {
      plan.q0_pl = {{}, {{0.0, 0.0}}};
      plan.q1_pl = {{}, {{0.0, tau}}};
    } else {
      const double s = tau / rbar;  // slope of g_tilde outside the clip band
      plan.q0_pl = {{lo, hi},
                    {{-r0 * s * lo, r0 * s}, {0.0, 0.0}, {-r0 * s * hi, r0 * s}}};
      plan.q1_pl = {{lo, hi},
                    {{r1 * s * lo, tau - r1 * s}, {0.0, tau}, {r1 * s * hi, tau - r1 * s}}};
    }
  }
  return plan;
}

TestPlan contamination_test_plan(double tau, double r0, double r1, double alpha,
                                 const ScoreVector& scores) {
  check_plan_inputs(tau, r0, r1, alpha);
  TestPlan plan;
  plan.kind = TestPlan::Kind::c;
  plan.tau = tau;
  plan.r0 = r0;
  plan.r1 = r1;
  plan.alpha = alpha;
  plan.u_alpha = Phi_inv(1.0 - alpha);
  plan.z = (r1 - r0) / tau;

  auto lam = scores.coord_score;
  if (!(r0 < tau * upper_excess(scores, plan.z)))
    throw RadiusTooLarge("contamination_test_plan: r0 < E(tau Lambda - (r1 - r0))_+ required");
  if (r0 > 0.0) {
    // E q0 = tau E(Lambda - c'')_+ - r0 = 0
    plan.clip_hi = bisect_increasing(
        [&](double t) { return r0 - tau * upper_excess(scores, t); }, -8.0, 8.0);
  }
  if (r1 > 0.0) {
    // E q1 = tau E(c' - Lambda)_+ - r1 = 0
    const double floor = std::isfinite(scores.coord_inf) ? scores.coord_inf + 1e-12 : -8.0;
    plan.clip_lo = bisect_increasing(
        [&](double t) { return tau * lower_excess(scores, t) - r1; }, floor, 8.0);
  }
  const double lo = plan.clip_lo, hi = plan.clip_hi, z = plan.z;
  if (!(lo < z && z < hi))
    throw RadiusTooLarge("contamination_test_plan: c' < (r1 - r0)/tau < c'' violated");
  plan.statistic_score = [lam, lo, hi, z](double u) { return clampd(lam(u), lo, hi) - z; };
  std::vector<double> kinks = level_kinks(scores, lo);
  for (double p : level_kinks(scores, hi)) kinks.push_back(p);
  plan.clipped_norm = std::sqrt(inner(plan.statistic_score, plan.statistic_score, kinks));
  plan.q0 = [lam, hi, tau, r0](double u) { return tau * std::max(lam(u) - hi, 0.0) - r0; };
  plan.q1 = [lam, lo, tau, r1](double u) {
    return tau * lam(u) + tau * std::max(lo - lam(u), 0.0) - r1;
  };
  plan.critical_value = plan.clipped_norm * plan.u_alpha + r0 * (hi - z);
  plan.asymptotic_power = Phi(-plan.u_alpha + tau * plan.clipped_norm);

  if (is_linear_score(scores)) {
    plan.linear_scores = true;
    if (std::isfinite(hi))
      plan.q0_pl = {{hi}, {{-r0, 0.0}, {-r0 - tau * hi, tau}}};
    else
      plan.q0_pl = {{}, {{0.0, 0.0}}};
    if (std::isfinite(lo))
      plan.q1_pl = {{lo}, {{tau * lo - r1, 0.0}, {-r1, tau}}};
    else
      plan.q1_pl = {{}, {{0.0, tau}}};
  }
  return plan;
}

TestOutcome evaluate_test(const TestPlan& plan, const std::vector<double>& sample) {
  if (sample.empty()) throw EmptySample("evaluate_test: n >= 1 required");
  TestOutcome out;
  out.n = static_cast<int>(sample.size());
  double sum = 0.0;
  for (double x : sample) sum += plan.statistic_score(x);
  out.statistic = sum / std::sqrt(static_cast<double>(out.n));
  out.reject = out.statistic > plan.critical_value;
  return out;
}

SqrtDensitySampler::SqrtDensitySampler(const PiecewiseLinear& g, double s_n) {
  if (!(s_n >= 0.0) || !std::isfinite(s_n))
    throw ConfigError("SqrtDensitySampler: 0 <= s_n < inf required");
  // truncate at +-40: the remaining mass of (A + B u)^2 phi is below 1e-300
  std::vector<double> bounds{-40.0};
  for (double kx : g.knots)
    if (kx > -40.0 && kx < 40.0) bounds.push_back(kx);
  bounds.push_back(40.0);

  double g_norm2 = 0.0, g_mean = 0.0;
  for (size_t i = 0; i + 1 < bounds.size(); ++i) {
    const auto& seg = g.segs[i];
    const double a = bounds[i], b = bounds[i + 1];
    g_norm2 += seg[0] * seg[0] * nm0(a, b) + 2.0 * seg[0] * seg[1] * nm1(a, b) +
               seg[1] * seg[1] * nm2(a, b);
    g_mean += seg[0] * nm0(a, b) + seg[1] * nm1(a, b);
  }
  if (std::abs(g_mean) > 1e-8)
    throw ConfigError("SqrtDensitySampler: tangent must have mean zero");
  const double q = 0.25 * s_n * s_n * g_norm2;
  if (!(q < 1.0)) throw ConfigError("SqrtDensitySampler: s_n ||g|| / 2 < 1 required");
  const double K = std::sqrt(1.0 - q);

  double cum = 0.0;
  for (size_t i = 0; i + 1 < bounds.size(); ++i) {
    Piece p;
    p.lo = bounds[i];
    p.hi = bounds[i + 1];
    p.a = K + 0.5 * s_n * g.segs[i][0];
    p.b = 0.5 * s_n * g.segs[i][1];
    p.mass = p.a * p.a * nm0(p.lo, p.hi) + 2.0 * p.a * p.b * nm1(p.lo, p.hi) +
             p.b * p.b * nm2(p.lo, p.hi);
    cum += p.mass;
    p.cum = cum;
    pieces_.push_back(p);
  }
  // normalize away the (tiny) truncation drift
  total_ = cum;
  for (Piece& p : pieces_) {
    p.mass /= total_;
    p.cum /= total_;
  }

  // inverse-CDF table over the central range, built by warm-started Newton
  const int n_table = 65537;
  table_.resize(n_table);
  dp_ = (p_hi_ - p_lo_) / (n_table - 1);
  double u = invert(p_lo_);
  for (int i = 0; i < n_table; ++i) {
    const double p = p_lo_ + i * dp_;
    bool ok = false;
    for (int it = 0; it < 12; ++it) {
      const double err = cdf(u) - p;
      if (std::abs(err) < 1e-13) {
        ok = true;
        break;
      }
      const Piece& pc = *std::upper_bound(
          pieces_.begin(), pieces_.end() - 1, u,
          [](double x, const Piece& q2) { return x < q2.hi; });
      const double t = pc.a + pc.b * u;
      const double dens = t * t * phi(u) / total_;
      if (!(dens > 1e-300)) break;
      u -= err / dens;
    }
    if (!ok) u = invert(p);
    table_[i] = u;
  }
}

double SqrtDensitySampler::cdf(double u) const {
  if (u <= pieces_.front().lo) return 0.0;
  if (u >= pieces_.back().hi) return 1.0;
  double below = 0.0;
  for (const Piece& p : pieces_) {
    if (u > p.hi) {
      below = p.cum;
      continue;
    }
    const double part = p.a * p.a * nm0(p.lo, u) + 2.0 * p.a * p.b * nm1(p.lo, u) +
                        p.b * p.b * nm2(p.lo, u);
    return below + part / total_;
  }
  return 1.0;
}

double SqrtDensitySampler::invert(double p) const {
  double lo = pieces_.front().lo, hi = pieces_.back().hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo < 1e-14 * (1.0 + std::abs(mid))) return mid;
    if (cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double SqrtDensitySampler::draw(double p) const {
  if (!(p > 0.0) || !(p < 1.0)) throw ConfigError("SqrtDensitySampler::draw: p in (0,1)");
  if (p >= p_lo_ && p <= p_hi_) {
    const double x = (p - p_lo_) / dp_;
    const size_t i = std::min(static_cast<size_t>(x), table_.size() - 2);
    const double w = x - static_cast<double>(i);
    return table_[i] * (1.0 - w) + table_[i + 1] * w;
  }
  return invert(p);
}

double SqrtDensitySampler::mean() const {
  double m = 0.0;
  for (const Piece& p : pieces_) {
    m += p.a * p.a * nm1(p.lo, p.hi) + 2.0 * p.a * p.b * nm2(p.lo, p.hi) +
         p.b * p.b * nm3(p.lo, p.hi);
  }
  return m / total_;
}

}  // namespace robicurve
