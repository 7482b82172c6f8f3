#include "robicurve/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "robicurve/dist_kernel.hpp"
#include "robicurve/estimators.hpp"
#include "robicurve/ic_solver.hpp"
#include "robicurve/maxmin_tests.hpp"
#include "robicurve/models.hpp"
#include "robicurve/quadrature.hpp"
#include "robicurve/radius_minimax.hpp"
#include "robicurve/risk.hpp"
#include "robicurve/sp_projection.hpp"

namespace robicurve {
namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// Accumulates sub-checks; the criterion passes iff all of them do.
struct Checker {
  bool pass = true;
  std::ostringstream detail;
  int shown = 0;

  void note(const std::string& s) {
    if (shown++) detail << "; ";
    detail << s;
  }
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note("FAIL " + what);
    }
  }
  void check_close(double got, double want, double tol, const std::string& what) {
    check(std::abs(got - want) <= tol, what + " got " + fmt(got) + " want " + fmt(want));
  }
  CriterionResult result(int id, const std::string& name) {
    return {id, name, pass, detail.str()};
  }
};

// ---- 1: minimal-bias constants -----------------------------------------

CriterionResult c01() {
  Checker ck;
  const double b1 = solve_location(1, kInf).bias;
  ck.check_close(b1, std::sqrt(M_PI / 2.0), 1e-6, "location k=1 b_min");
  for (int k : {2, 3, 5}) {
    const double want = k * std::tgamma(k / 2.0) / (std::sqrt(2.0) * std::tgamma((k + 1) / 2.0));
    ck.check_close(solve_location(k, kInf).bias, want, 1e-6,
                   "location k=" + std::to_string(k) + " b_min");
  }
  const InfluenceCurve sc = solve_scale_c(kInf);
  ck.check_close(sc.center, Phi_inv(0.75), 1e-4, "scale-c alpha_inf");
  ck.check_close(sc.bias, 1.166, 1e-3, "scale-c b_min");
  ck.check_close(solve_scale_v(kInf).bias, std::sqrt(M_PI * M_E / 2.0), 1e-3,
                 "scale-v omega_min");
  ck.note("b_min(1)=" + fmt(b1) + " alpha_inf=" + fmt(sc.center));
  return ck.result(1, "minimal-bias constants");
}

// ---- 2: Huber coincidence ------------------------------------------------

CriterionResult c02() {
  Checker ck;
  double worst = 0.0;
  // maxMSE(eta_{r0}, r) = (1 - s) maxVar(psi_{s0}, s); the fixed second design
  // radius exercises the r0 != r case
  for (double r0_mode : {-1.0, 0.7}) {
    for (int i = 0; i < 20; ++i) {
      const double r = 0.05 * std::pow(100.0, i / 19.0);
      const double r0 = r0_mode < 0.0 ? r : r0_mode;
      const double s = r * r / (1.0 + r * r);
      const double s0 = r0 * r0 / (1.0 + r0 * r0);
      const InfluenceCurve eta = solve_location(1, r0);
      const HuberPsi psi = solve_huber(s0);
      const double lhs = max_mse(eta, r);
      const double rhs = (1.0 - s) * max_var_huber(psi, s);
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
  }
  ck.check(worst <= 1e-8, "relative identity error " + fmt(worst) + " > 1e-8");
  ck.note("worst rel err " + fmt(worst));
  return ck.result(2, "Huber coincidence identity");
}

// ---- 3: scale-c regime switch --------------------------------------------

CriterionResult c03() {
  Checker ck;
  double lo = 0.85, hi = 1.0;
  const bool at_lo = solve_scale_c(lo).lower_clipping_active;
  ck.check(at_lo != solve_scale_c(hi).lower_clipping_active,
           "no regime change on [0.85, 1.0]");
  if (ck.pass) {
    for (int i = 0; i < 30; ++i) {
      const double mid = 0.5 * (lo + hi);
      (solve_scale_c(mid).lower_clipping_active == at_lo ? lo : hi) = mid;
    }
    const double r_switch = 0.5 * (lo + hi);
    ck.check_close(r_switch, 0.92, 0.01, "switch radius");
    ck.note("switch at r=" + fmt(r_switch));
  }
  return ck.result(3, "scale-c lower clipping regime switch");
}

// ---- 4: radius-minimax inefficiency --------------------------------------

CriterionResult c04() {
  Checker ck;
  const struct {
    RiskModel model;
    const char* name;
  } models[] = {{RiskModel::Location1, "location"},
                {RiskModel::ScaleC, "scale-c"},
                {RiskModel::ScaleV, "scale-v"}};
  for (const auto& m : models) {
    double worst = 0.0;
    for (double r : {0.1, 0.25, 0.5, 1.0, 2.0}) {
      const auto res = least_favorable_radius(m.model, 1, r / 3.0, 3.0 * r);
      worst = std::max(worst, res.inefficiency);
      ck.check(res.inefficiency <= 0.125 + 1e-3,
               std::string(m.name) + " r=" + fmt(r) + " ineff " + fmt(res.inefficiency));
    }
    ck.note(std::string(m.name) + " worst " + fmt(worst));
  }
  return ck.result(4, "radius-minimax inefficiency over [r/3, 3r]");
}

// ---- 5: high-dimension location limits -----------------------------------

CriterionResult c05() {
  Checker ck;
  const InfluenceCurve mb = solve_location(200, kInf);
  const double bias_ratio = mb.bias / std::sqrt(200.0);
  const double var_ratio = mb.variance / 200.0;
  ck.check(bias_ratio >= 0.99 && bias_ratio <= 1.01, "b_min/sqrt(k) " + fmt(bias_ratio));
  ck.check(var_ratio >= 0.97 && var_ratio <= 1.03, "E|eta|^2/k " + fmt(var_ratio));

  const auto rm = least_favorable_radius(RiskModel::LocationK, 50, 0.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i <= 24; ++i) {
    const double r = 3.0 * i / 24.0;
    worst = std::max(worst, std::abs(rel_mse(RiskModel::LocationK, 50, rm.r_star, r) - 1.0));
  }
  ck.check(worst <= 0.05, "k=50 relMSE flatness " + fmt(worst));
  ck.note("bias/sqrt(k)=" + fmt(bias_ratio) + " var/k=" + fmt(var_ratio) +
          " k=50 max |relMSE-1|=" + fmt(worst));
  return ck.result(5, "high-dimension location limits");
}

// ---- 6: regression coincidences ------------------------------------------

CriterionResult c06() {
  Checker ck;
  const RegressorDist sn = RegressorDist::standard_normal(1);
  double worst2 = 0.0;
  for (double r : {0.05, 0.1, 0.3, 0.7, 1.5, 3.0}) {
    const InfluenceCurve reg = solve_regression_c1(r, sn, 2);
    const InfluenceCurve loc = solve_location(1, r);
    worst2 = std::max({worst2, rel_err(reg.A, loc.A), rel_err(reg.clip_upper, loc.clip_upper)});
  }
  ck.check(worst2 <= 1e-8, "alpha=2 constants vs location, err " + fmt(worst2));

  const RegressorDist unit = RegressorDist::discrete({1.0}, {1.0});
  double worst1 = 0.0;
  for (double r : {0.1, 0.5, 1.2}) {
    const InfluenceCurve reg = solve_regression_c1(r, unit, 1);
    const InfluenceCurve loc = solve_location(1, r);
    worst1 = std::max({worst1, std::abs(reg.A - loc.A), std::abs(reg.bias - loc.bias),
                       std::abs(reg.variance - loc.variance)});
  }
  ck.check(worst1 <= 1e-10, "degenerate-design reduction, err " + fmt(worst1));
  ck.note("alpha=2 err " + fmt(worst2) + ", |x|=1 err " + fmt(worst1));
  return ck.result(6, "regression/location coincidences");
}

// ---- 7: TV equivalence radius --------------------------------------------

CriterionResult c07() {
  Checker ck;
  const double r_max = phi(0.0);
  double min_ratio = kInf;
  for (int i = 1; i <= 50; ++i) {
    const double r = r_max * i / 51.0;
    min_ratio = std::min(min_ratio, tv_equiv_radius(r) / r);
  }
  ck.check(min_ratio >= 2.2, "min ratio " + fmt(min_ratio));

  const double lo_ratio = tv_equiv_radius(0.01 * r_max) / (0.01 * r_max);
  const double hi_ratio = tv_equiv_radius(0.99 * r_max) / (0.99 * r_max);
  ck.check(lo_ratio > 10.0, "1%-endpoint ratio " + fmt(lo_ratio) + " (not > 10)");
  ck.check(hi_ratio > 10.0, "99%-endpoint ratio " + fmt(hi_ratio));

  const auto sv = scores(ModelSpec::location(1));
  double worst = 0.0;
  for (double r : {0.05, 0.15, 0.3}) {
    const auto proj = project_ball(sv, NeighborhoodSpec::Kind::v, r);
    const auto ric = robust_ic_v(sv, tv_equiv_radius(r));
    for (int i = 0; i < 200; ++i) {
      const double u = -5.0 + 10.0 * i / 199.0;
      worst = std::max(worst, std::abs(proj.sp_ic(0, u) - ric.eval(0, u)));
    }
  }
  ck.check(worst <= 1e-8, "sp-IC vs robust IC pointwise err " + fmt(worst));
  ck.note("min ratio " + fmt(min_ratio) + ", endpoints " + fmt(lo_ratio) + "/" + fmt(hi_ratio) +
          ", pointwise err " + fmt(worst));
  return ck.result(7, "TV equivalence radius");
}

// ---- 8: cone projection ----------------------------------------------------

CriterionResult c08() {
  Checker ck;
  ConeGenerator kappa{[](double x) { return x; }, {}};
  ConeGenerator g1{[](double x) { return x > 0.0 ? 1.0 : -1.0; }, {0.0}};
  double best = kInf, best_a = 0.0;
  for (double a = 0.5; a <= 1.6 + 1e-12; a += 0.0025) {
    const double mu = 1.0 / std::sqrt(2.0 * Phi(a) - 1.0);
    ConeGenerator g2{[mu, a](double x) {
                       return std::abs(x) <= a ? (x > 0.0 ? mu : -mu) : 0.0;
                     },
                     {-a, 0.0, a}};
    const auto pr = cone_project(kappa, {g1, g2});
    const double ratio = pr.norm_hat / pr.norm_bar;
    if (ratio < best) {
      best = ratio;
      best_a = a;
    }
  }
  ck.check(std::abs(best - 0.85) <= 0.01, "min ratio " + fmt(best));
  ck.note("min ratio " + fmt(best) + " at a=" + fmt(best_a));
  return ck.result(8, "cone projection minimized norm ratio");
}

// ---- 9: ball-projection ICs ------------------------------------------------

CriterionResult c09() {
  Checker ck;
  const auto loc = scores(ModelSpec::location(1));
  const auto sc = scores(ModelSpec::scale());
  double worst = 0.0;
  // 8 r^2 < min I_jj: the h-projected IC is the classical one exactly
  for (double r : {0.05, 0.2, 0.33}) {
    const auto pr = project_ball(loc, NeighborhoodSpec::Kind::h, r);
    for (int i = 0; i < 101; ++i) {
      const double u = -4.0 + 8.0 * i / 100.0;
      worst = std::max(worst, std::abs(pr.sp_ic(0, u) - u));
    }
  }
  for (double r : {0.1, 0.4}) {  // I = 2 for scale
    const auto pr = project_ball(sc, NeighborhoodSpec::Kind::h, r);
    for (int i = 0; i < 101; ++i) {
      const double u = -4.0 + 8.0 * i / 100.0;
      worst = std::max(worst, std::abs(pr.sp_ic(0, u) - 0.5 * (u * u - 1.0)));
    }
  }
  ck.check(worst <= 1e-12, "h sp-IC vs classical, err " + fmt(worst));

  const auto pc = project_ball(loc, NeighborhoodSpec::Kind::c, 0.5);
  ck.check(pc.unbounded_sp_ic, "contamination sp-IC not flagged unbounded");
  double sup = 0.0;
  for (double u = -10.0; sup <= 1e3 && u >= -1e7; u *= 2.0)
    sup = std::max(sup, std::abs(pc.sp_ic(0, u)));
  ck.check(sup > 1e3, "contamination sp-IC sup " + fmt(sup) + " (not > 1e3)");
  ck.note("h err " + fmt(worst) + ", c sup " + fmt(sup));
  return ck.result(9, "ball-projection ICs: classical h, unbounded c");
}

// ---- 10: nonadaptivity ratio -----------------------------------------------

CriterionResult c10() {
  Checker ck;
  const RegressorDist sym = RegressorDist::two_point(1.0, -1.0, 0.5);
  for (double r : {0.3, 1.0})
    ck.check(std::abs(nonadaptivity_ratio(r, sym)) <= 1e-8,
             "symmetric K, r=" + fmt(r));
  const RegressorDist asym = RegressorDist::two_point(2.0, -0.5, 0.2);  // centered
  ck.check(std::abs(nonadaptivity_ratio(0.0, asym)) <= 1e-8, "r=0, asymmetric K");
  const double pos = nonadaptivity_ratio(1.0, asym);
  ck.check(pos > 1e-6, "asymmetric K at r=1 not positive: " + fmt(pos));
  ck.note("asymmetric ratio at r=1: " + fmt(pos));
  return ck.result(10, "nonadaptivity ratio");
}

// ---- 11: maxmin tests Monte Carlo ------------------------------------------

CriterionResult c11(bool full) {
  Checker ck;
  const auto sv = scores(ModelSpec::location(1));
  const int n = full ? 10000 : 2000;
  const int reps = full ? 10000 : 1000;
  const double s_n = 1.0 / std::sqrt(static_cast<double>(n));
  const double tau = 1.0, r0 = 0.1, r1 = 0.1, alpha = 0.05;

  const struct {
    const char* name;
    TestPlan plan;
  } plans[] = {{"h", hellinger_test_plan(tau, r0, r1, alpha, sv)},
               {"v", tv_test_plan(tau, r0, r1, alpha, sv)},
               {"c", contamination_test_plan(tau, r0, r1, alpha, sv)}};

  for (const auto& [name, plan] : plans) {
    // size under the least favorable null P_{n,q0}, power under P_{n,q1}
    const SqrtDensitySampler null_law(plan.q0_pl, s_n);
    const SqrtDensitySampler alt_law(plan.q1_pl, s_n);
    int rej0 = 0, rej1 = 0;
    for (int j = 0; j < reps; ++j) {
      CounterRng rng(991, static_cast<uint64_t>(j));
      double sum0 = 0.0, sum1 = 0.0;
      for (int i = 0; i < n; ++i)
        sum0 += plan.statistic_score(null_law.draw(rng.uniform()));
      for (int i = 0; i < n; ++i)
        sum1 += plan.statistic_score(alt_law.draw(rng.uniform()));
      const double root_n = std::sqrt(static_cast<double>(n));
      if (sum0 / root_n > plan.critical_value) ++rej0;
      if (sum1 / root_n > plan.critical_value) ++rej1;
    }
    const double size = static_cast<double>(rej0) / reps;
    const double power = static_cast<double>(rej1) / reps;
    const double se_size = std::sqrt(alpha * (1.0 - alpha) / reps);
    const double p = plan.asymptotic_power;
    const double se_pow = std::sqrt(p * (1.0 - p) / reps);
    ck.check(std::abs(size - alpha) <= 3.0 * se_size,
             std::string(name) + " size " + fmt(size) + " vs " + fmt(alpha));
    ck.check(std::abs(power - p) <= 3.0 * se_pow,
             std::string(name) + " power " + fmt(power) + " vs " + fmt(p));
    ck.note(std::string(name) + " size " + fmt(size) + " power " + fmt(power) + " (plan " +
            fmt(p) + ")");
  }
  return ck.result(11, "maxmin tests Monte Carlo size and power");
}

// ---- 12: saddle property -----------------------------------------------------

CriterionResult c12() {
  Checker ck;
  const auto sv = scores(ModelSpec::location(1));
  const double tau = 1.0, r0 = 0.12, r1 = 0.08;

  const std::vector<std::function<double(double)>> basis = {
      [](double u) { return std::sin(u); },
      [](double u) { return std::cos(u) - std::exp(-0.5); },
      [](double u) { return std::sin(2.0 * u); },
      [](double u) { return std::cos(3.0 * u) - std::exp(-4.5); },
      [](double u) { return std::tanh(u); }};
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> frac(0.2, 1.0);

  auto draw_in_ball = [&](NeighborhoodSpec::Kind kind, double radius) {
    std::vector<double> c(basis.size());
    for (double& v : c) v = coef(rng);
    auto g = [&basis, c](double u) {
      double s = 0.0;
      for (size_t i = 0; i < basis.size(); ++i) s += c[i] * basis[i](u);
      return s;
    };
    double scale = 0.0;
    const double f = frac(rng);
    if (kind == NeighborhoodSpec::Kind::h) {
      const double norm = std::sqrt(normal_expectation([&](double u) { return g(u) * g(u); }));
      scale = std::sqrt(8.0) * radius * f / norm;
    } else if (kind == NeighborhoodSpec::Kind::v) {
      const double mabs = normal_expectation([&](double u) { return std::abs(g(u)); });
      scale = 2.0 * radius * f / mabs;
    } else {
      double gmin = kInf;
      for (double u = -10.0; u <= 10.0; u += 0.01) gmin = std::min(gmin, g(u));
      scale = radius * f / std::abs(gmin);  // keeps g >= -radius
    }
    return std::function<double(double)>(
        [g, scale](double u) { return scale * g(u); });
  };

  const struct {
    const char* name;
    NeighborhoodSpec::Kind kind;
    TestPlan plan;
  } balls[] = {
      {"h", NeighborhoodSpec::Kind::h, hellinger_test_plan(tau, r0, r1, 0.05, sv)},
      {"v", NeighborhoodSpec::Kind::v, tv_test_plan(tau, r0, r1, 0.05, sv)},
      {"c", NeighborhoodSpec::Kind::c, contamination_test_plan(tau, r0, r1, 0.05, sv)}};

  for (const auto& b : balls) {
    std::vector<double> kinks;
    for (double t : {b.plan.clip_lo, b.plan.clip_hi, b.plan.z})
      if (std::isfinite(t)) kinks.push_back(t);
    const double q10 = std::sqrt(normal_expectation(
        [&](double u) {
          const double d = b.plan.q1(u) - b.plan.q0(u);
          return d * d;
        },
        1e-11, kinks));
    double min_excess = kInf;
    for (int trial = 0; trial < 200; ++trial) {
      const auto h0 = draw_in_ball(b.kind, r0);
      const auto h1 = draw_in_ball(b.kind, r1);
      const double g10 = std::sqrt(normal_expectation([&](double u) {
        const double d = tau * u + h1(u) - h0(u);
        return d * d;
      }));
      min_excess = std::min(min_excess, g10 - q10);
      if (q10 > g10 + 1e-8) {
        ck.check(false, std::string(b.name) + " trial " + std::to_string(trial) + " ||q10|| " +
                            fmt(q10) + " > ||g10|| " + fmt(g10));
        break;
      }
    }
    ck.note(std::string(b.name) + " ||q10|| " + fmt(q10) + ", min ||g10||-||q10|| " +
            fmt(min_excess));
  }
  return ck.result(12, "saddle property of least-favorable pairs");
}

// ---- 13: closed forms vs quadrature oracles ---------------------------------

double quad_piece(const std::function<double(double)>& f, double a, double b) {
  return normal_expectation(
      [&, a, b](double u) { return (u > a && u < b) ? f(u) : 0.0; }, 1e-12, {a, b});
}

CriterionResult c13() {
  Checker ck;
  double worst_m = 0.0;
  for (int i = 0; i < 12; ++i) {
    const double c = 1e-2 * std::pow(1e3, i / 11.0);  // log-spaced in [0.01, 10]
    auto u0 = [](double) { return 1.0; };
    auto u1 = [](double u) { return u; };
    auto u2 = [](double u) { return u * u; };
    auto u4 = [](double u) { return u * u * u * u; };
    worst_m = std::max({worst_m,
                        std::abs(nm0(-c, c) - quad_piece(u0, -c, c)),
                        std::abs(nm1(0.2 * c, c) - quad_piece(u1, 0.2 * c, c)),
                        std::abs(nm2(-c, c) - quad_piece(u2, -c, c)),
                        std::abs(nm4(c, kInf) - quad_piece(u4, c, kInf))});
    worst_m = std::max({worst_m,
                        std::abs(clipped_abs_moment(c) -
                                 normal_expectation(
                                     [c](double u) { return std::max(std::abs(u) - c, 0.0); },
                                     1e-12, {-c, c})),
                        std::abs(clipped_second_moment(c) -
                                 normal_expectation(
                                     [c](double u) {
                                       return u * u * std::min(1.0, c / std::abs(u));
                                     },
                                     1e-12, {-c, c})),
                        std::abs(normal_min_sq(c) -
                                 normal_expectation(
                                     [c](double u) { return std::min(u * u, c * c); },
                                     1e-12, {-c, c}))});
    for (int k : {1, 3}) {
      worst_m = std::max({worst_m,
                          std::abs(chi_clipped_abs(k, c) -
                                   chi_expectation(
                                       k, [c](double x) { return std::max(x - c, 0.0); },
                                       1e-12, {c})),
                          std::abs(chi_min_sq(k, c) -
                                   chi_expectation(
                                       k, [c](double x) { return std::min(x * x, c * c); },
                                       1e-12, {c}))});
    }
    const double a = 1.2;
    const auto sm = scale_clipped_moments(a, c);
    std::vector<double> kk{std::sqrt(a * a + c)};
    if (a * a > c) kk.push_back(std::sqrt(a * a - c));
    std::vector<double> kinks;
    for (double v : kk) {
      kinks.push_back(v);
      kinks.push_back(-v);
    }
    auto T = [a](double u) { return u * u - a * a; };
    worst_m = std::max({worst_m,
                        std::abs(sm.clipped_abs -
                                 normal_expectation(
                                     [&](double u) { return std::max(std::abs(T(u)) - c, 0.0); },
                                     1e-12, kinks)),
                        std::abs(sm.min_sq -
                                 normal_expectation(
                                     [&](double u) {
                                       const double t = T(u);
                                       return std::min(t * t, c * c);
                                     },
                                     1e-12, kinks))});
  }
  ck.check(worst_m <= 1e-9, "moment error " + fmt(worst_m));

  // solver residuals re-verified by quadrature on the evaluated curves
  double worst_s = 0.0;
  auto track = [&](double err) { worst_s = std::max(worst_s, std::abs(err)); };

  for (double r : {0.2, 0.8}) {
    const InfluenceCurve ic = solve_location(1, r);
    track(normal_expectation([&](double u) { return ic.eval1(u) * u; }, 1e-12,
                             {-ic.clip_upper, ic.clip_upper}) -
          1.0);
  }
  {
    const InfluenceCurve ic = solve_location(3, 0.5);
    track(chi_expectation(3, [&](double x) { return ic.radial_factor(x) * x * x / 3.0; },
                          1e-12, {ic.clip_upper}) -
          1.0);
  }
  for (double r : {0.3, 1.2}) {
    const InfluenceCurve ic = solve_scale_c(r);
    const double a2 = ic.center * ic.center;
    std::vector<double> kinks{std::sqrt(a2 + ic.clip_upper),
                              std::sqrt(std::max(a2 - ic.clip_upper, 0.0))};
    std::vector<double> sym;
    for (double v : kinks) {
      sym.push_back(v);
      sym.push_back(-v);
    }
    track(normal_expectation([&](double u) { return ic.eval1(u); }, 1e-12, sym));
    track(normal_expectation([&](double u) { return ic.eval1(u) * (u * u - 1.0); }, 1e-12,
                             sym) -
          1.0);
  }
  {
    const InfluenceCurve ic = solve_scale_v(0.3);
    std::vector<double> sym;
    for (double g : {std::max(ic.clip_lower, 0.0), ic.clip_lower + ic.clip_upper}) {
      sym.push_back(std::sqrt(g));
      sym.push_back(-std::sqrt(g));
    }
    track(normal_expectation([&](double u) { return ic.eval1(u); }, 1e-12, sym));
    track(normal_expectation([&](double u) { return ic.eval1(u) * (u * u - 1.0); }, 1e-12,
                             sym) -
          1.0);
  }
  {
    const RegressorDist sn = RegressorDist::standard_normal(1);
    const InfluenceCurve ic = solve_regression_c1(0.5, sn, 1);
    track(chi_expectation(
              1,
              [&](double x) {
                const double cu = ic.clip_upper / std::max(x, 1e-12);
                return normal_expectation([&](double u) { return ic.eval2(x, u) * x * u; },
                                          1e-12, {-cu, cu});
              },
              1e-11) -
          1.0);
    const InfluenceCurve jt = solve_regression_scale(0.4, sn, RegScaleTarget::joint);
    track(chi_expectation(
              1,
              [&](double x) {
                return normal_expectation([&](double u) { return jt.eval2(x, u, 0) * x * u; });
              },
              1e-11) -
          1.0);
    track(chi_expectation(
              1,
              [&](double x) {
                return normal_expectation(
                    [&](double u) { return jt.eval2(x, u, 1) * (u * u - 1.0); });
              },
              1e-11) -
          1.0);
  }
  {
    const RegressorDist tp = RegressorDist::two_point(2.0, -0.5, 0.2);
    const InfluenceCurve ic = solve_regression_intercept(1.0, tp);
    double mean = 0.0, fisher = 0.0, cross = 0.0;
    for (size_t i = 0; i < tp.atoms.size(); ++i) {
      const double x = tp.atoms[i][0], w = tp.weights[i];
      mean += w * normal_expectation([&](double u) { return ic.eval2(x, u); });
      fisher += w * normal_expectation([&](double u) { return ic.eval2(x, u) * u; });
      cross += w * normal_expectation([&](double u) { return ic.eval2(x, u) * x * u; });
    }
    track(mean);
    track(fisher);      // orthogonal to the error score: intercept is nuisance
    track(cross - 1.0);  // standardized against the slope score x u
  }
  ck.check(worst_s <= 1e-8, "solver residual " + fmt(worst_s));
  ck.note("moment err " + fmt(worst_m) + ", residual err " + fmt(worst_s));
  return ck.result(13, "closed forms vs quadrature oracles");
}

// ---- 14: estimator sanity -----------------------------------------------------

CriterionResult c14(bool full) {
  Checker ck;
  const auto model = ModelSpec::location(1);
  const double r = 0.5;
  const InfluenceCurve ic = solve_location(1, r);

  SimConfig cfg;
  cfg.n = full ? 1000 : 300;
  cfg.replications = full ? 600 : 200;
  cfg.seed = 2024;
  const auto ideal = monte_carlo_mse(ic, model, cfg);
  ck.check(std::abs(ideal.nmse - ic.variance) <= 3.0 * ideal.mcse,
           "ideal nMSE " + fmt(ideal.nmse) + " vs E|eta|^2 " + fmt(ic.variance) + " (3se " +
               fmt(3.0 * ideal.mcse) + ")");

  cfg.r = r;
  cfg.H = ContaminationH::point_mass(1e6);
  cfg.seed = 2025;
  const auto dirty = monte_carlo_mse(ic, model, cfg);
  const double bound = max_mse(ic, r);
  ck.check(dirty.nmse <= bound + 3.0 * dirty.mcse,
           "contaminated nMSE " + fmt(dirty.nmse) + " > maxMSE " + fmt(bound));
  ck.note("ideal " + fmt(ideal.nmse) + " (want " + fmt(ic.variance) + "), contaminated " +
          fmt(dirty.nmse) + " <= " + fmt(bound) + " + 3se " + fmt(3.0 * dirty.mcse));
  return ck.result(14, "one-step estimator Monte Carlo risk");
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite(bool full_monte_carlo) {
  std::vector<CriterionResult> out;
  out.push_back(c01());
  out.push_back(c02());
  out.push_back(c03());
  out.push_back(c04());
  out.push_back(c05());
  out.push_back(c06());
  out.push_back(c07());
  out.push_back(c08());
  out.push_back(c09());
  out.push_back(c10());
  out.push_back(c11(full_monte_carlo));
  out.push_back(c12());
  out.push_back(c13());
  out.push_back(c14(full_monte_carlo));
  return out;
}

}  // namespace robicurve
