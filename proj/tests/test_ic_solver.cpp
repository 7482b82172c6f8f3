#include <doctest.h>

#include <cmath>

#include "robicurve/dist_kernel.hpp"
#include "robicurve/ic_solver.hpp"
#include "robicurve/quadrature.hpp"

using namespace robicurve;

namespace {

// Independent residual verification: Fisher consistency and centering by the
// quadrature oracle, not by the solver's own moment path.
void verify_scalar_ic(const InfluenceCurve& ic, const std::function<double(double)>& score,
                      const std::vector<double>& kinks, double tol = 1e-8) {
  const double mean =
      normal_expectation([&](double u) { return ic.eval1(u); }, 1e-12, kinks);
  const double fisher =
      normal_expectation([&](double u) { return ic.eval1(u) * score(u); }, 1e-12, kinks);
  CHECK(std::abs(mean) < tol);
  CHECK(std::abs(fisher - 1.0) < tol);
}

// symmetric kink list {-k_i, k_i} from positive clip locations
std::vector<double> sym_kinks(std::initializer_list<double> pts) {
  std::vector<double> out;
  for (double p : pts) {
    if (std::isfinite(p) && p > 0.0) {
      out.push_back(p);
      out.push_back(-p);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("Huber clipping constants") {
  CHECK(is_unbounded(solve_huber(0.0).m));
  CHECK(solve_huber(1.0).m == 0.0);
  const HuberPsi psi = solve_huber(0.05);
  CHECK(psi.m == doctest::Approx(1.39838).epsilon(1e-4));
  // defining equation, against the quadrature oracle
  const double lhs = 0.05 / 0.95 * psi.m;
  const double rhs = normal_expectation(
      [&](double u) { return std::max(std::abs(u) - psi.m, 0.0); });
  CHECK(std::abs(lhs - rhs) < 1e-10);
  CHECK(psi.eval(3.0) == doctest::Approx(psi.m));
  CHECK(solve_huber(1.0).eval(-2.0) == -1.0);
}

TEST_CASE("location minimax IC, k = 1") {
  const InfluenceCurve cl = solve_location(1, 0.0);
  CHECK(cl.A == 1.0);
  CHECK(is_unbounded(cl.clip_upper));
  CHECK(cl.variance == doctest::Approx(1.0));

  const InfluenceCurve mb = solve_location(1, kInf);
  CHECK(mb.bias == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-12));
  CHECK(mb.eval1(0.3) == doctest::Approx(mb.bias));

  const InfluenceCurve ic = solve_location(1, 0.5);
  CHECK(ic.clip_upper == doctest::Approx(0.861592).epsilon(1e-5));
  for (double res : ic.residuals) CHECK(std::abs(res) < 1e-10);
  verify_scalar_ic(ic, [](double u) { return u; }, sym_kinks({ic.clip_upper}));
  // bias equation via the oracle
  const double e = normal_expectation(
      [&](double u) { return std::max(std::abs(u) - ic.clip_upper, 0.0); }, 1e-12,
      sym_kinks({ic.clip_upper}));
  CHECK(std::abs(0.25 * ic.clip_upper - e) < 1e-9);
}

TEST_CASE("location minimax IC, k-dim") {
  for (int k : {2, 3, 5}) {
    const InfluenceCurve mb = solve_location(k, kInf);
    const double expected =
        k * std::exp(std::lgamma(0.5 * k) - std::lgamma(0.5 * (k + 1))) / std::sqrt(2.0);
    CHECK(mb.bias == doctest::Approx(expected).epsilon(1e-12));
  }
  // solved system at finite r: residuals, monotonicity of c_r and bias in r
  double prev_c = kInf, prev_bias = kInf, prev_var = 0.0;
  for (double r : {0.1, 0.3, 0.8, 1.5, 3.0}) {
    const InfluenceCurve ic = solve_location(3, r);
    for (double res : ic.residuals) CHECK(std::abs(res) < 1e-10);
    CHECK(ic.clip_upper < prev_c);
    CHECK(ic.bias < prev_bias);
    CHECK(ic.variance > prev_var);
    prev_c = ic.clip_upper;
    prev_bias = ic.bias;
    prev_var = ic.variance;
    // Fisher consistency per coordinate via the chi_k oracle:
    // E eta Lambda' = A E |u|^2 min{1, c/|u|} / k * k = identity
    const double f = chi_expectation(3, [&](double t) {
      return ic.radial_factor(t) * t * t;
    });
    CHECK(f == doctest::Approx(3.0).epsilon(1e-9));  // trace of identity
  }
  // r -> inf limit approached by r = 1e3 within 1e-3 relative
  const InfluenceCurve far = solve_location(1, 1e3);
  const InfluenceCurve lim = solve_location(1, kInf);
  CHECK(far.bias == doctest::Approx(lim.bias).epsilon(1e-3));
  // k -> inf normalization: b_min/sqrt(k) -> 1
  const InfluenceCurve big = solve_location(200, kInf);
  CHECK(big.bias / std::sqrt(200.0) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("scale IC under contamination") {
  const InfluenceCurve cl = solve_scale_c(0.0);
  CHECK(cl.A == doctest::Approx(0.5));
  CHECK(cl.center == doctest::Approx(1.0));

  const InfluenceCurve mb = solve_scale_c(kInf);
  CHECK(mb.center == doctest::Approx(Phi_inv(0.75)).epsilon(1e-12));
  CHECK(mb.bias == doctest::Approx(1.1663873).epsilon(1e-6));

  const InfluenceCurve ic = solve_scale_c(0.5);
  CHECK(ic.center == doctest::Approx(0.846840).epsilon(1e-5));
  CHECK(ic.clip_upper == doctest::Approx(1.131448).epsilon(1e-5));
  CHECK(ic.A == doctest::Approx(1.263966).epsilon(1e-5));
  for (double res : ic.residuals) CHECK(std::abs(res) < 1e-10);
  const double a2c = ic.center * ic.center;
  verify_scalar_ic(ic, [](double u) { return u * u - 1.0; },
                   sym_kinks({std::sqrt(std::max(a2c - ic.clip_upper, 0.0)),
                              std::sqrt(a2c + ic.clip_upper)}));

  // alpha_r decreasing from 1 toward Phi_inv(3/4)
  double prev_alpha = 1.0 + 1e-12;
  for (double r : {0.2, 0.5, 1.0, 2.0, 5.0}) {
    const InfluenceCurve s = solve_scale_c(r);
    CHECK(s.center < prev_alpha);
    prev_alpha = s.center;
  }
  CHECK(prev_alpha > Phi_inv(0.75));
}

TEST_CASE("scale-c regime switch near r = 0.92") {
  CHECK_FALSE(solve_scale_c(0.90).lower_clipping_active);
  CHECK(solve_scale_c(0.94).lower_clipping_active);
  // constants continuous across the boundary
  const InfluenceCurve a = solve_scale_c(0.9199);
  const InfluenceCurve b = solve_scale_c(0.9201);
  CHECK(a.A == doctest::Approx(b.A).epsilon(1e-3));
  CHECK(a.center == doctest::Approx(b.center).epsilon(1e-3));
  CHECK(a.clip_upper == doctest::Approx(b.clip_upper).epsilon(1e-3));
}

TEST_CASE("scale IC under total variation") {
  const InfluenceCurve mb = solve_scale_v(kInf);
  CHECK(mb.bias == doctest::Approx(std::sqrt(M_PI * std::exp(1.0) / 2.0)).epsilon(1e-10));
  CHECK(mb.bias == doctest::Approx(1.0 / (2.0 * phi(1.0))).epsilon(1e-14));

  const InfluenceCurve cl = solve_scale_v(0.0);
  CHECK(cl.A == doctest::Approx(0.5));
  CHECK(std::isinf(cl.bias));

  for (double r : {0.1, 0.25, 0.5, 1.0, 2.0}) {
    const InfluenceCurve ic = solve_scale_v(r);
    for (double res : ic.residuals) CHECK(std::abs(res) < 1e-10);
    const std::vector<double> kinks =
        sym_kinks({std::sqrt(std::max(ic.clip_lower, 0.0)),
                   std::sqrt(ic.clip_lower + ic.clip_upper)});
    verify_scalar_ic(ic, [](double u) { return u * u - 1.0; }, kinks);
    // bias equation, oracle form
    const double lower = normal_expectation(
        [&](double u) { return std::max(ic.clip_lower - u * u, 0.0); }, 1e-12, kinks);
    CHECK(std::abs(r * r * ic.clip_upper - lower) < 1e-9);
    // total oscillation bounded below by the minimal bias
    CHECK(ic.bias > mb.bias);
  }
}

TEST_CASE("regression IC (sigma known)") {
  // degenerate design |x| = 1 reduces exactly to 1-dim location
  const RegressorDist unit = RegressorDist::discrete({1.0}, {1.0});
  for (double r : {0.05, 0.3, 0.9, 2.0}) {
    const InfluenceCurve reg = solve_regression_c1(r, unit, 1);
    const InfluenceCurve loc = solve_location(1, r);
    CHECK(reg.A == doctest::Approx(loc.A).epsilon(1e-10));
    CHECK(reg.bias == doctest::Approx(loc.bias).epsilon(1e-10));
    CHECK(reg.variance == doctest::Approx(loc.variance).epsilon(1e-10));
  }
  // alpha = 2 coincides with 1-dim location for any design
  const RegressorDist sn = RegressorDist::standard_normal(1);
  for (double r : {0.1, 0.7, 1.5}) {
    const InfluenceCurve reg2 = solve_regression_c1(r, sn, 2);
    const InfluenceCurve loc = solve_location(1, r);
    CHECK(reg2.A == doctest::Approx(loc.A).epsilon(1e-10));
    CHECK(reg2.clip_upper == doctest::Approx(loc.clip_upper).epsilon(1e-10));
  }
  // min-L1 limit for the standard normal design, k = 1
  const InfluenceCurve mb = solve_regression_c1(kInf, sn, 1);
  CHECK(mb.bias == doctest::Approx(M_PI / 2.0).epsilon(1e-10));
  // Fisher consistency at finite r by the oracle (mixing over |x| ~ chi_1)
  const InfluenceCurve ic = solve_regression_c1(0.5, sn, 1);
  const double fisher = chi_expectation(1, [&](double x) {
    return normal_expectation([&](double u) { return ic.eval2(x, u) * x * u; });
  }, 1e-11);
  CHECK(fisher == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("regression and scale, separate targets") {
  const RegressorDist sn = RegressorDist::standard_normal(1);
  const InfluenceCurve th = solve_regression_scale(0.4, sn, RegScaleTarget::theta);
  const InfluenceCurve c1 = solve_regression_c1(0.4, sn, 1);
  CHECK(th.A == doctest::Approx(c1.A).epsilon(1e-12));

  const InfluenceCurve sg = solve_regression_scale(0.4, sn, RegScaleTarget::sigma);
  const InfluenceCurve sc = solve_scale_c(0.4);
  CHECK(sg.A == doctest::Approx(sc.A).epsilon(1e-12));
  CHECK(sg.center == doctest::Approx(sc.center).epsilon(1e-12));
  // z_sc = 0 at r = 0: classical scale IC
  const InfluenceCurve sg0 = solve_regression_scale(0.0, sn, RegScaleTarget::sigma);
  CHECK(sg0.center * sg0.center - 1.0 == doctest::Approx(0.0));
}

TEST_CASE("regression and scale, joint parameter") {
  const RegressorDist sn = RegressorDist::standard_normal(1);
  const InfluenceCurve ic = solve_regression_scale(0.5, sn, RegScaleTarget::joint);
  for (double res : ic.residuals) CHECK(std::abs(res) < 1e-10);

  // independent verification of the common-weight system by nested adaptive
  // quadrature over (|x|, u)
  auto expect2 = [&](const std::function<double(double, double)>& f) {
    return chi_expectation(1, [&](double x) {
      return normal_expectation([&](double u) { return f(x, u); }, 1e-12);
    }, 1e-11);
  };
  const double res_fisher_rg = expect2([&](double x, double u) {
    return ic.eval2(x, u, 0) * x * u;
  }) - 1.0;
  const double res_fisher_sc = expect2([&](double x, double u) {
    return ic.eval2(x, u, 1) * (u * u - 1.0);
  }) - 1.0;
  const double res_center = expect2([&](double x, double u) { return ic.eval2(x, u, 1); });
  const double res_bias = 0.25 * ic.clip_upper - expect2([&](double x, double u) {
    const double rg = ic.A * x * u, sc = ic.A2 * (u * u - 1.0 - ic.center);
    return std::max(std::sqrt(rg * rg + sc * sc) - ic.clip_upper, 0.0);
  });
  CHECK(std::abs(res_fisher_rg) < 1e-8);
  CHECK(std::abs(res_fisher_sc) < 1e-8);
  CHECK(std::abs(res_center) < 1e-8);
  CHECK(std::abs(res_bias) < 1e-8);

  // |rho_rg(x, u)| ~ 1/u as |u| -> inf at fixed x
  const double p1 = std::abs(ic.eval2(1.0, 100.0, 0)) * 100.0;
  const double p2 = std::abs(ic.eval2(1.0, 200.0, 0)) * 200.0;
  CHECK(p1 == doctest::Approx(p2).epsilon(1e-3));
}

TEST_CASE("regression with intercept nuisance") {
  // symmetric two-point design: robustly adaptive, A_mu = 0
  const RegressorDist sym = RegressorDist::two_point(1.0, -1.0, 0.5);
  const InfluenceCurve s = solve_regression_intercept(0.7, sym);
  CHECK(std::abs(s.A2) < 1e-10);
  CHECK(s.A == doctest::Approx(solve_regression_c1(0.7, sym, 1).A).epsilon(1e-9));

  // r = 0: classical adaptivity even for asymmetric centered designs
  const RegressorDist asym = RegressorDist::two_point(2.0, -0.5, 0.2);
  const InfluenceCurve z = solve_regression_intercept(0.0, asym);
  CHECK(std::abs(z.A2) < 1e-12);
  CHECK(z.A == doctest::Approx(1.0).epsilon(1e-12));  // E x^2 = 1 here

  // asymmetric design at r = 1: frozen fixed point
  const InfluenceCurve a = solve_regression_intercept(1.0, asym);
  CHECK(a.A == doctest::Approx(7.69509).epsilon(1e-5));
  CHECK(a.A2 == doctest::Approx(3.347543).epsilon(1e-5));
  CHECK(a.clip_upper == doctest::Approx(2.51415).epsilon(1e-5));
  for (double res : a.residuals) CHECK(std::abs(res) < 1e-10);
  // E rho = 0 and E rho Lambda' = 1 by summation x quadrature
  double mean = 0.0, fisher = 0.0;
  for (size_t i = 0; i < asym.atoms.size(); ++i) {
    const double x = asym.atoms[i][0], w = asym.weights[i];
    mean += w * normal_expectation([&](double u) { return a.eval2(x, u); });
    fisher += w * normal_expectation([&](double u) { return a.eval2(x, u) * x * u; });
  }
  CHECK(std::abs(mean) < 1e-8);
  CHECK(std::abs(fisher - 1.0) < 1e-8);
}

TEST_CASE("nonadaptivity ratio") {
  const RegressorDist sym = RegressorDist::two_point(1.0, -1.0, 0.5);
  for (double r : {0.2, 1.0, 2.5}) CHECK(std::abs(nonadaptivity_ratio(r, sym)) < 1e-8);
  const RegressorDist asym = RegressorDist::two_point(2.0, -0.5, 0.2);
  CHECK(std::abs(nonadaptivity_ratio(0.0, asym)) < 1e-8);
  CHECK(nonadaptivity_ratio(1.0, asym) == doctest::Approx(0.700484).epsilon(1e-4));
  // increasing in asymmetry along the centered unit-variance family
  auto family = [](double p) {
    return RegressorDist::two_point(std::sqrt((1.0 - p) / p), -std::sqrt(p / (1.0 - p)), p);
  };
  const double r04 = nonadaptivity_ratio(1.0, family(0.4));
  const double r02 = nonadaptivity_ratio(1.0, family(0.2));
  const double r01 = nonadaptivity_ratio(1.0, family(0.1));
  CHECK(r04 == doctest::Approx(0.184743).epsilon(1e-4));
  CHECK(r02 == doctest::Approx(0.700484).epsilon(1e-4));
  CHECK(r01 == doctest::Approx(0.979787).epsilon(1e-4));
  CHECK(r04 < r02);
  CHECK(r02 < r01);
}
