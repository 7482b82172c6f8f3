#include "robicurve/sp_projection.hpp"

#include <algorithm>
#include <cmath>

#include "robicurve/dist_kernel.hpp"
#include "robicurve/quadrature.hpp"

namespace robicurve {
namespace {

std::vector<double> level_kinks(const ScoreVector& s, double t) {
  if (s.coord_level_set) return s.coord_level_set(t);
  return {};
}

// E (Lambda - t)_+ and E (t - Lambda)_+ under N(0,1)
double upper_excess(const ScoreVector& s, double t) {
  auto f = s.coord_score;
  return normal_expectation([&](double u) { return std::max(f(u) - t, 0.0); }, 1e-13,
                            level_kinks(s, t));
}

double lower_excess(const ScoreVector& s, double t) {
  auto f = s.coord_score;
  return normal_expectation([&](double u) { return std::max(t - f(u), 0.0); }, 1e-13,
                            level_kinks(s, t));
}

// t with E (Lambda - t)_+ = r; decreasing in t, so bisect on r - excess.
double solve_upper_clip(const ScoreVector& s, double r) {
  return bisect_increasing([&](double t) { return r - upper_excess(s, t); }, -8.0, 8.0);
}

// t with E (t - Lambda)_+ = r, t above the essential infimum of Lambda.
double solve_lower_clip(const ScoreVector& s, double r) {
  const double floor = std::isfinite(s.coord_inf) ? s.coord_inf : -8.0;
  return bisect_increasing([&](double t) { return lower_excess(s, t) - r; }, floor + 1e-12,
                           8.0);
}

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

}  // namespace

double BallProjection::projected(int j, double u) const {
  const double lam = score_(u);
  switch (kind) {
    case NeighborhoodSpec::Kind::h: return (1.0 - h_shrink) * lam;
    case NeighborhoodSpec::Kind::v: return clamp(lam, v_lo[j], v_hi[j]);
    case NeighborhoodSpec::Kind::c: return std::min(lam + r, u_clip[j]);
  }
  return lam;
}

double BallProjection::sp_ic(int j, double u) const { return projected(j, u) / C(j, j); }

BallProjection project_ball(const ScoreVector& scores, NeighborhoodSpec::Kind kind, double r) {
  if (!scores.coord_score)
    throw ConfigError("project_ball: coordinatewise scalar scores required");
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("project_ball: 0 < r < inf required");
  BallProjection out;
  out.kind = kind;
  out.r = r;
  out.k = scores.k;
  out.score_ = scores.coord_score;
  out.C = Mat(scores.k);

  auto fill_C = [&](const std::vector<double>& kinks) {
    // coordinates are independent with centered projections, so C is diagonal
    for (int j = 0; j < scores.k; ++j) {
      out.C(j, j) = normal_expectation(
          [&](double u) { return out.projected(j, u) * scores.coord_score(u); }, 1e-13, kinks);
      if (!(std::abs(out.C(j, j)) > 1e-12))
        throw SolverNonconvergence("project_ball: singular standardization");
    }
  };

  switch (kind) {
    case NeighborhoodSpec::Kind::h: {
      double min_diag = kInf;
      for (int j = 0; j < scores.k; ++j) min_diag = std::min(min_diag, scores.fisher(j, j));
      if (!(8.0 * r * r < min_diag))
        throw RadiusTooLarge("project_ball: 8 r^2 < min Fisher diagonal required for kind h");
      // projection on {||g|| <= sqrt(8) r} shrinks the score radially; the
      // factor cancels in C^{-1} Lambda_tilde, leaving the classical IC
      out.h_shrink = std::sqrt(8.0) * r / std::sqrt(min_diag);
      for (int j = 0; j < scores.k; ++j)
        out.C(j, j) = (1.0 - out.h_shrink) * scores.fisher(j, j);
      break;
    }
    case NeighborhoodSpec::Kind::v: {
      const double mean_abs = upper_excess(scores, 0.0) + lower_excess(scores, 0.0);
      if (!(2.0 * r < mean_abs))
        throw RadiusTooLarge("project_ball: 2 r < E|Lambda_j| required for kind v");
      const double hi = solve_upper_clip(scores, r);
      const double lo = solve_lower_clip(scores, r);
      out.v_lo.assign(scores.k, lo);
      out.v_hi.assign(scores.k, hi);
      std::vector<double> kinks = level_kinks(scores, lo);
      for (double p : level_kinks(scores, hi)) kinks.push_back(p);
      fill_C(kinks);
      break;
    }
    case NeighborhoodSpec::Kind::c: {
      if (std::isfinite(scores.coord_inf) && !(r < -scores.coord_inf))
        throw RadiusTooLarge("project_ball: r < -inf Lambda_j required for kind c");
      out.unbounded_sp_ic = !std::isfinite(scores.coord_inf);
      // E[(Lambda + r) ^ t] = r - E(Lambda - (t - r))_+ = 0
      const double t = solve_upper_clip(scores, r) + r;
      out.u_clip.assign(scores.k, t);
      fill_C(level_kinks(scores, t - r));
      break;
    }
  }
  return out;
}

double tv_equiv_radius(double r) {
  if (!(r > 0.0)) throw ConfigError("tv_equiv_radius: r > 0 required");
  if (!(r < phi(0.0))) throw RadiusTooLarge("tv_equiv_radius: r < E Lambda_+ = phi(0) required");
  // Gaussian location: v'' solves phi(v) - v Phi(-v) = r, v' = -v''
  const double v = bisect_increasing(
      [&](double t) { return r - (phi(t) - t * Phi(-t)); }, 0.0, 10.0);
  return std::sqrt(r / (2.0 * v));
}

double TvInfluenceCurve::eval(int j, double u) const {
  if (is_unbounded(c_hi[j])) return A[j] * score_(u);
  return clamp(A[j] * score_(u), c_lo[j], c_hi[j]);
}

TvInfluenceCurve robust_ic_v(const ScoreVector& scores, double r, TvVariant variant, int k) {
  if (!scores.coord_score) throw ConfigError("robust_ic_v: coordinatewise scores required");
  if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("robust_ic_v: 0 <= r < inf required");
  if (k < 1) throw ConfigError("robust_ic_v: k >= 1 required");
  TvInfluenceCurve out;
  out.k = k;
  out.r = r;
  out.variant = variant;
  out.score_ = scores.coord_score;

  if (r == 0.0) {
    const double fisher = scores.fisher(0, 0);
    out.A.assign(k, 1.0 / fisher);
    out.c_lo.assign(k, -kInf);
    out.c_hi.assign(k, kInf);
    out.residuals.assign(k, 0.0);
    return out;
  }

  // In t = c/A units the standardization drops out of the bias and centering
  // equations: E(t' - Lambda)_+ = E(Lambda - t'')_+ and r^2 (t'' - t') = B,
  // where B is the own excess (s2) or the sum across coordinates (sinf).
  auto lower_for = [&](double t_hi) {
    const double e = upper_excess(scores, t_hi);
    return bisect_increasing([&](double t) { return lower_excess(scores, t) - e; },
                             std::isfinite(scores.coord_inf) ? scores.coord_inf + 1e-12 : -8.0,
                             8.0);
  };
  const double budget_factor = (variant == TvVariant::sinf) ? static_cast<double>(k) : 1.0;
  // coordinates are exchangeable here, so the sinf sweep collapses to one
  // scalar solve with the summed budget
  const double t_hi = bisect_increasing(
      [&](double t) {
        return r * r * (t - lower_for(t)) - budget_factor * upper_excess(scores, t);
      },
      1e-6, 8.0);
  const double t_lo = lower_for(t_hi);
  std::vector<double> kinks = level_kinks(scores, t_lo);
  for (double p : level_kinks(scores, t_hi)) kinks.push_back(p);
  const double denom = normal_expectation(
      [&](double u) { return clamp(scores.coord_score(u), t_lo, t_hi) * scores.coord_score(u); },
      1e-13, kinks);
  const double A = 1.0 / denom;

  out.A.assign(k, A);
  out.c_lo.assign(k, A * t_lo);
  out.c_hi.assign(k, A * t_hi);
  const double center = normal_expectation(
      [&](double u) { return clamp(scores.coord_score(u), t_lo, t_hi); }, 1e-13, kinks);
  out.residuals = {A * center,
                   r * r * A * (t_hi - t_lo) - budget_factor * A * upper_excess(scores, t_hi),
                   A * denom - 1.0};
  return out;
}

double ConeProjection::kappa_bar(double x) const {
  double s = 0.0;
  for (size_t i = 0; i < gens_.size(); ++i) s += span_coef[i] * gens_[i].f(x);
  return s;
}

double ConeProjection::kappa_hat(double x) const {
  double s = 0.0;
  for (size_t i = 0; i < gens_.size(); ++i) s += gamma[i] * gens_[i].f(x);
  return s;
}

ConeProjection cone_project(const ConeGenerator& kappa,
                            const std::vector<ConeGenerator>& generators) {
  const int m = static_cast<int>(generators.size());
  if (m < 1 || m > 10)
    throw ConfigError("cone_project: 1..10 generators supported (sign-pattern enumeration)");

  auto inner = [&](const ConeGenerator& a, const ConeGenerator& b) {
    std::vector<double> kinks = a.kinks;
    kinks.insert(kinks.end(), b.kinks.begin(), b.kinks.end());
    return normal_expectation([&](double x) { return a.f(x) * b.f(x); }, 1e-13, kinks);
  };

  ConeProjection out;
  out.gens_ = generators;
  out.gram = Mat(m);
  std::vector<double> c(m);
  for (int i = 0; i < m; ++i) {
    c[i] = inner(kappa, generators[i]);
    for (int j = i; j < m; ++j) out.gram(i, j) = out.gram(j, i) = inner(generators[i], generators[j]);
  }

  try {
    out.span_coef = solve_linear(out.gram, c);
  } catch (const SingularDesign&) {
    throw DegenerateGenerators("cone_project: generators linearly dependent in L2(P)");
  }
  double nb2 = 0.0;
  for (int i = 0; i < m; ++i) nb2 += out.span_coef[i] * c[i];
  out.norm_bar = std::sqrt(std::max(nb2, 0.0));

  // nonnegative least squares by enumerating active sets: on the active set
  // the span characterization holds; off it the cone characterization must
  double best = -kInf;  // maximize gamma' c = ||kappa_hat||^2 (all KKT points tie)
  std::vector<double> best_gamma;
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
      if (mask & (1 << i)) idx.push_back(i);
    std::vector<double> g(m, 0.0);
    if (!idx.empty()) {
      const int s = static_cast<int>(idx.size());
      Mat gs(s);
      std::vector<double> cs(s);
      for (int a = 0; a < s; ++a) {
        cs[a] = c[idx[a]];
        for (int b = 0; b < s; ++b) gs(a, b) = out.gram(idx[a], idx[b]);
      }
      std::vector<double> sol;
      try {
        sol = solve_linear(gs, cs);
      } catch (const SingularDesign&) {
        continue;
      }
      bool ok = true;
      for (double v : sol) ok = ok && v >= -1e-12;
      if (!ok) continue;
      for (int a = 0; a < s; ++a) g[idx[a]] = std::max(sol[a], 0.0);
    }
    // KKT: <kappa - kappa_hat, g_j> <= 0 for every generator
    bool kkt = true;
    for (int j = 0; j < m; ++j) {
      double gg = 0.0;
      for (int i = 0; i < m; ++i) gg += out.gram(j, i) * g[i];
      if (c[j] - gg > 1e-10) kkt = false;
    }
    if (!kkt) continue;
    double val = 0.0;
    for (int i = 0; i < m; ++i) val += g[i] * c[i];
    if (val > best) {
      best = val;
      best_gamma = g;
    }
  }
  if (best_gamma.empty())
    throw SolverNonconvergence("cone_project: no sign pattern satisfied the KKT conditions");
  out.gamma = best_gamma;
  out.norm_hat = std::sqrt(std::max(best, 0.0));
  return out;
}

}  // namespace robicurve
