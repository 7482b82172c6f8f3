#pragma once

#include <functional>
#include <vector>

#include "robicurve/ic_solver.hpp"
#include "robicurve/models.hpp"

namespace robicurve {

// Projection of the score vector on a tangent ball, coordinatewise for models
// whose coordinates are i.i.d. functions of one N(0,1) error.  The projected
// score keeps the clip constants; sp_ic standardizes by C = E proj * Lambda'.
struct BallProjection {
  NeighborhoodSpec::Kind kind = NeighborhoodSpec::Kind::h;
  double r = 0.0;
  int k = 1;

  std::vector<double> v_lo, v_hi;  // kind v: per-coordinate (v'_j, v''_j)
  std::vector<double> u_clip;      // kind c: per-coordinate upper clip u_j
  double h_shrink = 0.0;           // kind h: ball projection is shrink * Lambda
  Mat C;                           // E proj * Lambda' (diagonal here)
  bool unbounded_sp_ic = false;    // kind c with a score unbounded below

  // residual score Lambda_tilde = Lambda - (projection on the ball), and the
  // sp-robust IC C^{-1} Lambda_tilde; coordinate j as a function of the
  // coordinate's scalar error u
  double projected(int j, double u) const;
  double sp_ic(int j, double u) const;

private:
  friend BallProjection project_ball(const ScoreVector&, NeighborhoodSpec::Kind, double);
  std::function<double(double)> score_;
};

BallProjection project_ball(const ScoreVector& scores, NeighborhoodSpec::Kind kind, double r);

// Radius at which the sp-robust total-variation IC (Gaussian location, k = 1)
// coincides with the optimally robust one: r_tilde = sqrt(r / (v'' - v')).
double tv_equiv_radius(double r);

// Optimally robust total-variation IC, coordinatewise clipped: rho_j =
// c'_j v A_j Lambda_j ^ c''_j.  For k > 1 the bias may be budgeted per
// coordinate (s2) or shared across coordinates (sinf).
enum class TvVariant { s2, sinf };

struct TvInfluenceCurve {
  int k = 1;
  double r = 0.0;
  TvVariant variant = TvVariant::s2;
  std::vector<double> A, c_lo, c_hi;
  std::vector<double> residuals;

  double eval(int j, double u) const;

private:
  friend TvInfluenceCurve robust_ic_v(const ScoreVector&, double, TvVariant, int);
  std::function<double(double)> score_;
};

TvInfluenceCurve robust_ic_v(const ScoreVector& scores, double r, TvVariant variant = TvVariant::s2,
                             int k = 1);

// Projection of a target function on the convex cone and the linear span of
// finitely many generators in L2(N(0,1)).
struct ConeGenerator {
  std::function<double(double)> f;
  std::vector<double> kinks;  // non-smooth points, for the quadrature
};

struct ConeProjection {
  Mat gram;
  std::vector<double> span_coef;  // kappa_bar = sum coef_i g_i
  std::vector<double> gamma;      // kappa_hat = sum gamma_i g_i, gamma >= 0
  double norm_bar = 0.0;          // ||kappa_bar||
  double norm_hat = 0.0;          // ||kappa_hat||

  double kappa_bar(double x) const;
  double kappa_hat(double x) const;

private:
  friend ConeProjection cone_project(const ConeGenerator&, const std::vector<ConeGenerator>&);
  std::vector<ConeGenerator> gens_;
};

ConeProjection cone_project(const ConeGenerator& kappa, const std::vector<ConeGenerator>& generators);

}  // namespace robicurve
