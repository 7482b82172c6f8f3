#pragma once

#include <string>
#include <vector>

#include "robicurve/ic_solver.hpp"

namespace robicurve {

struct RiskPoint {
  double r0 = 0.0;
  double r = 0.0;
  double max_mse = 0.0;
  double rel_mse = 1.0;
};

struct RiskReport {
  std::string model;
  std::string kind;
  int alpha = 1;
  std::vector<RiskPoint> rows;
};

// maxMSE(ic, r) = variance + r^2 bias^2 (the section-6 displays); infinite
// for unclipped ICs at r > 0 and for any IC at r = inf.
double max_mse(const InfluenceCurve& ic, double r);

// maxVar(psi_{s0}, s) = ((1-s) E psi^2 + s m0^2) / ((1-s) E psi')^2.
double max_var_huber(const HuberPsi& psi, double s);

// The kind of solver behind a (model, kind) pair used by the risk grid.
enum class RiskModel { Location1, LocationK, ScaleC, ScaleV };

InfluenceCurve solve_for(RiskModel model, int k, double r);

// relMSE(eta_{r0}, r); at r = inf this is the bias ratio omega^2/omega_min^2.
double rel_mse(RiskModel model, int k, double r0, double r);

// relVar(psi_{s0}, s) for the Huber fixed-size problem.
double rel_var(double s0, double s);

// s = r^2/(1+r^2) and its inverse.
double coincidence_map(double r);
double coincidence_map_inverse(double s);

RiskReport risk_table(RiskModel model, int k, const std::vector<double>& r0_grid,
                      const std::vector<double>& r_grid);

}  // namespace robicurve
