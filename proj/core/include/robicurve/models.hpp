#pragma once

#include <functional>
#include <string>
#include <vector>

#include "robicurve/common.hpp"

namespace robicurve {

// Regressor distribution K(dx).  Atoms carry full k-vectors; the standard
// normal design is handled through |x| ~ chi_k where only |x| matters.
struct RegressorDist {
  enum class Kind { StandardNormal, TwoPoint, Discrete };
  Kind kind = Kind::StandardNormal;
  int k = 1;
  std::vector<std::vector<double>> atoms;  // TwoPoint/Discrete
  std::vector<double> weights;

  static RegressorDist standard_normal(int k);
  static RegressorDist two_point(double x1, double x2, double p);  // k = 1
  static RegressorDist discrete(std::vector<double> atoms, std::vector<double> weights);

  bool discrete_kind() const { return kind != Kind::StandardNormal; }
  double mean_abs() const;   // E|x|
  Mat second_moment() const; // E xx'
  std::vector<double> mean() const;
  void validate() const;     // weights sum to 1, dimensions consistent
};

struct ModelSpec {
  enum class Variant { Location, Scale, RegressionLoc, RegressionScale, RegressionIntercept };
  Variant variant = Variant::Location;
  int k = 1;
  RegressorDist K;  // regression variants only

  static ModelSpec location(int k);
  static ModelSpec scale();
  static ModelSpec regression(RegressorDist K);
  static ModelSpec regression_scale(RegressorDist K);
  static ModelSpec regression_intercept(RegressorDist K);

  std::string name() const;
};

// Scores and Fisher information of the ideal Gaussian model.  For the models
// whose scores are coordinatewise functions of a single N(0,1) error
// (location, scale), coord_score gives the scalar score of one coordinate.
struct ScoreVector {
  int k = 1;
  Mat fisher;
  std::function<double(double)> coord_score;             // location/scale
  std::function<std::vector<double>(const std::vector<double>&, double)> reg_score;  // x, u

  // Range of the coordinate score: essential infimum (location -inf, scale -1)
  // and the u-values where Lambda(u) = t (quadrature kink locations).
  double coord_inf = -kInf;
  std::function<std::vector<double>(double)> coord_level_set;

  double norm() const;  // ||Lambda||_2 under P, k = 1 coordinate score
};

ScoreVector scores(const ModelSpec& model);

// Classical (efficient) influence curve data: psi = I^{-1} Lambda.
struct ClassicalIC {
  Mat a_inv;        // I^{-1}
  double variance;  // trace of I^{-1}
};
ClassicalIC classical_ic(const ModelSpec& model);

}  // namespace robicurve
