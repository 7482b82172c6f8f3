#include "robicurve/models.hpp"

#include <cmath>
#include <numeric>

#include "robicurve/dist_kernel.hpp"
#include "robicurve/quadrature.hpp"

namespace robicurve {

RegressorDist RegressorDist::standard_normal(int k) {
  RegressorDist d;
  d.kind = Kind::StandardNormal;
  d.k = k;
  return d;
}

RegressorDist RegressorDist::two_point(double x1, double x2, double p) {
  RegressorDist d;
  d.kind = Kind::TwoPoint;
  d.k = 1;
  d.atoms = {{x1}, {x2}};
  d.weights = {p, 1.0 - p};
  d.validate();
  return d;
}

RegressorDist RegressorDist::discrete(std::vector<double> atoms, std::vector<double> weights) {
  RegressorDist d;
  d.kind = Kind::Discrete;
  d.k = 1;
  for (double a : atoms) d.atoms.push_back({a});
  d.weights = std::move(weights);
  d.validate();
  return d;
}

void RegressorDist::validate() const {
  if (kind == Kind::StandardNormal) {
    if (k < 1) throw ConfigError("RegressorDist: k >= 1 required");
    return;
  }
  if (atoms.size() != weights.size() || atoms.empty())
    throw ConfigError("RegressorDist: atoms/weights mismatch");
  double s = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ConfigError("RegressorDist: negative weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12) throw ConfigError("RegressorDist: weights must sum to 1");
  for (const auto& a : atoms)
    if (static_cast<int>(a.size()) != k) throw ConfigError("RegressorDist: atom dimension mismatch");
}

double RegressorDist::mean_abs() const {
  if (kind == Kind::StandardNormal) return chi_mean(k);
  double s = 0.0;
  for (size_t i = 0; i < atoms.size(); ++i) {
    double n2 = 0.0;
    for (double xi : atoms[i]) n2 += xi * xi;
    s += weights[i] * std::sqrt(n2);
  }
  return s;
}

Mat RegressorDist::second_moment() const {
  if (kind == Kind::StandardNormal) return Mat::identity(k);
  Mat m(k);
  for (size_t i = 0; i < atoms.size(); ++i)
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) m(a, b) += weights[i] * atoms[i][a] * atoms[i][b];
  return m;
}

std::vector<double> RegressorDist::mean() const {
  std::vector<double> m(k, 0.0);
  if (kind == Kind::StandardNormal) return m;
  for (size_t i = 0; i < atoms.size(); ++i)
    for (int a = 0; a < k; ++a) m[a] += weights[i] * atoms[i][a];
  return m;
}

ModelSpec ModelSpec::location(int k) {
  if (k < 1) throw ConfigError("location model: k >= 1 required");
  ModelSpec m;
  m.variant = Variant::Location;
  m.k = k;
  return m;
}

ModelSpec ModelSpec::scale() {
  ModelSpec m;
  m.variant = Variant::Scale;
  m.k = 1;
  return m;
}

namespace {
ModelSpec make_reg(ModelSpec::Variant v, RegressorDist K) {
  K.validate();
  ModelSpec m;
  m.variant = v;
  m.k = K.k;
  m.K = std::move(K);
  // E xx' must be positive definite; for k = 1 this is just E x^2 > 0.
  Mat xx = m.K.second_moment();
  std::vector<double> probe(m.k, 1.0);
  try {
    (void)solve_linear(xx, probe);
  } catch (const SingularDesign&) {
    throw SingularDesign("regression model: E xx' singular");
  }
  return m;
}
}  // namespace

ModelSpec ModelSpec::regression(RegressorDist K) {
  return make_reg(Variant::RegressionLoc, std::move(K));
}

ModelSpec ModelSpec::regression_scale(RegressorDist K) {
  return make_reg(Variant::RegressionScale, std::move(K));
}

ModelSpec ModelSpec::regression_intercept(RegressorDist K) {
  ModelSpec m = make_reg(Variant::RegressionIntercept, std::move(K));
  for (double mu : m.K.mean())
    if (std::abs(mu) > 1e-10) throw ConfigError("regression intercept model requires E_K x = 0");
  return m;
}

std::string ModelSpec::name() const {
  switch (variant) {
    case Variant::Location: return "location-" + std::to_string(k) + "d";
    case Variant::Scale: return "scale";
    case Variant::RegressionLoc: return "regression";
    case Variant::RegressionScale: return "regression-scale";
    case Variant::RegressionIntercept: return "regression-intercept";
  }
  return "?";
}

ScoreVector scores(const ModelSpec& model) {
  ScoreVector s;
  s.k = model.k;
  switch (model.variant) {
    case ModelSpec::Variant::Location:
      s.fisher = Mat::identity(model.k);
      s.coord_score = [](double u) { return u; };
      s.coord_inf = -kInf;
      s.coord_level_set = [](double t) { return std::vector<double>{t}; };
      break;
    case ModelSpec::Variant::Scale:
      s.fisher = Mat(1);
      s.fisher(0, 0) = 2.0;  // E (u^2 - 1)^2
      s.coord_score = [](double u) { return u * u - 1.0; };
      s.coord_inf = -1.0;
      s.coord_level_set = [](double t) {
        if (t < -1.0) return std::vector<double>{};
        const double u = std::sqrt(1.0 + t);
        return std::vector<double>{-u, u};
      };
      break;
    default: {
      s.fisher = model.K.second_moment();  // E xx' u^2 = E xx'
      auto K = model.K;
      s.reg_score = [K](const std::vector<double>& x, double u) {
        std::vector<double> v(x.size());
        for (size_t i = 0; i < x.size(); ++i) v[i] = x[i] * u;
        return v;
      };
      break;
    }
  }
  return s;
}

double ScoreVector::norm() const {
  if (!coord_score) throw ConfigError("ScoreVector::norm needs a coordinate score");
  auto f = coord_score;
  const double sq = normal_expectation([f](double u) {
    const double v = f(u);
    return v * v;
  });
  return std::sqrt(sq);
}

ClassicalIC classical_ic(const ModelSpec& model) {
  ScoreVector s = scores(model);
  const int k = model.k;
  ClassicalIC ic;
  ic.a_inv = Mat(k);
  // invert by solving k right-hand sides
  for (int j = 0; j < k; ++j) {
    std::vector<double> e(k, 0.0);
    e[j] = 1.0;
    std::vector<double> col = solve_linear(s.fisher, e);
    for (int i = 0; i < k; ++i) ic.a_inv(i, j) = col[i];
  }
  ic.variance = 0.0;
  for (int i = 0; i < k; ++i) ic.variance += ic.a_inv(i, i);
  return ic;
}

}  // namespace robicurve
