#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "robicurve/ic_solver.hpp"
#include "robicurve/models.hpp"

namespace robicurve {

// Counter-based generator: draw i of stream j is a hash of (seed, j, i), so
// replicates are reproducible independently of evaluation order.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream);

  double uniform();  // (0, 1)
  double normal();   // Phi_inv(uniform)

 private:
  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

// Contaminating distribution H of the convex neighborhood
// Q_n = (1 - r/sqrt(n)) P + (r/sqrt(n)) H.
struct ContaminationH {
  enum class Kind { PointMass, Normal, Grid };
  Kind kind = Kind::PointMass;
  double x0 = 0.0;                     // PointMass
  double mu = 0.0, sigma = 1.0;        // Normal
  std::vector<double> atoms, weights;  // Grid

  static ContaminationH point_mass(double x0);
  static ContaminationH normal(double mu, double sigma);
  static ContaminationH grid(std::vector<double> atoms, std::vector<double> weights);

  double draw(CounterRng& rng) const;
};

struct SimConfig {
  enum class Start { MedianMad, LeastSquares };

  int n = 100;
  int replications = 1;
  uint64_t seed = 0;
  double r = 0.0;  // neighborhood radius; contamination rate is r/sqrt(n)
  ContaminationH H = ContaminationH::point_mass(0.0);
  Start start = Start::MedianMad;

  void validate() const;  // throws ConfigError / RadiusExceedsOne
};

struct Sample {
  std::vector<double> y;
  std::vector<double> x;               // regression designs (k = 1); else empty
  std::vector<uint8_t> contaminated;   // per-observation flags
  double r = 0.0;
  uint64_t seed = 0;
  uint64_t stream = 0;

  int n() const { return static_cast<int>(y.size()); }
  bool ideal() const { return r == 0.0; }
};

// Observations at the true parameter (location/intercept theta = 0, scale
// sigma = 1, regression theta = 0); stream selects the replicate.
Sample generate(const ModelSpec& model, const SimConfig& config, uint64_t stream = 0);

// start + n^{-1} sum eta at the residuals under start (scale multiplicative).
// component selects the block of a stacked regression-scale curve.
double one_step(const InfluenceCurve& ic, const Sample& sample, double start,
                int component = 0);

struct MEstimate {
  double estimate = 0.0;
  bool root_found = true;  // false: no sign change, |sum psi| minimized instead
};

// Root of sum psi(y_i - theta) = 0 over theta in [min y, max y], tol 1e-10.
MEstimate m_estimate(const std::function<double(double)>& psi, const std::vector<double>& y);
MEstimate m_estimate(const HuberPsi& psi, const Sample& sample);
MEstimate m_estimate(const InfluenceCurve& ic, const Sample& sample);

// Median / MAD scaled by 1/Phi_inv(3/4) / least squares, by model variant.
double start_estimate(const ModelSpec& model, const Sample& sample, SimConfig::Start kind);

struct MseRecord {
  double nmse = 0.0;  // mean over replicates of n |estimate - theta|^2
  double mcse = 0.0;  // Monte Carlo standard error of nmse
  int n = 0;
  int replications = 0;
  uint64_t seed = 0;
};

MseRecord monte_carlo_mse(const InfluenceCurve& ic, const ModelSpec& model,
                          const SimConfig& config);

}  // namespace robicurve
