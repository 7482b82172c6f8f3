#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace robicurve {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// r = 0 influence curves are unclipped; an unbounded clipping constant is a
// legitimate value everywhere in this library, so "is this clip active"
// checks must go through these helpers rather than magic floats.
inline bool is_unbounded(double c) { return std::isinf(c); }

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverNonconvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OracleNonconvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularDesign : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RadiusTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateGenerators : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateTangents : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptySample : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonfiniteUpdate : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RadiusExceedsOne : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense k x k matrix, row major.  k stays tiny (regression designs) or the
// matrix is diagonal (location), so a pivoted Gauss solve is all we need.
struct Mat {
  int n = 0;
  std::vector<double> a;  // n*n row major

  Mat() = default;
  explicit Mat(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  static Mat identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
};

// Solves a x = b in place (Gauss, partial pivoting).  Throws SingularDesign.
std::vector<double> solve_linear(Mat a, std::vector<double> b);

int max_threads();  // ROBICURVE_THREADS env cap, default hardware concurrency

}  // namespace robicurve
