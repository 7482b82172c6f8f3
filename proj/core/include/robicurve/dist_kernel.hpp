#pragma once

#include <utility>

#include "robicurve/common.hpp"

namespace robicurve {

// --- standard normal ---------------------------------------------------

double phi(double x);       // density
double Phi(double x);       // cdf
double Phi_inv(double p);   // quantile, p in (0,1); throws ConfigError otherwise

// Partial moments of N(0,1) over [a,b] (either endpoint may be infinite):
//   nm0 = P(a < U < b), nm1 = E U 1, nm2 = E U^2 1, nm4 = E U^4 1.
double nm0(double a, double b);
double nm1(double a, double b);
double nm2(double a, double b);
double nm4(double a, double b);

// --- clipped moments for U ~ N(0,1) -------------------------------------

// E(|U| - c)_+  =  2(phi(c) - c Phi(-c))
double clipped_abs_moment(double c);

// E U^2 min{1, c/|U|}  =  2 Phi(c) - 1
double clipped_second_moment(double c);

// E min{U^2, c^2}
double normal_min_sq(double c);

// --- chi_k -----------------------------------------------------------

double chi_pdf(int k, double u);
double chi_mean(int k);                    // sqrt(2) Gamma((k+1)/2) / Gamma(k/2)
double chi_tail(int k, double c);          // P(|U| > c)
double chi_clipped_abs(int k, double c);   // E(|U| - c)_+
double chi_clipped_second(int k, double c);// E |U|^2 min{1, c/|U|}
double chi_min_sq(int k, double c);        // E min{|U|^2, c^2}
std::pair<double, double> chi_clipped_moments(int k, double c);  // (abs, second)

// Regularized incomplete gamma functions (series / continued fraction).
double gamma_p(double a, double x);  // P(a,x)
double gamma_q(double a, double x);  // Q(a,x) = 1 - P(a,x)

// --- scale score T = U^2 - alpha^2, U ~ N(0,1) -------------------------
// Everything the scale solvers need, in closed form via phi/Phi at the
// sqrt-breakpoints of the event {|T| <= c}.
struct ScaleMoments {
  double clipped_abs;     // E(|T| - c)_+
  double centered_clip;   // E T min{1, c/|T|}
  double second_clip;     // E T^2 min{1, c/|T|}
  double min_sq;          // E min{T^2, c^2}
};
ScaleMoments scale_clipped_moments(double alpha, double c);

// Pieces for the scale total-variation system, T0 = U^2:
double scale_v_lower(double g);            // E(g - U^2)_+
double scale_v_upper(double g, double c);  // E(U^2 - g - c)_+

}  // namespace robicurve
