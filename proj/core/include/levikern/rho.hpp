#pragma once

#include <string>
#include <vector>

#include "levikern/common.hpp"

namespace levikern {

// The comparison function rho^beta_gamma(t,x) =
//   t^{gamma/alpha} (|x|^beta ^ 1) (t^{1/alpha} + |x|)^{-d-alpha}
// on (0,1] x R^d. Every estimate downstream is phrased against these.
struct RhoProfile {
  double beta = 0.0;
  double gamma = 0.0;
  double alpha = 1.0;
  int d = 1;
};

double rho(const RhoProfile& p, double t, const Point& x);
inline double rho1(const RhoProfile& p, double t, double x) { return rho(p, t, point1(x)); }

// Closed-form upper bound for int rho^beta_gamma(t,x) dx, valid for
// beta in [0, alpha): c_d t^{(gamma+beta-alpha)/alpha} (1/(d+beta) + 1/(alpha-beta)).
double rho_space_integral_bound(const RhoProfile& p, double t);

struct ConvolutionReport {
  std::string inequality_id;
  std::string params;          // human-readable parameter string
  double measured_constant = 0.0;
  double ceiling = 0.0;        // configured ceiling for "finite"
  double quad_tolerance = 0.0; // achieved quadrature tolerance
  bool quadrature_converged = true;
  bool pass = false;
  std::vector<double> x_samples;
};

struct RhoQuadSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double tail_fraction = 1e-8;  // analytic tail bound target, relative
  std::vector<double> x_samples = {0.0, 0.25, 1.0, 4.0, 8.0, 16.0};
};

// Space integral exponent (Lemma 2.1(i)): fits the slope of
// log int rho(t,.) against log t over t = 2^{-k}; slope should be
// (gamma+beta-alpha)/alpha.
struct SlopeReport {
  double fitted_slope = 0.0;
  double expected_slope = 0.0;
  double max_constant = 0.0;
  bool pass = false;
};
SlopeReport verify_space_integral(const RhoProfile& p, const std::vector<double>& ts,
                                  double slope_tol = 0.02);

// Lemma 2.1(ii): space convolution at fixed (t, s), measured smallest C
// such that the four-term envelope dominates at each sampled x.
ConvolutionReport verify_space_convolution(const RhoProfile& p1, const RhoProfile& p2, double t,
                                           double s, const RhoQuadSpec& spec, double ceiling);

// Lemma 2.1(iii): space-time convolution with the Beta prefactor envelope.
ConvolutionReport verify_spacetime_convolution(const RhoProfile& p1, const RhoProfile& p2,
                                               double t, const RhoQuadSpec& spec,
                                               double ceiling);

// The shipped parameter sample set for the `verify-lemma21` subcommand.
std::vector<ConvolutionReport> run_lemma21_suite(double alpha, int d, double ceiling);

// Raw convolution values, exposed for tests.
double space_convolution_value(const RhoProfile& p1, const RhoProfile& p2, double t, double s,
                               double x, const RhoQuadSpec& spec, bool* converged = nullptr);
double spacetime_convolution_value(const RhoProfile& p1, const RhoProfile& p2, double t,
                                   double x, const RhoQuadSpec& spec, bool* converged = nullptr);

}  // namespace levikern
