#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "levikern/common.hpp"

namespace levikern {

// B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b). Throws domain_error for a,b <= 0.
double beta_function(double a, double b);

// Normalizing constant of the isotropic alpha-stable Levy measure:
// with kappa == stable_levy_constant(d, alpha) the operator has symbol
// -|xi|^alpha. Equals alpha 2^{alpha-1} Gamma((d+alpha)/2) /
// (pi^{d/2} Gamma(1-alpha/2)).
double stable_levy_constant(int d, double alpha);

// Density g of the d-dimensional isotropic stable law with characteristic
// function exp(-|xi|^alpha), tabulated radially at construction. Far tail
// switches to the asymptotic jump expansion; in d=1 the first series terms,
// in d=2 the leading term.
class StableProfile {
 public:
  StableProfile(int d, double alpha);

  int dimension() const { return d_; }
  double alpha() const { return alpha_; }

  // density at radius r >= 0
  double density(double r) const;
  // radial derivative dg/dr
  double density_deriv(double r) const;
  // CDF (d=1 only), for sampling checks and quantiles
  double cdf(double x) const;
  double quantile(double p) const;

  double peak() const { return density(0.0); }

 private:
  int d_;
  double alpha_;
  double rmax_;
  double dr_;
  std::vector<double> vals_;   // g(k*dr)
  std::vector<double> cdf_;    // d=1: CDF at grid nodes
  double tail_coeff1_, tail_coeff2_, tail_coeff3_;

  double tail_density(double r) const;
};

// Shared, lazily built profiles keyed by (d, alpha).
std::shared_ptr<const StableProfile> stable_profile(int d, double alpha);

}  // namespace levikern
