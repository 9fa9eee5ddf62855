#pragma once

#include <memory>
#include <vector>

#include "levikern/common.hpp"
#include "levikern/jump_kernel.hpp"

namespace levikern {

// Levy symbol of the frozen operator at anchor y:
//   psi_y(xi) = int (1 - cos<xi,z>) kappa(y,z) |z|^{-d-alpha} dz,
// satisfying kappa0 m(xi) <= psi_y(xi) <= kappa1 m(xi) with m the kappa==1
// symbol m(xi) = |xi|^alpha / c_{d,alpha}.
//
// For cosine-form kernels the integral closes exactly:
//   int (1-cos<xi,z>) cos<w,z> nu(dz) = (m(xi+w) + m(xi-w))/2 - m(w).
class LevySymbol {
 public:
  LevySymbol(const JumpKernel& kernel, const Point& anchor);

  double operator()(const Point& xi) const;
  double operator()(double xi1) const { return (*this)(point1(xi1)); }

  int dimension() const { return d_; }
  double alpha() const { return alpha_; }
  const Point& anchor() const { return anchor_; }

  // comparability window: c_low |xi|^alpha <= psi <= c_high |xi|^alpha
  double c_low() const { return c_low_; }
  double c_high() const { return c_high_; }

  // local stable intensity kappa(y, z->0); the small-time peak scale
  double kappa_origin() const { return kappa_origin_; }

  bool exact() const { return exact_; }

  // |freq| values where the exact symbol has radial kinks; Filon panels
  // must break there.
  const std::vector<double>& kink_frequencies() const { return kinks_; }

 private:
  int d_;
  double alpha_;
  Point anchor_;
  double c_low_, c_high_, kappa_origin_;
  bool exact_;
  double m_const_;                  // 1/c_{d,alpha}
  std::vector<double> coefs_;       // cosine-form coefficients at anchor
  std::vector<Point> freqs_;
  std::vector<double> kinks_;
  std::shared_ptr<const JumpKernel> kernel_;  // numeric fallback only

  double exact_value(const Point& xi) const;
  double numeric_value(const Point& xi) const;
};

// Brute-force evaluation of the defining integral, independent of the
// closed form; used as oracle and as the fallback inside LevySymbol.
double levy_symbol_quadrature(const JumpKernel& kernel, const Point& anchor, const Point& xi,
                              double rel_tol = 1e-8);

}  // namespace levikern
