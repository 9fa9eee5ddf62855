#pragma once

#include <functional>
#include <vector>

#include "levikern/frozen.hpp"
#include "levikern/grid.hpp"
#include "levikern/jump_kernel.hpp"

namespace levikern {

// Scalar function tabulated on a uniform grid over [-extent, extent] with
// cubic interpolation; an optional tail model extends it beyond the table.
class GridFunction1D {
 public:
  GridFunction1D(double extent, int n, std::vector<double> values,
                 std::function<double(double)> tail = nullptr);

  static GridFunction1D sample(double extent, int n, const std::function<double(double)>& f,
                               std::function<double(double)> tail = nullptr);

  double extent() const { return extent_; }
  double spacing() const { return h_; }
  int size() const { return static_cast<int>(vals_.size()); }
  double node(int i) const { return -extent_ + i * h_; }
  const std::vector<double>& values() const { return vals_; }

  double operator()(double x) const;
  // 5-point second derivative at stencil spacing `step`
  double second_derivative(double x, double step) const;
  double sup_abs() const;
  bool has_tail() const { return static_cast<bool>(tail_); }
  double tail(double x) const { return tail_ ? tail_(x) : 0.0; }

 private:
  double extent_, h_;
  std::vector<double> vals_;
  std::function<double(double)> tail_;
};

struct OperatorResult {
  double value = 0.0;
  double tail_bound = 0.0;   // unaccounted |z|>R contribution bound
  bool curvature_ok = true;  // 5-point stencil stable under step doubling
};

// L^{kappa(anchor)} f(x) = 1/2 int [f(x+z)+f(x-z)-2f(x)] kappa(anchor,z)
// |z|^{-d-alpha} dz. Inner cell |z| < r_inner by the quadratic fit, middle
// by product quadrature on the interpolant, tail by the model or a bound.
OperatorResult apply_frozen_operator(const JumpKernel& k, const Point& anchor,
                                     const GridFunction1D& f, double x,
                                     const SpaceTimeGrid& grid);

// Throwing wrapper (unresolved-singularity error).
double apply_frozen_operator_checked(const JumpKernel& k, const Point& anchor,
                                     const GridFunction1D& f, double x,
                                     const SpaceTimeGrid& grid);

// Direct second-difference quadrature of the freezing defect
//   q0(u,x,z) = 1/2 int delta_{p_z}(u, x-z; w) (kappa(x,w)-kappa(z,w)) nu(dw),
// evaluated from the engine's density tables. Independent of the spectral
// R-table route; serves as its oracle.
double q0_direct(const FrozenKernelEngine& eng, double u, double x, double z);

// int |delta_p(u, v; w)| nu(dw) for the fractional-derivative envelope
// measurements (anchor's own density).
double abs_second_difference_integral(const FrozenKernelEngine& eng, int anchor, double u,
                                      double v);

}  // namespace levikern
