#pragma once

#include <functional>

#include "levikern/frozen.hpp"
#include "levikern/grid.hpp"
#include "levikern/jump_kernel.hpp"

namespace levikern::testing {

// shared fixtures for the frozen/parametrix suites
SpaceTimeGrid test_grid();
JumpKernel reference_kernel();

// engines are expensive on one core; share them across test cases
const FrozenKernelEngine& shared_ref_engine();
const FrozenKernelEngine& shared_const_engine();

// Brute-force nested quadrature of
//   q1(t,x,y) = int_0^t int q0(t-s, x, z) q0(s, z, y) dz ds
// at one point, with q0 supplied as a black box. The s-integral uses a
// power substitution against both endpoint singularities and dense panels
// in z; `resolution` scales node counts (oracle runs at triple resolution).
double q1_brute_force(const std::function<double(double, double, double)>& q0, double beta,
                      double alpha, double t, double x, double y, double z_extent,
                      int resolution);

// Direct evaluation of the assembly correction
//   phi(t,x,y) = int_0^t int p_z(t-s, x-z) q(s,z,y) dz ds
// by brute-force quadrature with explicit peak handling at s -> t.
double correction_brute_force(const FrozenKernelEngine& eng,
                              const std::function<double(double, double, double)>& q, double t,
                              double x, double y, double z_extent, int resolution);

}  // namespace levikern::testing
