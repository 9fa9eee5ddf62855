#include <doctest.h>

#include <cmath>

#include "levikern/operator.hpp"
#include "levikern/rho.hpp"
#include "levikern/special.hpp"
#include "oracles.hpp"

using namespace levikern;
using namespace levikern::testing;

TEST_CASE("operator annihilates constants") {
  auto k = reference_kernel();
  auto g = test_grid();
  auto f = GridFunction1D::sample(g.extent, g.n_fine(), [](double) { return 3.7; },
                                  [](double) { return 3.7; });
  auto res = apply_frozen_operator(k, point1(0.3), f, 0.5, g);
  CHECK(std::abs(res.value) < 1e-10);
}

TEST_CASE("operator on sin under kappa==1, alpha=1 is -pi sin") {
  // symbol psi(xi) = pi |xi| so L sin(x) = -pi sin(x)
  auto k = JumpKernel::constant(1, 1.0, 1.0);
  SpaceTimeGrid g = test_grid();
  g.extent = 16.0;
  auto f = GridFunction1D::sample(g.extent, g.n_fine(), [](double x) { return std::sin(x); },
                                  [](double x) { return std::sin(x); });
  for (double x : {0.0, 0.7, -1.9}) {
    double got = apply_frozen_operator_checked(k, point1(0.0), f, x, g);
    INFO("x=", x);
    CHECK(got == doctest::Approx(-M_PI * std::sin(x)).epsilon(2e-3));
  }
}

TEST_CASE("operator on the frozen density equals its time derivative") {
  auto k = reference_kernel();
  auto g = test_grid();
  const auto& eng = shared_ref_engine();
  double y = -0.9;
  int j = g.nearest_coarse(y);
  double t = 0.25;
  // f = p_y(t, . - y) as a grid function in x
  auto f = GridFunction1D::sample(
      g.extent, g.n_fine(), [&](double x) { return eng.p(j, t, x - y); },
      [&](double x) { return eng.levy_tail_density(j, t, x - y); });
  for (double x : {y, y + 0.4, y + 2.0}) {
    double lhs = apply_frozen_operator_checked(k, point1(g.coarse(j)), f, x, g);
    double rhs = eng.dp_dt(j, t, x - y);
    INFO("x=", x, " Lp=", lhs, " dpdt=", rhs);
    CHECK(lhs == doctest::Approx(rhs).epsilon(2e-2));
  }
}

TEST_CASE("fractional derivative envelope Eq-style: int |delta_p| nu <= C rho^0_0") {
  auto k = reference_kernel();
  auto g = test_grid();
  const auto& eng = shared_ref_engine();
  RhoProfile env{0.0, 0.0, k.alpha(), 1};
  double cmax = 0.0;
  int j = g.nearest_coarse(1.1);
  for (double u : {0.0625, 0.25, 1.0}) {
    for (double v : {0.0, 0.5, 2.0, 6.0}) {
      double val = abs_second_difference_integral(eng, j, u, v);
      cmax = std::max(cmax, val / rho1(env, u, v));
    }
  }
  INFO("measured C = ", cmax);
  CHECK(std::isfinite(cmax));
  CHECK(cmax < 40.0);
}

TEST_CASE("grid function tail model feeds the far-field part") {
  auto k = JumpKernel::constant(1, 1.0, 1.0);
  auto g = test_grid();
  // f(x) = 1/(1+x^2) with exact tail: L f computable by symbol calculus:
  // f = pi * cauchy(scale 1) => hat f = pi e^{-|xi|},
  // L f(x) = -(1/2pi) int e^{ixi x} pi|xi| pi e^{-|xi|} dxi
  //        = -(pi/2) * (1-x^2)/(1+x^2)^2 * 2 = -pi (1-x^2)/(1+x^2)^2
  auto ffun = [](double x) { return 1.0 / (1.0 + x * x); };
  auto f = GridFunction1D::sample(g.extent, g.n_fine(), ffun, ffun);
  for (double x : {0.0, 1.0, 3.0}) {
    double exact = -M_PI * (1.0 - x * x) / sqr(1.0 + x * x);
    double got = apply_frozen_operator_checked(k, point1(0.0), f, x, g);
    INFO("x=", x);
    CHECK(got == doctest::Approx(exact).epsilon(5e-3));
  }
}
