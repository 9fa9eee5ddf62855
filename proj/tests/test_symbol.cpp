#include <doctest.h>

#include <cmath>

#include "levikern/jump_kernel.hpp"
#include "levikern/special.hpp"
#include "levikern/symbol.hpp"

using namespace levikern;

TEST_CASE("kappa == 1, alpha=1, d=1: psi(2) = 2 pi on both paths") {
  auto k = JumpKernel::constant(1, 1.0, 1.0);
  LevySymbol psi(k, point1(0.0));
  CHECK(psi.exact());
  CHECK(psi(2.0) == doctest::Approx(2.0 * M_PI).epsilon(1e-13));
  CHECK(psi(0.0) == 0.0);
  // numeric quadrature oracle agrees
  double oracle = levy_symbol_quadrature(k, point1(0.0), point1(2.0));
  CHECK(oracle == doctest::Approx(2.0 * M_PI).epsilon(1e-7));
}

TEST_CASE("exact path matches brute-force quadrature for alpha=1.5") {
  auto k = JumpKernel::constant(1, 1.5, 1.0);
  LevySymbol psi(k, point1(0.0));
  double expect = std::pow(1.0, 1.5) / stable_levy_constant(1, 1.5);
  CHECK(psi(1.0) == doctest::Approx(expect).epsilon(1e-13));
  double oracle = levy_symbol_quadrature(k, point1(0.0), point1(1.0));
  CHECK(oracle == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("cosine-form kernel: exact symbol vs numeric quadrature") {
  // kappa(y,z) = 1 + 0.3 cos(2 z) (x-independent so the fallback and the
  // closed form target the same function)
  CosineTerm t0, t1;
  t0.coef_is_constant = true;
  t0.coef_value = 1.0;
  t0.coef_text = "1";
  t1.coef_is_constant = true;
  t1.coef_value = 0.3;
  t1.coef_text = "0.3";
  t1.freq = {2.0, 0.0};
  for (double alpha : {0.8, 1.0, 1.4}) {
    auto kc = JumpKernel::cosine_form(1, alpha, 0.5, 0.7, 1.3, 0.0, {t0, t1});
    auto kf = JumpKernel::free_form(
        1, alpha, 0.5, 0.7, 1.3, 0.0,
        [](const Point&, const Point& z) { return 1.0 + 0.3 * std::cos(2.0 * z[0]); });
    LevySymbol psi(kc, point1(0.0));
    CHECK(psi.exact());
    for (double xi : {0.3, 1.0, 2.0, 3.7, 11.0}) {
      double num = levy_symbol_quadrature(kf, point1(0.0), point1(xi), 1e-9);
      INFO("alpha=", alpha, " xi=", xi);
      CHECK(psi(xi) == doctest::Approx(num).epsilon(2e-5));
    }
  }
}

TEST_CASE("symbol invariants: even, nonnegative, comparable to |xi|^alpha") {
  CosineTerm t0, t1;
  t0.coef_text = "1+0.2*sin(x)";
  t0.coef = [](const Point& x) { return 1.0 + 0.2 * std::sin(x[0]); };
  t1.coef_text = "0.2*sin(x)";
  t1.coef = [](const Point& x) { return 0.2 * std::sin(x[0]); };
  t1.freq = {2.0, 0.0};
  auto k = JumpKernel::cosine_form(1, 1.0, 0.5, 0.6, 1.4, 0.6, {t0, t1});
  LevySymbol psi(k, point1(0.4));
  for (double xi : {0.1, 0.9, 2.0, 5.0, 40.0}) {
    double v = psi(xi);
    CHECK(v == doctest::Approx(psi(-xi)).epsilon(1e-14));
    CHECK(v >= psi.c_low() * std::pow(std::abs(xi), 1.0) - 1e-12);
    CHECK(v <= psi.c_high() * std::pow(std::abs(xi), 1.0) + 1e-12);
  }
}

TEST_CASE("d=2 isotropic symbol: exact vs quadrature") {
  auto k = JumpKernel::constant(2, 1.0, 1.0);
  LevySymbol psi(k, point2(0.0, 0.0));
  double expect = 1.0 / stable_levy_constant(2, 1.0);  // |xi|=1
  CHECK(psi(point2(1.0, 0.0)) == doctest::Approx(expect).epsilon(1e-13));
  double num = levy_symbol_quadrature(k, point2(0.0, 0.0), point2(0.6, 0.8), 1e-7);
  CHECK(num == doctest::Approx(expect).epsilon(2e-3));
}
