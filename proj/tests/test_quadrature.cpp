#include <doctest.h>

#include <cmath>

#include "levikern/quadrature.hpp"
#include "levikern/special.hpp"

using namespace levikern;

TEST_CASE("beta function anchors") {
  CHECK(beta_function(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(beta_function(0.5, 0.5) == doctest::Approx(M_PI).epsilon(1e-13));
  // quadrature oracle for B(0.3, 0.7): int_0^1 (1-s)^{a-1} s^{b-1} ds
  QuadRule gj = gauss_jacobi01(48, 0.3 - 1.0, 0.7 - 1.0);
  double q = 0.0;
  for (double w : gj.weights) q += w;
  CHECK(beta_function(0.3, 0.7) == doctest::Approx(q).epsilon(1e-12));
  CHECK_THROWS_AS(beta_function(-0.1, 1.0), domain_error_at);
  CHECK_THROWS_AS(beta_function(0.0, 1.0), domain_error_at);
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const QuadRule& gl = gauss_legendre(8);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    s += gl.weights[i] * std::pow(gl.nodes[i], 14);
  CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("gauss-jacobi mass and moments") {
  for (double a : {-0.5, 0.0, 1.3}) {
    for (double b : {-0.7, 0.0, 0.5}) {
      QuadRule r = gauss_jacobi01(12, a, b);
      double mass = 0.0, m1 = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        mass += r.weights[i];
        m1 += r.weights[i] * r.nodes[i];
      }
      CHECK(mass == doctest::Approx(beta_function(a + 1.0, b + 1.0)).epsilon(1e-12));
      CHECK(m1 == doctest::Approx(beta_function(a + 1.0, b + 2.0)).epsilon(1e-11));
    }
  }
}

TEST_CASE("adaptive simpson on a peaked integrand") {
  auto f = [](double x) { return 1.0 / (1e-4 + x * x); };
  auto res = adaptive_simpson(f, -1.0, 1.0, 1e-12, 1e-10);
  double exact = 2.0 / 1e-2 * std::atan(1.0 / 1e-2);
  CHECK(res.converged);
  CHECK(res.value == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("filon handles oscillation independent of frequency") {
  // int_0^40 e^{-x} cos(vx) dx = (1 - e^{-40}(cos 40v - v sin 40v)) / (1+v^2)
  auto edges = geometric_edges(1e-3, 40.0, 1.06);
  FilonCosine filon(edges);
  std::vector<double> f(filon.nodes().size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-filon.nodes()[i]);
  for (double v : {0.0, 0.3, 2.0, 17.0, 251.0}) {
    double exact =
        (1.0 - std::exp(-40.0) * (std::cos(40.0 * v) - v * std::sin(40.0 * v))) /
        (1.0 + v * v);
    // absolute accuracy tracks the integrand scale, not the oscillatory
    // integral's size
    CHECK(std::abs(filon.integrate(f, v) - exact) <= 5e-7 + 5e-8 * std::abs(exact));
  }
}

TEST_CASE("stable levy constant pins the fractional laplacian symbol") {
  // alpha=1, d=1: c = 1/pi
  CHECK(stable_levy_constant(1, 1.0) == doctest::Approx(1.0 / M_PI).epsilon(1e-14));
}

TEST_CASE("stable profile reduces to cauchy at alpha=1") {
  auto prof = stable_profile(1, 1.0);
  for (double w : {0.0, 0.4, 1.7, 9.0, 80.0}) {
    double exact = 1.0 / (M_PI * (1.0 + w * w));
    CHECK(prof->density(w) == doctest::Approx(exact).epsilon(2e-6));
  }
  CHECK(prof->cdf(0.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(prof->cdf(1.0) == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(prof->quantile(0.75) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("stable profile mass is one for alpha=1.4") {
  auto prof = stable_profile(1, 1.4);
  // trapezoid over [-60, 60] plus series tail
  double h = 1.0 / 64.0;
  double sum = 0.5 * prof->density(0.0);
  for (int k = 1; k * h < 60.0; ++k) sum += prof->density(k * h);
  double mass = 2.0 * sum * h;
  // tail from the asymptotic series, leading term
  double c1 = std::tgamma(1.4 + 1.0) * std::sin(0.7 * M_PI) / M_PI;
  mass += 2.0 * c1 / 1.4 * std::pow(60.0, -1.4);
  CHECK(mass == doctest::Approx(1.0).epsilon(2e-5));
}
