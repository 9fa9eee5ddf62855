#include <doctest.h>

#include <cmath>

#include "levikern/expr.hpp"
#include "levikern/jump_kernel.hpp"
#include "levikern/special.hpp"

using namespace levikern;

namespace {

// reference Holder kernel: 1 + 0.4 sin(x) cos^2(z)
JumpKernel reference_kernel() {
  CosineTerm t0, t1;
  t0.coef_text = "1 + 0.2*sin(x)";
  t0.coef = [](const Point& x) { return 1.0 + 0.2 * std::sin(x[0]); };
  t0.freq = {0.0, 0.0};
  t1.coef_text = "0.2*sin(x)";
  t1.coef = [](const Point& x) { return 0.2 * std::sin(x[0]); };
  t1.freq = {2.0, 0.0};
  double kappa2 = 0.4 * std::pow(2.0, 0.5);  // |sin x - sin y| <= min(2,|x-y|)
  return JumpKernel::cosine_form(1, 1.0, 0.5, 0.6, 1.4, kappa2, {t0, t1}, "holder-ref");
}

}  // namespace

TEST_CASE("expression parser basics") {
  auto e = Expression::parse("1 + 0.4*sin(x1)*cos(z1)^2");
  CHECK(e.eval(point1(0.5), point1(0.3)) ==
        doctest::Approx(1.0 + 0.4 * std::sin(0.5) * sqr(std::cos(0.3))).epsilon(1e-15));
  CHECK(Expression::parse("min(2, 5) + max(1, -3)").eval({}, {}) == doctest::Approx(3.0));
  CHECK(Expression::parse("-x^2").eval(point1(3.0), {}) == doctest::Approx(-9.0));
  CHECK(Expression::parse("sign(z)").eval({}, point1(-2.0)) == doctest::Approx(-1.0));
  CHECK_THROWS(Expression::parse("1 + )"));
  CHECK_THROWS(Expression::parse("foo(x)"));
}

TEST_CASE("constant kernel validates clean") {
  auto k = JumpKernel::constant(1, 1.0, 1.0);
  auto rep = validate_kernel(k, 2000, 42);
  CHECK(rep.ok());
  CHECK(rep.symmetry_defect == 0.0);
  CHECK(rep.kappa_min >= 1.0 - 1e-12);
  CHECK(rep.kappa_max <= 1.0 + 1e-12);
}

TEST_CASE("reference kernel within declared bounds") {
  // brute-force extrema scan of 1+0.4 sin(x) cos^2(z): range [0.6, 1.4]
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i <= 400; ++i) {
    for (int j = 0; j <= 400; ++j) {
      double x = -8.0 + 16.0 * i / 400.0, z = -8.0 + 16.0 * j / 400.0;
      double v = 1.0 + 0.4 * std::sin(x) * sqr(std::cos(z));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  CHECK(lo >= 0.6 - 1e-12);
  CHECK(hi <= 1.4 + 1e-12);

  auto k = reference_kernel();
  auto rep = validate_kernel(k, 4000, 7);
  CHECK(rep.ok());
  CHECK(rep.kappa_min >= 0.6 - 1e-12);
  CHECK(rep.kappa_max <= 1.4 + 1e-12);
}

TEST_CASE("odd perturbation breaks z-symmetry and is reported") {
  auto f = [](const Point&, const Point& z) { return 1.0 + 0.5 * (z[0] > 0 ? 1.0 : -1.0); };
  auto k = JumpKernel::free_form(1, 1.0, 0.5, 0.5, 1.5, 0.0, f, "odd");
  auto rep = validate_kernel(k, 500, 3);
  CHECK_FALSE(rep.symmetry_ok);
  CHECK(rep.symmetry_defect == doctest::Approx(1.0));
}

TEST_CASE("kappa_from_matrix: identity gives the stable constant") {
  auto A = MatrixField::from_expressions(1, {"1"}, 1.0, 1.0, 0.0, 0.5);
  auto k = kappa_from_matrix(A, 1.3);
  double c = stable_levy_constant(1, 1.3);
  CHECK(k.evaluate(point1(0.7), point1(2.0)) == doctest::Approx(c).epsilon(1e-14));
  CHECK(k.is_cosine_form());
}

TEST_CASE("kappa_from_matrix: scalar a in d=1 gives c a^alpha") {
  double a = 1.7, alpha = 0.9;
  auto A = MatrixField::from_expressions(1, {"1.7"}, a, a, 0.0, 0.5);
  auto k = kappa_from_matrix(A, alpha);
  double expect = stable_levy_constant(1, alpha) * std::pow(a, alpha);
  CHECK(k.evaluate(point1(-3.0), point1(0.4)) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("kappa_from_matrix: d=2 diag(1,2) at z=(1,0)") {
  double alpha = 1.1;
  auto A = MatrixField::from_expressions(2, {"1", "0", "0", "2"}, 1.0, 2.0, 0.0, 0.5);
  auto k = kappa_from_matrix(A, alpha);
  // |det| = 2, A^{-1}(1,0) = (1,0), ratio 1 -> c/2
  double expect = stable_levy_constant(2, alpha) / 2.0;
  CHECK(k.evaluate(point2(0.3, -0.2), point2(1.0, 0.0)) ==
        doctest::Approx(expect).epsilon(1e-13));
  // hand-checked arithmetic at z=(0,1): A^{-1}z = (0, 1/2), ratio 2 -> c/2 * 2^{2+alpha}
  double expect2 = stable_levy_constant(2, alpha) / 2.0 * std::pow(2.0, 2.0 + alpha);
  CHECK(k.evaluate(point2(0.3, -0.2), point2(0.0, 1.0)) ==
        doctest::Approx(expect2).epsilon(1e-13));
}

TEST_CASE("matrix kernel stays in the conservative envelope and is z-symmetric") {
  auto A = MatrixField::from_expressions(2, {"1 + 0.2*tanh(x1)", "0.1*cos(x2)",
                                             "0.1*cos(x2)", "1.3"},
                                         0.7, 1.6, 0.3, 0.5);
  double alpha = 1.0;
  auto k = kappa_from_matrix(A, alpha);
  double c = stable_levy_constant(2, alpha);
  double lo = c * std::pow(0.7, 2.0 + alpha) / std::pow(1.6, 2.0);
  double hi = c * std::pow(1.6, 2.0 + alpha) / std::pow(0.7, 2.0);
  for (int i = 0; i < 200; ++i) {
    double x1 = -5.0 + 0.05 * i, x2 = 3.0 - 0.03 * i;
    double th = 0.1 * i;
    Point x{x1, x2}, z{std::cos(th) * (0.1 + i * 0.05), std::sin(th) * (0.1 + i * 0.05)};
    double v = k.evaluate(x, z);
    CHECK(v >= lo - 1e-12);
    CHECK(v <= hi + 1e-12);
    CHECK(v == doctest::Approx(k.evaluate(x, neg(z))).epsilon(1e-14));
  }
}

TEST_CASE("singular matrix raises") {
  auto A = MatrixField::from_expressions(1, {"0"}, 1.0, 1.0, 0.0, 0.5);
  auto k = kappa_from_matrix(A, 1.0);
  CHECK_THROWS_AS(k.evaluate(point1(0.0), point1(1.0)), domain_error_at);
}

TEST_CASE("alpha domain contract") {
  CHECK_THROWS_WITH_AS(JumpKernel::constant(1, 2.5, 1.0),
                       "JumpKernel: alpha out of (0,2)", std::invalid_argument);
}
