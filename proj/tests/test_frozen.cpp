#include <doctest.h>

#include <cmath>

#include "levikern/frozen.hpp"
#include "levikern/operator.hpp"
#include "levikern/rho.hpp"
#include "levikern/special.hpp"
#include "oracles.hpp"

using namespace levikern;
using namespace levikern::testing;

TEST_CASE("cauchy anchor: closed-form density via the engine") {
  auto g = test_grid();
  const auto& eng = shared_const_engine();
  // p(t,x) = t / ((pi t)^2 + x^2), kappa == 1 => psi = pi |xi|
  for (double t : {0.5, 0.25, 1.0 / 16}) {
    for (double v : {0.0, 0.3, 1.0, 4.0, 7.5}) {
      double exact = t / (sqr(M_PI * t) + v * v);
      double got = eng.p(g.n_coarse() / 2, t, v);
      INFO("t=", t, " v=", v);
      CHECK(got == doctest::Approx(exact).epsilon(5e-4));
    }
  }
  CHECK(eng.p(0, 0.5, 0.0) == doctest::Approx(2.0 / (M_PI * M_PI)).epsilon(5e-4));
  // the direct inversion path (used for the field's diagonal term) is the
  // high-accuracy route
  std::vector<double> offs = {0.0, 0.3, 1.0, 4.0, 7.5}, got;
  for (double t : {0.5, 1.0 / 16}) {
    eng.density_at(point1(0.0), t, offs, got);
    for (std::size_t i = 0; i < offs.size(); ++i) {
      double exact = t / (sqr(M_PI * t) + offs[i] * offs[i]);
      INFO("t=", t, " v=", offs[i]);
      CHECK(got[i] == doctest::Approx(exact).epsilon(2e-6));
    }
  }
}

TEST_CASE("evenness and scaling of the frozen density") {
  auto k = JumpKernel::constant(1, 1.2, 0.8);
  auto g = test_grid();
  FrozenKernelEngine eng(k, g, 1);
  int j = g.n_coarse() / 2;
  CHECK(eng.p(j, 0.3, 1.7) == doctest::Approx(eng.p(j, 0.3, -1.7)).epsilon(1e-13));
  // scaling: p(t,x) = t^{-1/a} p(1, t^{-1/a} x)
  double a = 1.2;
  for (double t : {0.25, 0.0625}) {
    for (double x : {0.0, 0.5, 2.0}) {
      double lhs = eng.p(j, t, x);
      double rhs = std::pow(t, -1.0 / a) * eng.p(j, 1.0, std::pow(t, -1.0 / a) * x);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-5));
    }
  }
}

TEST_CASE("small-time model matches the table at the floor") {
  auto g = test_grid();
  const auto& eng = shared_ref_engine();
  int j = g.nearest_coarse(0.7);
  const auto& tab = eng.tables(j);
  double u = g.t_min;
  for (double v : {0.0, 0.01, 0.05, 0.2, 1.0, 3.0}) {
    double table_val = tab.p(u * 1.0000001, v);
    double model_val = tab.p_model(u, v);
    INFO("v=", v, " table=", table_val, " model=", model_val);
    CHECK(model_val == doctest::Approx(table_val).epsilon(5e-3));
  }
}

TEST_CASE("frozen table: mass, comparability, lipschitz bound") {
  auto k = reference_kernel();
  auto g = test_grid();
  const auto& eng = shared_ref_engine();
  auto times = g.time_slices();
  auto tab = eng.make_table(point1(0.7), times, 2.0 * g.extent, g.dx);
  INFO("mass defect = ", tab.mass_defect_max);
  CHECK(tab.mass_defect_max <= 1e-3);
  INFO("comparability ", tab.comparability_low, " .. ", tab.comparability_high);
  CHECK(tab.comparability_low > 0.0);
  CHECK(tab.comparability_high / tab.comparability_low < 50.0);

  // spatial Lipschitz-type bound (finite measured constant)
  RhoProfile env{0.0, k.alpha(), k.alpha(), 1};
  double cmax = 0.0;
  int j = g.nearest_coarse(0.7);
  for (double t : {0.125, 0.5}) {
    for (double x : {0.1, 0.9, 2.7}) {
      double xp = x + 0.3;
      double num = std::abs(eng.p(j, t, x) - eng.p(j, t, xp));
      double den = std::min(std::pow(t, -1.0 / k.alpha()) * 0.3, 1.0) *
                   (rho1(env, t, x) + rho1(env, t, xp));
      cmax = std::max(cmax, num / den);
    }
  }
  INFO("lipschitz C = ", cmax);
  CHECK(cmax < 20.0);
}

TEST_CASE("dp_dt via R-tables agrees with time differencing") {
  auto g = test_grid();
  const auto& eng = shared_ref_engine();
  int j = g.nearest_coarse(-1.3);
  for (double u : {0.25, 0.5}) {
    for (double v : {0.0, 0.4, 2.0}) {
      double h = 0.02 * u;
      double fd = (eng.p(j, u + h, v) - eng.p(j, u - h, v)) / (2.0 * h);
      double rt = eng.dp_dt(j, u, v);
      INFO("u=", u, " v=", v, " fd=", fd, " rt=", rt);
      CHECK(rt == doctest::Approx(fd).epsilon(5e-3));
    }
  }
}

TEST_CASE("q0: spectral route vs direct second-difference quadrature") {
  const auto& eng = shared_ref_engine();
  for (double u : {0.0625, 0.25}) {
    for (auto [x, z] : {std::pair{0.5, 0.0}, {1.2, -0.7}, {0.25, 0.125}}) {
      double spec = eng.q0(u, x, z);
      double direct = q0_direct(eng, u, x, z);
      INFO("u=", u, " x=", x, " z=", z, " spectral=", spec, " direct=", direct);
      CHECK(spec == doctest::Approx(direct).epsilon(5e-3));
    }
  }
}

TEST_CASE("q0 vanishes for constant kernels and at x == z") {
  const auto& eng = shared_const_engine();
  CHECK(eng.q0(0.25, 0.5, 0.0) == 0.0);
  const auto& engr = shared_ref_engine();
  CHECK(engr.q0(0.25, 0.5, 0.5) == 0.0);
}

TEST_CASE("q0 envelope: |q0| <= C rho^beta_0") {
  auto k = reference_kernel();
  const auto& eng = shared_ref_engine();
  RhoProfile env{k.beta(), 0.0, k.alpha(), 1};
  double cmax = 0.0;
  for (double u : {1.0 / 64, 0.0625, 0.25, 1.0}) {
    for (double x : {-2.0, -0.5, 0.3, 1.7}) {
      for (double z : {-1.9, 0.0, 0.8}) {
        if (x == z) continue;
        double q = std::abs(eng.q0(u, x, z));
        cmax = std::max(cmax, q / rho1(env, u, x - z));
      }
    }
  }
  INFO("q0 envelope C = ", cmax);
  CHECK(std::isfinite(cmax));
  CHECK(cmax < 10.0);
}

TEST_CASE("frozen_density slice obeys the spec contract") {
  auto k = JumpKernel::constant(1, 1.0, 1.0);
  auto g = test_grid();
  auto tab = frozen_density(k, point1(0.0), 0.5, g);
  CHECK(tab.times.size() == 1);
  CHECK(tab.mass_defect_max <= 1e-3);
  int mid = tab.n_offsets() / 2;
  CHECK(tab.value(0, mid) == doctest::Approx(2.0 / (M_PI * M_PI)).epsilon(1e-5));
  // evenness on the grid
  CHECK(tab.value(0, mid - 8) == doctest::Approx(tab.value(0, mid + 8)).epsilon(1e-10));
}

TEST_CASE("frozen table round-trips through serialization") {
  auto k = JumpKernel::constant(1, 1.0, 1.0);
  auto g = test_grid();
  auto tab = frozen_density(k, point1(0.0), 0.25, g);
  tab.save("/tmp/lvk_table_test.bin");
  auto tab2 = FrozenKernelTable::load("/tmp/lvk_table_test.bin");
  CHECK(tab2.values == tab.values);
  CHECK(tab2.times == tab.times);
  CHECK(tab2.alpha == tab.alpha);
  tab.export_csv("/tmp/lvk_table_test.csv");
}

TEST_CASE("d=2 tensor inversion vs radial profile for constant kappa") {
  double alpha = 1.0;
  double c2 = stable_levy_constant(2, alpha);
  auto k = JumpKernel::constant(2, alpha, c2);  // symbol |xi|^alpha exactly
  std::vector<double> v1 = {0.0, 0.5, 1.0};
  std::vector<double> v2 = {0.0, 0.75};
  double t = 0.5;
  auto vals = frozen_density_2d(k, point2(0.0, 0.0), t, v1, v2);
  auto prof = stable_profile(2, alpha);
  double s = std::pow(t, 1.0 / alpha);
  for (std::size_t a = 0; a < v1.size(); ++a) {
    for (std::size_t b = 0; b < v2.size(); ++b) {
      double r = std::hypot(v1[a], v2[b]);
      double exact = prof->density(r / s) / (s * s);
      INFO("r=", r);
      CHECK(vals[a * v2.size() + b] == doctest::Approx(exact).epsilon(5e-3));
    }
  }
}

TEST_CASE("continuous dependence on kappa: linear response in epsilon") {
  // x-independent kernels kappa and kappa+eps; slope of sup-deviation vs
  // eps in log-log should be 1
  auto g = test_grid();
  auto make = [&](double eps) {
    CosineTerm t0, t1;
    t0.coef_is_constant = true;
    t0.coef_value = 1.0 + eps;
    t0.coef_text = "c";
    t1.coef_is_constant = true;
    t1.coef_value = 0.25;
    t1.coef_text = "c2";
    t1.freq = {2.0, 0.0};
    return JumpKernel::cosine_form(1, 1.0, 0.5, 0.5 + eps, 1.5 + eps, 0.0, {t0, t1});
  };
  FrozenKernelEngine base(make(0.0), g, 1);
  RhoProfile e1{0.0, 1.0, 1.0, 1};
  double gamma = 0.5;
  RhoProfile e2{gamma, 1.0 - gamma, 1.0, 1};
  std::vector<double> eps = {0.05, 0.1, 0.2};
  std::vector<double> devs;
  int j = g.n_coarse() / 2;
  for (double e : eps) {
    FrozenKernelEngine pert(make(e), g, 1);
    double sup = 0.0;
    for (double t : {0.125, 0.25, 0.5}) {
      for (double v : {0.0, 0.5, 1.5, 4.0}) {
        double num = std::abs(base.p(j, t, v) - pert.p(j, t, v));
        sup = std::max(sup, num / (rho1(e1, t, v) + rho1(e2, t, v)));
      }
    }
    devs.push_back(sup);
  }
  double slope = std::log(devs[2] / devs[0]) / std::log(eps[2] / eps[0]);
  INFO("deviations ", devs[0], " ", devs[1], " ", devs[2], " slope=", slope);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.15));
}
