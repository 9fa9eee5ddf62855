#include <doctest.h>

#include <cmath>

#include "levikern/parametrix.hpp"
#include "levikern/rho.hpp"
#include "levikern/special.hpp"
#include "oracles.hpp"

using namespace levikern;
using namespace levikern::testing;

namespace {

ParametrixOptions test_opts() {
  ParametrixOptions o;
  o.rel_tol = 1e-6;
  o.s_nodes = 8;
  o.threads = 1;
  return o;
}

struct RefBuild {
  ParametrixState state;
  KernelField field;
};

// one reference-kernel build shared by the parametrix tests
RefBuild& ref_build() {
  static RefBuild* b = [] {
    auto opts = test_opts();
    auto* rb = new RefBuild{ParametrixState(shared_ref_engine(), opts), KernelField{}};
    rb->state.sum_series(opts.rel_tol);
    rb->field = assemble_kernel(shared_ref_engine(), rb->state, opts);
    return rb;
  }();
  return *b;
}

}  // namespace

TEST_CASE("constant kernel: zero seed annihilates the series") {
  auto opts = test_opts();
  ParametrixState state(shared_const_engine(), opts);
  auto cert = state.sum_series(opts.rel_tol);
  CHECK(cert.converged);
  CHECK(cert.terms == 0);
  CHECK(state.q0_sup() == 0.0);
}

TEST_CASE("constant kernel: assembled field matches the closed-form Cauchy") {
  auto opts = test_opts();
  ParametrixState state(shared_const_engine(), opts);
  state.sum_series(opts.rel_tol);
  auto field = assemble_kernel(shared_const_engine(), state, opts);
  const auto& g = field.grid;
  double max_rel = 0.0;
  for (double t : {1.0 / 16, 0.125, 0.25, 0.5}) {
    int k = g.time_index(t);
    for (int i = 0; i < g.n_fine(); ++i) {
      for (int j = 0; j < g.n_fine(); ++j) {
        double v = g.fine(i) - g.fine(j);
        if (std::abs(v) > 8.0) continue;
        double exact = t / (sqr(M_PI * t) + v * v);
        max_rel = std::max(max_rel, std::abs(field.at(k, i, j) - exact) / exact);
      }
    }
  }
  INFO("max relative error = ", max_rel);
  CHECK(max_rel <= 1e-4);
  CHECK(field.negative_clipped == 0);
}

TEST_CASE("picard: q1 at a point against the brute-force double integral") {
  const auto& eng = shared_ref_engine();
  auto opts = test_opts();
  ParametrixState state(eng, opts);
  state.picard_step(1);

  double t = 0.5, x = 0.5, y = -0.25;  // grid nodes (coarse x, fine y)
  const auto& g = eng.grid();
  int xi = g.nearest_coarse(x);
  int yi = g.fine_index(y);
  REQUIRE(g.coarse(xi) == doctest::Approx(x).epsilon(1e-12));
  REQUIRE(g.fine(yi) == doctest::Approx(y).epsilon(1e-12));
  int k = g.time_index(t);
  double got = state.iterate(1).at(k, xi, yi);

  auto q0fn = [&](double u, double a, double b) { return eng.q0(u, a, b); };
  double oracle = q1_brute_force(q0fn, eng.kernel().beta(), eng.kernel().alpha(), t, x, y,
                                 g.extent, 3);
  INFO("picard=", got, " oracle=", oracle);
  CHECK(got == doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("picard: ratio bound decreases like the Beta-rate") {
  const auto& st = ref_build().state.stats();
  REQUIRE(st.size() >= 2);
  double cmax = 0.0;
  for (const auto& s : st) {
    double c = s.ratio / s.rate_factor;
    cmax = std::max(cmax, c);
    INFO("n=", s.n, " ratio=", s.ratio, " B=", s.rate_factor, " C=", c);
    CHECK(std::isfinite(c));
  }
  CHECK(cmax < 10.0);
}

TEST_CASE("series: truncation certificate and monotone stopping") {
  const auto& cert = ref_build().state.certificate();
  INFO("N=", cert.terms, " C=", cert.fitted_constant, " tail=", cert.tail_bound,
       " sup=", cert.series_sup);
  CHECK(cert.converged);
  CHECK(cert.terms <= 8);
  CHECK(cert.tail_bound <= 1e-6 * cert.series_sup);

  const auto& st = ref_build().state.stats();
  auto stop_at = [&](double tol) {
    double cfit = 0.0;
    for (std::size_t i = 0; i < st.size(); ++i) {
      cfit = std::max(cfit, st[i].ratio / st[i].rate_factor);
      double beta = 0.5;
      double rho = cfit * beta_function(beta, (st[i].n + 1) * beta);
      double tail = rho < 1.0 ? st[i].sup_norm * rho / (1.0 - rho) : 1e300;
      if (tail < tol * cert.series_sup) return st[i].n;
    }
    return st.back().n;
  };
  // doubling rel_tol never increases N
  CHECK(stop_at(2e-6) <= stop_at(1e-6));
}

TEST_CASE("series: gamma-rate envelope dominates with one fitted constant") {
  const auto& cert = ref_build().state.certificate();
  const auto& st = ref_build().state.stats();
  double beta = 0.5;
  for (const auto& s : st) {
    double gamma_n = std::pow(cert.envelope_constant * std::tgamma(beta), s.n + 1.0) /
                     std::tgamma((s.n + 1.0) * beta);
    INFO("n=", s.n, " envelope_raw=", s.envelope_raw,
         " c*gamma_n=", cert.envelope_scale * gamma_n);
    CHECK(s.envelope_raw <= 3.0 * cert.envelope_scale * gamma_n);
  }
}

TEST_CASE("assembly: correction term against the brute-force oracle") {
  const auto& eng = shared_ref_engine();
  auto& rb = ref_build();
  const auto& g = eng.grid();
  double t = 0.5, x = 0.25, y = -0.5;
  int k = g.time_index(t);
  int xi = g.fine_index(x), yi = g.fine_index(y);
  std::vector<double> offs = {x - y}, row;
  eng.density_at(point1(y), t, offs, row);
  double corr = rb.field.at(k, xi, yi) - row[0];

  auto qfn = [&](double s, double z, double yy) {
    int yj = g.fine_index(yy);
    return rb.state.q_total(s, z, yj);
  };
  double oracle = correction_brute_force(eng, qfn, t, x, y, g.extent, 2);
  INFO("correction=", corr, " oracle=", oracle);
  CHECK(corr == doctest::Approx(oracle).epsilon(5e-3));
}

TEST_CASE("assembly: correction envelope and small-t diagonal exponent") {
  auto& rb = ref_build();
  const auto& eng = shared_ref_engine();
  const auto& g = eng.grid();
  double alpha = 1.0, beta = 0.5;
  RhoProfile e1{0.0, alpha + beta, alpha, 1};
  RhoProfile e2{beta, alpha, alpha, 1};
  double cmax = 0.0;
  std::vector<double> row, offs(1);
  for (double t : {0.0625, 0.25, 1.0}) {
    int k = g.time_index(t);
    for (double x : {-2.0, 0.25, 1.5}) {
      for (double y : {-1.5, 0.0, 2.25}) {
        int xi = g.fine_index(x), yi = g.fine_index(y);
        offs[0] = g.fine(xi) - g.fine(yi);
        eng.density_at(point1(g.fine(yi)), t, offs, row);
        double corr = rb.field.at(k, xi, yi) - row[0];
        double env = rho1(e1, t, offs[0]) + rho1(e2, t, offs[0]);
        cmax = std::max(cmax, std::abs(corr) / env);
      }
    }
  }
  INFO("correction envelope C = ", cmax);
  CHECK(std::isfinite(cmax));
  CHECK(cmax < 20.0);

  std::vector<double> lt, lp;
  int xi = g.fine_index(0.25);
  for (double t : {1.0 / 32, 1.0 / 16, 0.125, 0.25}) {
    int k = g.time_index(t);
    lt.push_back(std::log(t));
    lp.push_back(std::log(rb.field.at(k, xi, xi)));
  }
  double n = lt.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lt.size(); ++i) {
    sx += lt[i];
    sy += lp[i];
    sxx += lt[i] * lt[i];
    sxy += lt[i] * lp[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  INFO("diagonal growth exponent = ", slope);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("heat residual: constant kernel satisfies the equation") {
  auto opts = test_opts();
  ParametrixState state(shared_const_engine(), opts);
  state.sum_series(opts.rel_tol);
  auto field = assemble_kernel(shared_const_engine(), state, opts);
  for (double t : {0.25, 0.5}) {
    for (double xy : {0.0, 0.5, 2.0, 4.0}) {
      auto rep = heat_residual(field, shared_const_engine(), t, xy, 0.0);
      INFO("t=", t, " x=", xy, " residual=", rep.residual, " envelope=", rep.envelope);
      CHECK(std::abs(rep.residual) <= 5e-3 * rep.envelope);
    }
  }
}

TEST_CASE("heat residual: wrong anchor leaves a q0-sized defect") {
  auto& rb = ref_build();
  const auto& eng = shared_ref_engine();
  double t = 0.25, x = 1.0, y = -0.5;
  auto good = heat_residual(rb.field, eng, t, x, y, false);
  auto bad = heat_residual(rb.field, eng, t, x, y, true);
  double q0_size = std::abs(eng.q0(t, x, y));
  INFO("good=", good.residual, " bad=", bad.residual, " q0=", q0_size);
  CHECK(std::abs(bad.residual) > 3.0 * std::abs(good.residual));
  // the anchor swap changes the generator by (L^{k(x)} - L^{k(y)}) applied
  // to the assembled kernel, i.e. a freezing-defect-sized term
  CHECK(std::abs(bad.generator_value - good.generator_value) ==
        doctest::Approx(q0_size).epsilon(0.35));
}

TEST_CASE("field serialization round-trip") {
  auto& rb = ref_build();
  rb.field.save("/tmp/lvk_field_test.bin");
  auto f2 = KernelField::load("/tmp/lvk_field_test.bin");
  CHECK(f2.values.v == rb.field.values.v);
  CHECK(f2.times == rb.field.times);
  CHECK(f2.kernel_fingerprint == rb.field.kernel_fingerprint);
  f2.export_slice_csv("/tmp/lvk_field_slice.csv", 0.5);
}
