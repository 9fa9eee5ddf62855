#include "levikern/frozen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>

#include "levikern/parallel.hpp"
#include "levikern/quadrature.hpp"
#include "levikern/rho.hpp"

namespace levikern {

namespace detail {

namespace {

double lagrange4(const double f[4], double t) {
  // nodes at -1, 0, 1, 2
  double c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  double c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  double c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  double c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return c0 * f[0] + c1 * f[1] + c2 * f[2] + c3 * f[3];
}

double taper(double w) {
  if (w <= 2.0) return 0.0;
  if (w >= 4.0) return 1.0;
  double s = 0.5 * (w - 2.0);
  return s * s * (3.0 - 2.0 * s);
}

// G_omega(xi) = (m(xi+w) + m(xi-w))/2 - m(w) with m(h) = M |h|^alpha.
double g_weight(double M, double alpha, double xi, double omega) {
  if (omega == 0.0) return M * std::pow(std::abs(xi), alpha);
  return M * (0.5 * std::pow(std::abs(xi + omega), alpha) +
              0.5 * std::pow(std::abs(xi - omega), alpha) - std::pow(omega, alpha));
}

}  // namespace

double AnchorTables::Slice::eval(const std::vector<double>& f, double v) const {
  v = std::abs(v);
  int n = static_cast<int>(nodes.size());
  // locate the segment, 4-point Lagrange on the true (nonuniform) nodes
  int i = static_cast<int>(std::upper_bound(nodes.begin(), nodes.end(), v) - nodes.begin()) - 1;
  i = std::max(1, std::min(n - 3, i));
  const double* xs = nodes.data() + (i - 1);
  const double* fs = f.data() + (i - 1);
  double r = 0.0;
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) l *= (v - xs[b]) / (xs[a] - xs[b]);
    r += l * fs[a];
  }
  return r;
}

AnchorTables::AnchorTables(const JumpKernel& k, const Point& anchor, const SpaceTimeGrid& grid,
                           double u_lo, double slice_ratio)
    : kernel_(std::make_shared<const JumpKernel>(k)),
      anchor_(anchor),
      d_(k.dimension()),
      alpha_(k.alpha()),
      psi_(k, anchor),
      u_lo_(u_lo),
      ratio_(slice_ratio) {
  require(d_ == 1, "AnchorTables: d=1 only");
  require(k.is_cosine_form(), "AnchorTables: cosine-form kernel required");
  vmax_ = 2.0 * grid.extent + 4.0 * grid.dz();
  coefs_ = k.coefficients_at(anchor);
  for (const auto& t : k.cosine_terms()) freqs_.push_back(t.freq);
  nfam_ = coefs_.size();
  profile_ = stable_profile(d_, alpha_);

  const double M = 1.0 / stable_levy_constant(d_, alpha_);
  const double dz = grid.dz();
  const double dx = grid.dx;

  int n_slices = static_cast<int>(std::round(std::log(1.0 / u_lo) / std::log(ratio_))) + 1;
  slices_.resize(n_slices);

  for (int m = 0; m < n_slices; ++m) {
    Slice& sl = slices_[m];
    sl.u = std::min(1.0, u_lo * std::pow(ratio_, m));
    double sg = sigma(sl.u);

    // peak-resolving uniform zone, then a spacing-capped geometric ladder
    // out to the model crossover (v beyond that uses the jump-tail model)
    double V1 = std::min(8.0 * sg, vmax_);
    double h1 = sg / 6.0;
    double V2 = std::min(std::max(48.0 * sg, 8.0 * dz), vmax_);
    sl.nodes.clear();
    for (double v = 0.0; v < V1; v += h1) sl.nodes.push_back(v);
    double v = V1;
    while (v < V2 * 1.1 + 3.0 * dx) {
      sl.nodes.push_back(v);
      v = std::min(v * 1.06, v + 0.35);
    }
    sl.nodes.push_back(v);

    // frequency panels: resolve e^{-u psi}; the weights kink at the cosine
    // frequencies
    double ximax = std::pow(std::log(1e14) / (sl.u * psi_.c_low()), 1.0 / alpha_);
    auto edges = geometric_edges(1e-4, ximax, 1.10, psi_.kink_frequencies());
    FilonCosine filon(edges);
    const auto& nodes = filon.nodes();

    std::vector<double> expv(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      expv[i] = std::exp(-sl.u * psi_(point1(nodes[i])));

    // family 0 is p itself, then one R family per cosine term
    sl.vals.assign(1 + nfam_, std::vector<double>(sl.nodes.size()));
    std::vector<FilonCosine::Prepared> preps(1 + nfam_);
    preps[0] = filon.prepare(expv);
    std::vector<double> fw(nodes.size());
    for (std::size_t fam = 0; fam < nfam_; ++fam) {
      double om = norm(freqs_[fam], d_);
      for (std::size_t i = 0; i < nodes.size(); ++i)
        fw[i] = g_weight(M, alpha_, nodes[i], om) * expv[i];
      preps[1 + fam] = filon.prepare(fw);
    }

    for (std::size_t idx = 0; idx < sl.nodes.size(); ++idx) {
      for (std::size_t fam = 0; fam < sl.vals.size(); ++fam)
        sl.vals[fam][idx] = filon.integrate(preps[fam], sl.nodes[idx]) / M_PI;
    }
  }
}

double AnchorTables::sigma(double u) const {
  double M = 1.0 / stable_levy_constant(d_, alpha_);
  return std::pow(u * psi_.kappa_origin() * M, 1.0 / alpha_);
}

double AnchorTables::symbol_shift() const {
  // large-xi behavior of the cosine-form symbol:
  // psi(xi) -> kappa(y,0) m(xi) - sum_k a_k m(omega_k)
  double M = 1.0 / stable_levy_constant(d_, alpha_);
  double s = 0.0;
  for (std::size_t k = 0; k < nfam_; ++k) {
    double om = norm(freqs_[k], d_);
    if (om > 0.0) s += coefs_[k] * M * std::pow(om, alpha_);
  }
  return s;
}

double AnchorTables::p_model(double u, double v) const {
  double sg = sigma(u);
  double w = std::abs(v) / sg;
  double amp = std::exp(u * symbol_shift());
  double base = amp * profile_->density(w) / sg;
  if (v != 0.0 && w > 2.0) {
    double dk = kernel_->evaluate(anchor_, point1(v)) - amp * psi_.kappa_origin();
    base += u * dk * std::pow(std::abs(v), -d_ - alpha_) * taper(w);
  }
  return base;
}

double AnchorTables::rk_model(std::size_t family, double u, double v) const {
  double M = 1.0 / stable_levy_constant(d_, alpha_);
  double sg = sigma(u);
  double w = std::abs(v) / sg;
  double k0 = psi_.kappa_origin();
  double amp = std::exp(u * symbol_shift());
  double g = profile_->density(w);
  double gp = profile_->density_deriv(w);
  double term1 = amp * (d_ * g + w * gp) / (alpha_ * k0 * u * sg);  // includes sg^{-d}
  double om = norm(freqs_[family], d_);
  double term2 = -amp * M * std::pow(om, alpha_) * g / sg;
  double term3 = 0.0;
  if (om > 0.0 && v != 0.0 && w > 2.0)
    term3 = (1.0 - std::cos(om * v)) * std::pow(std::abs(v), -d_ - alpha_) * taper(w);
  return term1 + term2 + term3;
}

double AnchorTables::interp_u(std::size_t family, double u, double v, bool log_interp) const {
  // 4-point Lagrange across the slice ladder in log u
  double mu = std::log(u / u_lo_) / std::log(ratio_);
  int n = static_cast<int>(slices_.size());
  int m = static_cast<int>(std::floor(mu));
  m = std::max(1, std::min(n - 3, m));
  double t = mu - m;

  // beyond the stored crossover of the lowest stencil slice, the jump-tail
  // model is the accurate representation
  if (std::abs(v) > slices_[m - 1].top()) {
    return family == 0 ? p_model(u, v) : rk_model(family - 1, u, v);
  }

  double f[4];
  bool positive = true;
  for (int j = 0; j < 4; ++j) {
    f[j] = slices_[m - 1 + j].eval(slices_[m - 1 + j].vals[family], v);
    positive = positive && f[j] > 0.0;
  }
  if (log_interp && positive) {
    double lf[4] = {std::log(f[0]), std::log(f[1]), std::log(f[2]), std::log(f[3])};
    return std::exp(lagrange4(lf, t));
  }
  return lagrange4(f, t);
}

double AnchorTables::p(double u, double v) const {
  require(u > 0.0, "AnchorTables::p: u > 0");
  if (u < u_lo_) return p_model(u, v);
  return interp_u(0, std::min(u, 1.0), v, true);
}

double AnchorTables::rk(std::size_t family, double u, double v) const {
  require(family < nfam_, "AnchorTables::rk: family out of range");
  if (u < u_lo_) return rk_model(family, u, v);
  return interp_u(1 + family, std::min(u, 1.0), v, false);
}

double AnchorTables::dp_dt(double u, double v) const {
  double s = 0.0;
  for (std::size_t k = 0; k < nfam_; ++k) s += coefs_[k] * rk(k, u, v);
  return -s;
}

}  // namespace detail

FrozenKernelEngine::FrozenKernelEngine(const JumpKernel& kernel, const SpaceTimeGrid& grid,
                                       int threads)
    : kernel_(std::make_shared<const JumpKernel>(kernel)), grid_(grid) {
  grid_.validate();
  require(kernel.dimension() == 1, "FrozenKernelEngine: d=1 (use frozen_density_2d for d=2)");
  require(kernel.is_cosine_form(),
          "FrozenKernelEngine: parametrix path requires a cosine-form kernel");
  u_lo_ = grid_.t_min;
  ratio_ = std::pow(2.0, 1.0 / grid_.slices_per_octave);

  int n = grid_.n_coarse();
  tables_.resize(n);

  // anchors with identical local coefficients share tables (constant
  // kernels collapse to a single build)
  std::vector<std::string> keys(n);
  for (int j = 0; j < n; ++j) {
    auto a = kernel_->coefficients_at(point1(grid_.coarse(j)));
    std::string key;
    char buf[32];
    for (double c : a) {
      std::snprintf(buf, sizeof(buf), "%.15g,", c);
      key += buf;
    }
    keys[j] = key;
  }
  std::map<std::string, int> first;
  std::vector<int> rep(n, -1);
  std::vector<int> build_list;
  for (int j = 0; j < n; ++j) {
    auto it = first.find(keys[j]);
    if (it == first.end()) {
      first[keys[j]] = j;
      rep[j] = j;
      build_list.push_back(j);
    } else {
      rep[j] = it->second;
    }
  }
  std::vector<std::shared_ptr<const detail::AnchorTables>> built(n);
  parallel_for(
      build_list.size(),
      [&](std::size_t i) {
        int j = build_list[i];
        built[j] = std::make_shared<const detail::AnchorTables>(
            *kernel_, point1(grid_.coarse(j)), grid_, u_lo_, ratio_);
      },
      threads);
  for (int j = 0; j < n; ++j) tables_[j] = built[rep[j]];

  std::size_t nk = kernel_->n_terms();
  coarse_coefs_.resize(static_cast<std::size_t>(n) * nk);
  for (int j = 0; j < n; ++j)
    kernel_->coefficients_at(point1(grid_.coarse(j)), &coarse_coefs_[j * nk]);
  fine_coefs_.resize(static_cast<std::size_t>(grid_.n_fine()) * nk);
  for (int j = 0; j < grid_.n_fine(); ++j)
    kernel_->coefficients_at(point1(grid_.fine(j)), &fine_coefs_[j * nk]);
}

double FrozenKernelEngine::p(int anchor, double u, double v) const {
  return tables_[anchor]->p(u, v);
}

double FrozenKernelEngine::dp_dt(int anchor, double u, double v) const {
  return tables_[anchor]->dp_dt(u, v);
}

double FrozenKernelEngine::q0(double u, double x, double z) const {
  return q0_anchored(grid_.nearest_coarse(z), u, x, z);
}

double FrozenKernelEngine::q0_anchored(int anchor, double u, double x, double z) const {
  double ax[8], az[8];
  require(kernel_->n_terms() <= 8, "q0: too many cosine terms");
  kernel_->coefficients_at(point1(x), ax);
  kernel_->coefficients_at(point1(z), az);
  return q0_coeffs(anchor, u, x - z, ax, az);
}

double FrozenKernelEngine::q0_coeffs(int anchor, double u, double v, const double* ax,
                                     const double* az) const {
  const auto& tab = *tables_[anchor];
  double s = 0.0;
  for (std::size_t k = 0; k < kernel_->n_terms(); ++k) {
    double da = ax[k] - az[k];
    if (da != 0.0) s += da * tab.rk(k, u, v);
  }
  return -s;
}

double FrozenKernelEngine::q0_window_moments(double u, double x, double w,
                                             double out_m[3]) const {
  int anchor = grid_.nearest_coarse(x);
  double sg = std::max(tables_[anchor]->sigma(u), w / 64.0);
  out_m[0] = out_m[1] = out_m[2] = 0.0;
  const QuadRule& gl = gauss_legendre(8);
  std::vector<double> edges = {0.0, std::min(2.0 * sg, w), std::min(8.0 * sg, w)};
  double lo = edges.back();
  while (lo < w) {
    lo = std::min(w, lo * 2.0);
    edges.push_back(lo);
  }
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    double mid = 0.5 * (edges[e] + edges[e + 1]), half = 0.5 * (edges[e + 1] - edges[e]);
    if (half <= 0.0) continue;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      double r = mid + half * gl.nodes[i];
      double wq = half * gl.weights[i];
      double qp = q0(u, x, x - r);  // z left of x:  v = +r
      double qm = q0(u, x, x + r);  // z right of x: v = -r
      out_m[0] += wq * (qp + qm);
      out_m[1] += wq * r * (qm - qp);  // moment in (z - x)
      out_m[2] += wq * r * r * (qp + qm);
    }
  }
  return out_m[0];
}

void FrozenKernelEngine::density_at(const Point& y, double u, const std::vector<double>& offsets,
                                    std::vector<double>& out) const {
  LevySymbol psi(*kernel_, y);
  double ximax = std::pow(std::log(1e14) / (u * psi.c_low()), 1.0 / kernel_->alpha());
  auto edges = geometric_edges(1e-4, ximax, 1.08, psi.kink_frequencies());
  FilonCosine filon(edges);
  const auto& nodes = filon.nodes();
  std::vector<double> f(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) f[i] = std::exp(-u * psi(point1(nodes[i])));
  auto prep = filon.prepare(f);
  out.resize(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i)
    out[i] = filon.integrate(prep, offsets[i]) / M_PI;
}

double FrozenKernelEngine::mass_outside(int anchor, double u, double w) const {
  const auto& tab = *tables_[anchor];
  double sg = tab.sigma(u);
  if (u < u_floor()) {
    // model: profile CDF plus the kernel-shape tail correction
    auto prof = stable_profile(1, kernel_->alpha());
    double mass = 2.0 * (1.0 - prof->cdf(w / sg));
    const QuadRule& gl = gauss_legendre(8);
    double lo = w;
    double corr = 0.0;
    for (int step = 0; step < 60; ++step) {
      double hi = lo * 1.6;
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        double v = mid + half * gl.nodes[i];
        double dk = kernel_->evaluate(point1(grid_.coarse(anchor)), point1(v)) -
                    tab.symbol().kappa_origin();
        corr += 2.0 * half * gl.weights[i] * u * dk * std::pow(v, -1.0 - kernel_->alpha());
      }
      lo = hi;
      if (u * kernel_->kappa1() * std::pow(lo, -kernel_->alpha()) < 1e-12) break;
    }
    return std::max(0.0, mass + corr);
  }
  const QuadRule& gl = gauss_legendre(12);
  std::vector<double> edges = {0.0, std::min(sg, w), std::min(4.0 * sg, w)};
  double lo = edges.back();
  while (lo < w) {
    lo = std::min(w, lo * 1.8);
    edges.push_back(lo);
  }
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  double mass_in = 0.0;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    double mid = 0.5 * (edges[e] + edges[e + 1]), half = 0.5 * (edges[e + 1] - edges[e]);
    if (half <= 0.0) continue;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      double v = mid + half * gl.nodes[i];
      mass_in += 2.0 * half * gl.weights[i] * tab.p(u, v);
    }
  }
  return std::max(0.0, 1.0 - mass_in);
}

double FrozenKernelEngine::second_moment_inside(int anchor, double u, double w) const {
  const auto& tab = *tables_[anchor];
  double sg = tab.sigma(u);
  const QuadRule& gl = gauss_legendre(12);
  std::vector<double> edges = {0.0, std::min(sg, w), std::min(4.0 * sg, w)};
  double lo = edges.back();
  while (lo < w) {
    lo = std::min(w, lo * 1.8);
    edges.push_back(lo);
  }
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  double m2 = 0.0;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    double mid = 0.5 * (edges[e] + edges[e + 1]), half = 0.5 * (edges[e + 1] - edges[e]);
    if (half <= 0.0) continue;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      double v = mid + half * gl.nodes[i];
      m2 += 2.0 * half * gl.weights[i] * v * v * tab.p(u, v);
    }
  }
  return m2;
}

double FrozenKernelEngine::levy_tail_density(int anchor, double u, double v) const {
  if (v == 0.0) return 0.0;
  return u * kernel_->evaluate(point1(grid_.coarse(anchor)), point1(v)) *
         std::pow(std::abs(v), -1.0 - kernel_->alpha());
}

double tail_mass_beyond(const JumpKernel& k, const Point& anchor, double t, double R) {
  require(k.dimension() == 1, "tail_mass_beyond: d=1");
  const double alpha = k.alpha();
  const double M = 1.0 / stable_levy_constant(1, alpha);
  // mean local intensity: the zero-frequency coefficient carries the whole
  // integrated tail mass; the oscillating terms self-cancel
  double a0 = k.kappa_at_origin(anchor);
  if (k.is_cosine_form()) {
    auto coefs = k.coefficients_at(anchor);
    const auto& terms = k.cosine_terms();
    for (std::size_t i = 0; i < terms.size(); ++i)
      if (norm(terms[i].freq, 1) == 0.0) a0 = coefs[i];
  }
  double sg = std::pow(t * a0 * M, 1.0 / alpha);
  auto prof = stable_profile(1, alpha);
  double mass = 2.0 * (1.0 - prof->cdf(R / sg));
  // kernel-shape correction: t (kappa(y,v) - a0) nu(v) beyond R, panels
  // capped to resolve the cosine structure, remainder bounded by parts
  const QuadRule& gl = gauss_legendre(8);
  double lo = R;
  double V = std::max(4.0 * R, 128.0);
  while (lo < V) {
    double hi = std::min(V, lo + std::min(0.35, 0.2 * lo));
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      double v = mid + half * gl.nodes[i];
      double dk = k.evaluate(anchor, point1(v)) - a0;
      mass += 2.0 * half * gl.weights[i] * t * dk * std::pow(v, -1.0 - alpha);
    }
    lo = hi;
  }
  return mass;
}

FrozenKernelTable FrozenKernelEngine::make_table(const Point& anchor,
                                                 const std::vector<double>& times,
                                                 double v_extent, double dv) const {
  FrozenKernelTable tab;
  tab.d = 1;
  tab.alpha = kernel_->alpha();
  tab.anchor = anchor;
  tab.times = times;
  tab.v_extent = v_extent;
  tab.dv = dv;
  int n = tab.n_offsets();
  tab.values.resize(times.size() * n);
  std::vector<double> offs(n);
  for (int i = 0; i < n; ++i) offs[i] = tab.offset(i);

  RhoProfile env{0.0, kernel_->alpha(), kernel_->alpha(), 1};
  double clow = 1e300, chigh = 0.0, defect = 0.0;
  std::vector<double> row;
  for (std::size_t k = 0; k < times.size(); ++k) {
    density_at(anchor, times[k], offs, row);
    for (int i = 0; i < n; ++i) tab.values[k * n + i] = row[i];
    // mass by peak-aware quadrature of the inversion (the uniform table
    // cannot resolve the small-t peak), plus the jump-tail correction
    double mass = 0.0;
    {
      LevySymbol psi_a(*kernel_, anchor);
      double sg = std::pow(times[k] * psi_a.kappa_origin() /
                               stable_levy_constant(1, kernel_->alpha()),
                           1.0 / kernel_->alpha());
      const QuadRule& glm = gauss_legendre(10);
      std::vector<double> qed = {0.0, std::min(sg, v_extent), std::min(6.0 * sg, v_extent)};
      double qlo = qed.back();
      while (qlo < v_extent) {
        qlo = std::min(v_extent, qlo * 1.7);
        qed.push_back(qlo);
      }
      qed.erase(std::unique(qed.begin(), qed.end()), qed.end());
      std::vector<double> qnodes;
      for (std::size_t e = 0; e + 1 < qed.size(); ++e) {
        double mid = 0.5 * (qed[e] + qed[e + 1]), half = 0.5 * (qed[e + 1] - qed[e]);
        if (half <= 0.0) continue;
        for (std::size_t i = 0; i < glm.nodes.size(); ++i)
          qnodes.push_back(mid + half * glm.nodes[i]);
      }
      std::vector<double> qvals;
      density_at(anchor, times[k], qnodes, qvals);
      std::size_t qi = 0;
      for (std::size_t e = 0; e + 1 < qed.size(); ++e) {
        double half = 0.5 * (qed[e + 1] - qed[e]);
        if (half <= 0.0) continue;
        for (std::size_t i = 0; i < glm.nodes.size(); ++i)
          mass += 2.0 * half * glm.weights[i] * qvals[qi++];
      }
    }
    mass += tail_mass_beyond(*kernel_, anchor, times[k], v_extent);
    defect = std::max(defect, std::abs(mass - 1.0));
    for (int i = 0; i < n; ++i) {
      double r = tab.value(k, i) / rho1(env, times[k], tab.offset(i));
      clow = std::min(clow, r);
      chigh = std::max(chigh, r);
    }
  }
  tab.mass_defect_max = defect;
  tab.comparability_low = clow;
  tab.comparability_high = chigh;
  return tab;
}

FrozenKernelTable frozen_density(const JumpKernel& k, const Point& anchor, double t,
                                 const SpaceTimeGrid& grid) {
  require(t > 0.0 && t <= 1.0, "frozen_density: t in (0,1]");
  grid.validate();
  if (k.dimension() == 2)
    throw std::invalid_argument("frozen_density: use frozen_density_2d for d=2 tables");
  FrozenKernelEngine eng(k, grid, 1);
  auto tab = eng.make_table(anchor, {t}, 2.0 * grid.extent, grid.dx);
  if (tab.mass_defect_max > 1e-3)
    throw std::runtime_error("frozen_density: spatial extent too small for t (mass defect " +
                             std::to_string(tab.mass_defect_max) + ")");
  return tab;
}

std::vector<double> frozen_density_2d(const JumpKernel& k, const Point& anchor, double t,
                                      const std::vector<double>& v1,
                                      const std::vector<double>& v2) {
  require(k.dimension() == 2, "frozen_density_2d: d=2 kernel required");
  require(k.is_cosine_form(), "frozen_density_2d: cosine-form kernel required");
  LevySymbol psi(k, anchor);
  // the tensor cosine transform needs the symbol even in each coordinate
  for (double a : {0.7, 1.9}) {
    for (double b : {0.4, 2.3}) {
      double v = psi(point2(a, b));
      require(std::abs(v - psi(point2(-a, b))) < 1e-10 * (1.0 + v) &&
                  std::abs(v - psi(point2(a, -b))) < 1e-10 * (1.0 + v),
              "frozen_density_2d: symbol not even per coordinate");
    }
  }
  double ximax = std::pow(std::log(1e12) / (t * psi.c_low()), 1.0 / k.alpha());
  auto edges = geometric_edges(1e-3, ximax, 1.12, psi.kink_frequencies());
  FilonCosine filon(edges);
  const auto& nodes = filon.nodes();

  // stage 1: for each xi2 node, invert over xi1 at all v1
  std::vector<std::vector<double>> g(nodes.size(), std::vector<double>(v1.size()));
  std::vector<double> f(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      f[i] = std::exp(-t * psi(point2(nodes[i], nodes[j])));
    auto prep = filon.prepare(f);
    for (std::size_t a = 0; a < v1.size(); ++a) g[j][a] = filon.integrate(prep, v1[a]);
  }
  // stage 2: outer transform over xi2; the quarter-plane integral covers
  // all of R^2 through the per-coordinate evenness (factor 4 / (2pi)^2)
  std::vector<double> out(v1.size() * v2.size());
  std::vector<double> h(nodes.size());
  for (std::size_t a = 0; a < v1.size(); ++a) {
    for (std::size_t j = 0; j < nodes.size(); ++j) h[j] = g[j][a];
    auto prep = filon.prepare(h);
    for (std::size_t b = 0; b < v2.size(); ++b)
      out[a * v2.size() + b] = filon.integrate(prep, v2[b]) / (M_PI * M_PI);
  }
  return out;
}

void FrozenKernelTable::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "FrozenKernelTable::save: cannot open " + path);
  const char magic[4] = {'L', 'V', 'K', 'T'};
  os.write(magic, 4);
  std::uint32_t version = 1, nd = d, nt = times.size(), nv = n_offsets();
  os.write(reinterpret_cast<const char*>(&version), 4);
  os.write(reinterpret_cast<const char*>(&nd), 4);
  os.write(reinterpret_cast<const char*>(&nt), 4);
  os.write(reinterpret_cast<const char*>(&nv), 4);
  os.write(reinterpret_cast<const char*>(&alpha), 8);
  os.write(reinterpret_cast<const char*>(anchor.data()), 16);
  os.write(reinterpret_cast<const char*>(&v_extent), 8);
  os.write(reinterpret_cast<const char*>(&dv), 8);
  os.write(reinterpret_cast<const char*>(&mass_defect_max), 8);
  os.write(reinterpret_cast<const char*>(&comparability_low), 8);
  os.write(reinterpret_cast<const char*>(&comparability_high), 8);
  os.write(reinterpret_cast<const char*>(times.data()), 8 * times.size());
  os.write(reinterpret_cast<const char*>(values.data()), 8 * values.size());
}

FrozenKernelTable FrozenKernelTable::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "FrozenKernelTable::load: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  require(std::memcmp(magic, "LVKT", 4) == 0, "FrozenKernelTable::load: bad magic");
  std::uint32_t version, nd, nt, nv;
  is.read(reinterpret_cast<char*>(&version), 4);
  is.read(reinterpret_cast<char*>(&nd), 4);
  is.read(reinterpret_cast<char*>(&nt), 4);
  is.read(reinterpret_cast<char*>(&nv), 4);
  FrozenKernelTable tab;
  tab.d = nd;
  is.read(reinterpret_cast<char*>(&tab.alpha), 8);
  is.read(reinterpret_cast<char*>(tab.anchor.data()), 16);
  is.read(reinterpret_cast<char*>(&tab.v_extent), 8);
  is.read(reinterpret_cast<char*>(&tab.dv), 8);
  is.read(reinterpret_cast<char*>(&tab.mass_defect_max), 8);
  is.read(reinterpret_cast<char*>(&tab.comparability_low), 8);
  is.read(reinterpret_cast<char*>(&tab.comparability_high), 8);
  tab.times.resize(nt);
  is.read(reinterpret_cast<char*>(tab.times.data()), 8 * nt);
  tab.values.resize(static_cast<std::size_t>(nt) * nv);
  is.read(reinterpret_cast<char*>(tab.values.data()), 8 * tab.values.size());
  require(is.good(), "FrozenKernelTable::load: truncated file");
  return tab;
}

void FrozenKernelTable::export_csv(const std::string& path) const {
  std::ofstream os(path);
  require(os.good(), "FrozenKernelTable::export_csv: cannot open " + path);
  os << "t,offset,p\n";
  char buf[96];
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (int i = 0; i < n_offsets(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", times[k], offset(i), value(k, i));
      os << buf;
    }
  }
}

}  // namespace levikern
