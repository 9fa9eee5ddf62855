#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "levikern/parallel.hpp"
#include "levikern/parametrix.hpp"
#include "levikern/quadrature.hpp"
#include "levikern/rho.hpp"
#include "levikern/special.hpp"

namespace levikern {

namespace {

double lagrange4(const double f[4], double t) {
  double c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  double c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  double c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  double c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return c0 * f[0] + c1 * f[1] + c2 * f[2] + c3 * f[3];
}

// approximate-identity cell width: the frozen kernel's mass outside three
// coarse cells stays below the tolerance for u <= delta_ai
double ai_cell_width(const FrozenKernelEngine& eng, double mass_tol) {
  const auto& g = eng.grid();
  const double alpha = eng.kernel().alpha();
  auto prof = stable_profile(1, alpha);
  double q = prof->quantile(1.0 - 0.25 * mass_tol);
  double sg = 3.0 * g.dz() / q;
  double M = 1.0 / stable_levy_constant(1, alpha);
  return std::pow(sg, alpha) / (eng.kernel().kappa1() * M);
}

}  // namespace

KernelField assemble_kernel(const FrozenKernelEngine& eng, ParametrixState& state,
                            const ParametrixOptions& opts) {
  const auto& g = eng.grid();
  const double alpha = eng.kernel().alpha();
  const double beta = eng.kernel().beta();
  const int nf = g.n_fine();
  const int nc = g.n_coarse();
  const double dz = g.dz();

  KernelField field;
  field.grid = g;
  field.alpha = alpha;
  field.beta = beta;
  field.kernel_fingerprint = eng.kernel().fingerprint();
  field.times = g.time_slices();
  field.values.resize(static_cast<int>(field.times.size()), nf, nf);
  field.certificate = state.certificate();
  field.iterate_stats = state.stats();
  field.q0_sup = state.q0_sup();

  const int nt = static_cast<int>(field.times.size());
  const bool has_corr = state.q0_sup() > 0.0 && state.iterates_computed() > 0;
  const bool xindep = eng.kernel().is_x_independent();

  // frozen diagonal term p_y(t, x - y), exact anchors
  parallel_for(
      static_cast<std::size_t>(nt),
      [&](std::size_t kk) {
        int k = static_cast<int>(kk);
        double t = field.times[k];
        if (xindep) {
          std::vector<double> offs(2 * nf - 1), row;
          for (int m = 0; m < 2 * nf - 1; ++m) offs[m] = (m - (nf - 1)) * g.dx;
          eng.density_at(point1(0.0), t, offs, row);
          for (int i = 0; i < nf; ++i)
            for (int j = 0; j < nf; ++j) field.values.at(k, i, j) = row[i - j + nf - 1];
        } else {
          std::vector<double> offs(nf), row;
          for (int j = 0; j < nf; ++j) {
            double y = g.fine(j);
            for (int i = 0; i < nf; ++i) offs[i] = g.fine(i) - y;
            eng.density_at(point1(y), t, offs, row);
            for (int i = 0; i < nf; ++i) field.values.at(k, i, j) = row[i];
          }
        }
      },
      opts.threads);

  if (has_corr) {
    const double delta_ai = ai_cell_width(eng, opts.ai_mass_tol);
    parallel_for(
        static_cast<std::size_t>(nt),
        [&](std::size_t kk) {
          int k = static_cast<int>(kk);
          double t = field.times[k];
          // s-nodes: Gauss-Jacobi against the s->0 singularity, geometric
          // refinement toward s = t, approximate-identity final cell
          struct SN {
            double s, w;
          };
          std::vector<SN> snodes;
          {
            double T = 0.5 * t;
            double b = beta / alpha - 1.0;
            QuadRule gj = gauss_jacobi01(opts.s_nodes, 0.0, b);
            for (std::size_t i = 0; i < gj.nodes.size(); ++i)
              snodes.push_back({T * gj.nodes[i], T * gj.weights[i] * std::pow(gj.nodes[i], -b)});
            const QuadRule& gl = gauss_legendre(3);
            double lo = delta_ai;
            while (lo < T) {
              double hi = std::min(T, 2.0 * lo);
              double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
              for (std::size_t i = 0; i < gl.nodes.size(); ++i)
                snodes.push_back({t - (mid + half * gl.nodes[i]), half * gl.weights[i]});
              lo = hi;
            }
          }

          std::vector<double> PU(static_cast<std::size_t>(nf) * nc);
          std::vector<double> QS(static_cast<std::size_t>(nc) * nf);
          std::vector<double> acc(static_cast<std::size_t>(nf) * nf, 0.0);

          for (const auto& sn : snodes) {
            double s = sn.s, u = t - sn.s;
            if (s <= 0.0 || u <= 0.0) continue;
            for (int i = 0; i < nf; ++i) {
              double x = g.fine(i);
              for (int j = 0; j < nc; ++j)
                PU[static_cast<std::size_t>(i) * nc + j] = eng.p(j, u, x - g.coarse(j));
            }
            for (int j = 0; j < nc; ++j) {
              double z = g.coarse(j);
              for (int l = 0; l < nf; ++l)
                QS[static_cast<std::size_t>(j) * nf + l] = state.q_total(s, z, l);
            }
            for (int i = 0; i < nf; ++i) {
              const double* prow = &PU[static_cast<std::size_t>(i) * nc];
              double* arow = &acc[static_cast<std::size_t>(i) * nf];
              for (int j = 0; j < nc; ++j) {
                double wz = (j == 0 || j == nc - 1) ? 0.5 * dz : dz;
                double c = sn.w * wz * prow[j];
                const double* qrow = &QS[static_cast<std::size_t>(j) * nf];
                for (int l = 0; l < nf; ++l) arow[l] += c * qrow[l];
              }
            }

            // window corrections
            double up = std::pow(u, 1.0 / alpha);
            double sp = std::pow(s, 1.0 / alpha);
            double W = 2.0 * dz;
            bool xw = up < dz;
            bool yw = sp < dz;

            auto coarse_window = [&](int i, int l, double center) {
              double c = 0.0;
              for (int j = 0; j < nc; ++j) {
                if (std::abs(g.coarse(j) - center) > W) continue;
                double wz = (j == 0 || j == nc - 1) ? 0.5 * dz : dz;
                c += wz * PU[static_cast<std::size_t>(i) * nc + j] *
                     QS[static_cast<std::size_t>(j) * nf + l];
              }
              return c;
            };

            if (xw) {
              for (int i = 0; i < nf; ++i) {
                double x = g.fine(i);
                if (x - W < -g.extent || x + W > g.extent) continue;
                int anc = g.nearest_coarse(x);
                double M0 = 1.0 - eng.mass_outside(anc, u, W);
                double M2 = eng.second_moment_inside(anc, u, W);
                for (int l = 0; l < nf; ++l) {
                  if (yw && std::abs(x - g.fine(l)) <= 2.0 * W) continue;
                  double zpos = (x + g.extent) / dz;
                  int j0 = std::max(1, std::min(nc - 2, static_cast<int>(std::round(zpos))));
                  double gv, gd, gdd;
                  if (std::abs(g.coarse(j0) - x) < 1e-12) {
                    gv = QS[static_cast<std::size_t>(j0) * nf + l];
                    gd = (QS[static_cast<std::size_t>(j0 + 1) * nf + l] -
                          QS[static_cast<std::size_t>(j0 - 1) * nf + l]) /
                         (2.0 * dz);
                    gdd = (QS[static_cast<std::size_t>(j0 + 1) * nf + l] -
                           2.0 * gv + QS[static_cast<std::size_t>(j0 - 1) * nf + l]) /
                          (dz * dz);
                  } else {
                    gv = state.q_total(s, x, l);
                    gd = (state.q_total(s, x + dz, l) - state.q_total(s, x - dz, l)) /
                         (2.0 * dz);
                    gdd = (state.q_total(s, x + dz, l) - 2.0 * gv +
                           state.q_total(s, x - dz, l)) /
                          (dz * dz);
                  }
                  double refined = M0 * gv + 0.5 * M2 * gdd;
                  (void)gd;  // first moment of the even density vanishes
                  acc[static_cast<std::size_t>(i) * nf + l] +=
                      sn.w * (refined - coarse_window(i, l, x));
                }
              }
            }
            if (yw) {
              for (int l = 0; l < nf; ++l) {
                double fy = g.fine(l);
                if (fy - W < -g.extent || fy + W > g.extent) continue;
                double m[3];
                double sg = std::pow(s * eng.kernel().kappa1() /
                                         stable_levy_constant(1, alpha),
                                     1.0 / alpha);
                const int li = l;
                auto F = [&](double r) { return state.q_total(s, fy + r, li); };
                // windowed moments of q(s, ., y) around y
                {
                  const QuadRule& gl = gauss_legendre(8);
                  m[0] = m[1] = m[2] = 0.0;
                  double sgl = std::max(std::min(sg, W / 8.0), W / 512.0);
                  std::vector<double> edges = {0.0, 2.0 * sgl, 8.0 * sgl};
                  double lo = edges.back();
                  while (lo < W) {
                    lo = std::min(W, 2.0 * lo);
                    edges.push_back(lo);
                  }
                  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
                  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
                    double mid = 0.5 * (edges[e] + edges[e + 1]);
                    double half = 0.5 * (edges[e + 1] - edges[e]);
                    if (half <= 0.0) continue;
                    for (std::size_t qq = 0; qq < gl.nodes.size(); ++qq) {
                      double r = mid + half * gl.nodes[qq];
                      double w = half * gl.weights[qq];
                      double fp = F(r), fm = F(-r);
                      m[0] += w * (fp + fm);
                      m[1] += w * r * (fp - fm);
                      m[2] += w * r * r * (fp + fm);
                    }
                  }
                }
                for (int i = 0; i < nf; ++i) {
                  double x = g.fine(i);
                  if (xw && std::abs(x - fy) <= 2.0 * W) continue;
                  int anc = g.nearest_coarse(fy);
                  auto pf = [&](double zz) { return eng.p(anc, u, x - zz); };
                  double fv = pf(fy);
                  double fd = (pf(fy + dz) - pf(fy - dz)) / (2.0 * dz);
                  double fdd = (pf(fy + dz) - 2.0 * fv + pf(fy - dz)) / (dz * dz);
                  double refined = m[0] * fv + m[1] * fd + 0.5 * m[2] * fdd;
                  acc[static_cast<std::size_t>(i) * nf + l] +=
                      sn.w * (refined - coarse_window(i, l, fy));
                }
              }
            }
            if (xw && yw) {
              for (int i = 0; i < nf; ++i) {
                double x = g.fine(i);
                for (int l = 0; l < nf; ++l) {
                  double fy = g.fine(l);
                  if (std::abs(x - fy) > 2.0 * W) continue;
                  double lo = std::min(x, fy) - W, hi = std::max(x, fy) + W;
                  if (lo < -g.extent || hi > g.extent) continue;
                  std::vector<double> edges = {lo, hi, x, fy};
                  for (double c : {x, fy}) {
                    double w = std::max((c == x ? up : sp) * 0.5, 1e-9);
                    while (w < 2.0 * dz) {
                      if (c - w > lo) edges.push_back(c - w);
                      if (c + w < hi) edges.push_back(c + w);
                      w *= 2.0;
                    }
                  }
                  std::sort(edges.begin(), edges.end());
                  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
                  const QuadRule& gl = gauss_legendre(6);
                  double refined = 0.0;
                  int anc = g.nearest_coarse(x);
                  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
                    double mid = 0.5 * (edges[e] + edges[e + 1]);
                    double half = 0.5 * (edges[e + 1] - edges[e]);
                    if (half <= 0.0) continue;
                    for (std::size_t qq = 0; qq < gl.nodes.size(); ++qq) {
                      double zz = mid + half * gl.nodes[qq];
                      int anz = g.nearest_coarse(zz);
                      (void)anc;
                      refined += half * gl.weights[qq] * eng.p(anz, u, x - zz) *
                                 state.q_total(s, zz, l);
                    }
                  }
                  double coarse = 0.0;
                  for (int j = 0; j < nc; ++j) {
                    if (g.coarse(j) < lo || g.coarse(j) > hi) continue;
                    double wz = (j == 0 || j == nc - 1) ? 0.5 * dz : dz;
                    coarse += wz * PU[static_cast<std::size_t>(i) * nc + j] *
                              QS[static_cast<std::size_t>(j) * nf + l];
                  }
                  acc[static_cast<std::size_t>(i) * nf + l] += sn.w * (refined - coarse);
                }
              }
            }
          }

          // approximate-identity cell [t - delta_ai, t]
          {
            double sb = t - 0.5 * delta_ai;
            double u_ai = 0.5 * delta_ai;
            for (int i = 0; i < nf; ++i) {
              double x = g.fine(i);
              int anc = g.nearest_coarse(x);
              double M0 = 1.0 - eng.mass_outside(anc, u_ai, 3.0 * dz);
              double M2 = eng.second_moment_inside(anc, u_ai, 3.0 * dz);
              for (int l = 0; l < nf; ++l) {
                double qv = state.q_total(sb, x, l);
                double qp = state.q_total(sb, std::min(x + dz, g.extent), l);
                double qm = state.q_total(sb, std::max(x - dz, -g.extent), l);
                double qdd = (qp - 2.0 * qv + qm) / (dz * dz);
                acc[static_cast<std::size_t>(i) * nf + l] +=
                    delta_ai * (M0 * qv + 0.5 * M2 * qdd);
              }
            }
          }

          for (int i = 0; i < nf; ++i)
            for (int l = 0; l < nf; ++l)
              field.values.at(k, i, l) += acc[static_cast<std::size_t>(i) * nf + l];
        },
        opts.threads);
  }

  // nonnegativity: clip quadrature noise, flag anything real
  double most_negative = 0.0;
  int clipped = 0;
  for (double& v : field.values.v) {
    if (v < 0.0) {
      most_negative = std::min(most_negative, v);
      if (v < -1e-6)
        throw std::runtime_error("assemble_kernel: negative value " + std::to_string(v) +
                                 " below the -1e-6 floor (assembly accuracy)");
      v = 0.0;
      ++clipped;
    }
  }
  field.negative_clipped = clipped;
  field.most_negative = most_negative;
  return field;
}

double KernelField::interp(double t, double x, double y) const {
  const auto& g = grid;
  int nt = static_cast<int>(times.size());
  double dlog = std::log(times[1] / times[0]);
  double mu = std::log(t / times[0]) / dlog;
  int m = std::max(1, std::min(nt - 3, static_cast<int>(std::floor(mu))));
  double tt = mu - m;

  double fx = (x + g.extent) / g.dx;
  double fy = (y + g.extent) / g.dx;
  int i = std::max(1, std::min(g.n_fine() - 3, static_cast<int>(fx)));
  int j = std::max(1, std::min(g.n_fine() - 3, static_cast<int>(fy)));
  double tx = fx - i, ty = fy - j;

  double ft[4];
  for (int a = 0; a < 4; ++a) {
    int k = m - 1 + a;
    double fr[4];
    for (int b = 0; b < 4; ++b) {
      double fc[4];
      for (int c = 0; c < 4; ++c) fc[c] = values.at(k, i - 1 + b, j - 1 + c);
      fr[b] = lagrange4(fc, ty);
    }
    ft[a] = lagrange4(fr, tx);
  }
  return lagrange4(ft, tt);
}

GridFunction1D KernelField::x_slice(const FrozenKernelEngine& eng, double t, double y) const {
  const auto& g = grid;
  int nf = g.n_fine();
  std::vector<double> vals(nf);
  // exact table reads when t is on the ladder
  int k = g.time_index(t);
  bool on_slice = std::abs(times[k] - t) < 1e-12 * t;
  int j = g.fine_index(y);
  bool on_node = std::abs(g.fine(j) - y) < 1e-12;
  for (int i = 0; i < nf; ++i)
    vals[i] = (on_slice && on_node) ? values.at(k, i, j) : interp(t, g.fine(i), y);
  const JumpKernel& kern = eng.kernel();
  double alpha = kern.alpha();
  auto tail = [&kern, alpha, t, y](double x) {
    double v = y - x;
    if (std::abs(v) < 1e-9) return 0.0;
    return t * kern.evaluate(point1(x), point1(v)) * std::pow(std::abs(v), -1.0 - alpha);
  };
  return GridFunction1D(g.extent, nf, std::move(vals), tail);
}

ResidualReport heat_residual(const KernelField& field, const FrozenKernelEngine& eng,
                             double t, double x, double y, bool anchor_at_y) {
  const auto& g = field.grid;
  require(t >= field.times[1] && t <= field.times[field.times.size() - 2],
          "heat_residual: t must be one time cell inside the ladder");
  require(std::abs(x) < g.extent - 1.0 && std::abs(y) < g.extent - 1.0,
          "heat_residual: point too close to the grid edge");

  ResidualReport rep;
  rep.t = t;
  rep.x = x;
  rep.y = y;

  // nonuniform central difference across the neighboring slices
  int k = g.time_index(t);
  k = std::max(1, std::min(static_cast<int>(field.times.size()) - 2, k));
  double tm = field.times[k - 1], t0 = field.times[k], tp = field.times[k + 1];
  double fm = field.interp(tm, x, y), f0 = field.interp(t0, x, y),
         fp = field.interp(tp, x, y);
  double hm = t0 - tm, hp = tp - t0;
  rep.dp_dt =
      (fp * hm * hm - fm * hp * hp + f0 * (hp * hp - hm * hm)) / (hm * hp * (hm + hp));

  auto slice = field.x_slice(eng, t0, y);
  Point anchor = point1(anchor_at_y ? y : x);
  rep.generator_value = apply_frozen_operator_checked(eng.kernel(), anchor, slice, x, g);
  rep.residual = rep.dp_dt - rep.generator_value;
  RhoProfile env{0.0, 0.0, field.alpha, 1};
  rep.envelope = rho1(env, t0, x - y);
  return rep;
}

void KernelField::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "KernelField::save: cannot open " + path);
  const char magic[4] = {'L', 'V', 'K', 'F'};
  os.write(magic, 4);
  std::uint32_t version = 1;
  os.write(reinterpret_cast<const char*>(&version), 4);
  os.write(reinterpret_cast<const char*>(&grid), sizeof(SpaceTimeGrid));
  os.write(reinterpret_cast<const char*>(&alpha), 8);
  os.write(reinterpret_cast<const char*>(&beta), 8);
  os.write(reinterpret_cast<const char*>(&config_hash), 8);
  std::uint32_t fp_len = kernel_fingerprint.size();
  os.write(reinterpret_cast<const char*>(&fp_len), 4);
  os.write(kernel_fingerprint.data(), fp_len);
  std::uint32_t nt = times.size(), nx = values.nx, ny = values.ny;
  os.write(reinterpret_cast<const char*>(&nt), 4);
  os.write(reinterpret_cast<const char*>(&nx), 4);
  os.write(reinterpret_cast<const char*>(&ny), 4);
  os.write(reinterpret_cast<const char*>(times.data()), 8 * nt);
  os.write(reinterpret_cast<const char*>(values.v.data()), 8 * values.v.size());
  os.write(reinterpret_cast<const char*>(&negative_clipped), 4);
  os.write(reinterpret_cast<const char*>(&most_negative), 8);
  os.write(reinterpret_cast<const char*>(&certificate), sizeof(TruncationCertificate));
  os.write(reinterpret_cast<const char*>(&q0_sup), 8);
}

KernelField KernelField::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "KernelField::load: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  require(std::memcmp(magic, "LVKF", 4) == 0, "KernelField::load: bad magic");
  std::uint32_t version;
  is.read(reinterpret_cast<char*>(&version), 4);
  KernelField f;
  is.read(reinterpret_cast<char*>(&f.grid), sizeof(SpaceTimeGrid));
  is.read(reinterpret_cast<char*>(&f.alpha), 8);
  is.read(reinterpret_cast<char*>(&f.beta), 8);
  is.read(reinterpret_cast<char*>(&f.config_hash), 8);
  std::uint32_t fp_len;
  is.read(reinterpret_cast<char*>(&fp_len), 4);
  f.kernel_fingerprint.resize(fp_len);
  is.read(f.kernel_fingerprint.data(), fp_len);
  std::uint32_t nt, nx, ny;
  is.read(reinterpret_cast<char*>(&nt), 4);
  is.read(reinterpret_cast<char*>(&nx), 4);
  is.read(reinterpret_cast<char*>(&ny), 4);
  f.times.resize(nt);
  is.read(reinterpret_cast<char*>(f.times.data()), 8 * nt);
  f.values.resize(nt, nx, ny);
  is.read(reinterpret_cast<char*>(f.values.v.data()), 8 * f.values.v.size());
  is.read(reinterpret_cast<char*>(&f.negative_clipped), 4);
  is.read(reinterpret_cast<char*>(&f.most_negative), 8);
  is.read(reinterpret_cast<char*>(&f.certificate), sizeof(TruncationCertificate));
  is.read(reinterpret_cast<char*>(&f.q0_sup), 8);
  require(is.good(), "KernelField::load: truncated file");
  return f;
}

void KernelField::export_slice_csv(const std::string& path, double t) const {
  std::ofstream os(path);
  require(os.good(), "KernelField::export_slice_csv: cannot open " + path);
  int k = grid.time_index(t);
  os << "x,y,p\n";
  char buf[96];
  int jc = grid.n_fine() / 2;
  for (int i = 0; i < grid.n_fine(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.12g\n", grid.fine(i), grid.fine(jc),
                  values.at(k, i, jc));
    os << buf;
  }
}

}  // namespace levikern
