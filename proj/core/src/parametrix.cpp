#include "levikern/parametrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levikern/parallel.hpp"
#include "levikern/quadrature.hpp"
#include "levikern/rho.hpp"
#include "levikern/special.hpp"

namespace levikern {

double Tensor3::sup_abs() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace {

// int_{|r|<=W} F(r) r^m dr for m = 0,1,2 with panels refined at the given
// peak scale around r = 0
void window_moments(const std::function<double(double)>& F, double scale, double W,
                    double out[3]) {
  out[0] = out[1] = out[2] = 0.0;
  double sg = std::max(std::min(scale, W / 8.0), W / 512.0);
  const QuadRule& gl = gauss_legendre(8);
  std::vector<double> edges = {0.0, 2.0 * sg, 8.0 * sg};
  double lo = edges.back();
  while (lo < W) {
    lo = std::min(W, 2.0 * lo);
    edges.push_back(lo);
  }
  edges.erase(std::remove_if(edges.begin(), edges.end(), [&](double e) { return e > W; }),
              edges.end());
  edges.push_back(W);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    double mid = 0.5 * (edges[e] + edges[e + 1]), half = 0.5 * (edges[e + 1] - edges[e]);
    if (half <= 0.0) continue;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      double r = mid + half * gl.nodes[i];
      double w = half * gl.weights[i];
      double fp = F(r), fm = F(-r);
      out[0] += w * (fp + fm);
      out[1] += w * r * (fp - fm);
      out[2] += w * r * r * (fp + fm);
    }
  }
}

double lagrange4(const double f[4], double t) {
  double c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  double c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  double c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  double c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return c0 * f[0] + c1 * f[1] + c2 * f[2] + c3 * f[3];
}

}  // namespace

ParametrixState::ParametrixState(const FrozenKernelEngine& engine, ParametrixOptions opts)
    : engine_(&engine), opts_(opts) {
  times_ = engine.grid().time_slices();
  qc_sum_.resize(static_cast<int>(times_.size()), engine.grid().n_coarse(),
                 engine.grid().n_fine());
}

std::vector<ParametrixState::SNode> ParametrixState::s_quadrature(double t, int n) const {
  const double alpha = engine_->kernel().alpha();
  const double beta = engine_->kernel().beta();
  std::vector<SNode> nodes;
  double T = 0.5 * t;
  // left half: the inner iterate carries s^{n beta/alpha - 1}
  {
    double b = std::min(n * beta / alpha - 1.0, 0.0);
    QuadRule gj = gauss_jacobi01(opts_.s_nodes, 0.0, b);
    for (std::size_t i = 0; i < gj.nodes.size(); ++i)
      nodes.push_back({T * gj.nodes[i], T * gj.weights[i] * std::pow(gj.nodes[i], -b)});
  }
  // right half: the outer q0 carries (t-s)^{beta/alpha - 1}
  {
    double b = beta / alpha - 1.0;
    QuadRule gj = gauss_jacobi01(opts_.s_nodes, 0.0, b);
    for (std::size_t i = 0; i < gj.nodes.size(); ++i)
      nodes.push_back({t - T * gj.nodes[i], T * gj.weights[i] * std::pow(gj.nodes[i], -b)});
  }
  return nodes;
}

void ParametrixState::materialize_q0(double u, std::vector<double>& out) const {
  const auto& g = engine_->grid();
  int nc = g.n_coarse();
  std::size_t nk = engine_->n_terms();
  const double* cc = engine_->coarse_coefs().data();
  out.resize(static_cast<std::size_t>(nc) * nc);
  for (int i = 0; i < nc; ++i) {
    double x = g.coarse(i);
    for (int j = 0; j < nc; ++j)
      out[static_cast<std::size_t>(i) * nc + j] =
          engine_->q0_coeffs(j, u, x - g.coarse(j), cc + i * nk, cc + j * nk);
  }
}

double ParametrixState::qprev_eval(int n, double s, int zc, int yf) const {
  const Tensor3& tab = tables_[n - 1];
  const double t_min = times_.front();
  const double beta = engine_->kernel().beta();
  const double alpha = engine_->kernel().alpha();
  if (s < t_min)
    return tab.at(0, zc, yf) * std::pow(s / t_min, n * beta / alpha);
  double dlog = std::log(times_[1] / times_[0]);
  double mu = std::log(s / t_min) / dlog;
  int nt = static_cast<int>(times_.size());
  int m = std::max(1, std::min(nt - 3, static_cast<int>(std::floor(mu))));
  double tt = mu - m;
  double f[4] = {tab.at(m - 1, zc, yf), tab.at(m, zc, yf), tab.at(m + 1, zc, yf),
                 tab.at(m + 2, zc, yf)};
  return lagrange4(f, tt);
}

double ParametrixState::q_iterate_interp_z(int n, double s, double z, int yf) const {
  const auto& g = engine_->grid();
  double dz = g.dz();
  double pos = (z + g.extent) / dz;
  int j = std::max(1, std::min(g.n_coarse() - 3, static_cast<int>(pos)));
  double tz = pos - j;
  double f[4];
  for (int a = 0; a < 4; ++a) f[a] = qprev_eval(n, s, j - 1 + a, yf);
  return lagrange4(f, tz);
}

void ParametrixState::picard_step(int n) {
  require(n >= 1 && n == static_cast<int>(tables_.size()) + 1,
          "picard_step: iterates must be computed in order");
  const auto& g = engine_->grid();
  const double alpha = engine_->kernel().alpha();
  const double beta = engine_->kernel().beta();
  const double dz = g.dz();
  const int nt = static_cast<int>(times_.size());
  const int nc = g.n_coarse();
  const int nf = g.n_fine();

  Tensor3 out;
  out.resize(nt, nc, nf);

  parallel_for(
      static_cast<std::size_t>(nt),
      [&](std::size_t kk) {
        int k = static_cast<int>(kk);
        double t = times_[k];
        auto snodes = s_quadrature(t, n);
        std::vector<double> Q0;
        std::vector<double> QP(static_cast<std::size_t>(nc) * nf);
        std::vector<double> acc(static_cast<std::size_t>(nc) * nf, 0.0);

        for (const auto& sn : snodes) {
          double s = sn.s, u = t - sn.s;
          if (u <= 0.0 || s <= 0.0) continue;
          materialize_q0(u, Q0);
          {
            std::size_t nk = engine_->n_terms();
            const double* cc = engine_->coarse_coefs().data();
            const double* cf = engine_->fine_coefs().data();
            for (int j = 0; j < nc; ++j) {
              double z = g.coarse(j);
              for (int y = 0; y < nf; ++y) {
                QP[static_cast<std::size_t>(j) * nf + y] =
                    (n == 1) ? engine_->q0_coeffs(g.nearest_coarse(g.fine(y)), s,
                                                  z - g.fine(y), cc + j * nk, cf + y * nk)
                             : qprev_eval(n - 1, s, j, y);
              }
            }
          }
          for (int i = 0; i < nc; ++i) {
            const double* q0row = &Q0[static_cast<std::size_t>(i) * nc];
            double* arow = &acc[static_cast<std::size_t>(i) * nf];
            for (int j = 0; j < nc; ++j) {
              double wz = (j == 0 || j == nc - 1) ? 0.5 * dz : dz;
              double c = sn.weight * wz * q0row[j];
              if (c == 0.0) continue;
              const double* qprow = &QP[static_cast<std::size_t>(j) * nf];
              for (int y = 0; y < nf; ++y) arow[y] += c * qprow[y];
            }
          }

          // window corrections where the coarse z-grid cannot resolve the
          // factor peaks
          double up = std::pow(u, 1.0 / alpha);
          double sp = std::pow(s, 1.0 / alpha);
          double W = 2.0 * dz;
          bool xwin = up < dz;
          bool ywin = (n == 1) && sp < dz;

          auto coarse_window_sum = [&](int i, int y, double center) {
            double c = 0.0;
            for (int j = 0; j < nc; ++j) {
              if (std::abs(g.coarse(j) - center) > W) continue;
              double wz = (j == 0 || j == nc - 1) ? 0.5 * dz : dz;
              c += wz * Q0[static_cast<std::size_t>(i) * nc + j] *
                   QP[static_cast<std::size_t>(j) * nf + y];
            }
            return c;
          };

          if (xwin) {
            for (int i = 0; i < nc; ++i) {
              double x = g.coarse(i);
              if (x - W < -g.extent || x + W > g.extent) continue;
              double m[3];
              window_moments([&](double r) { return engine_->q0(u, x, x + r); },
                             engine_->tables(i).sigma(u), W, m);
              for (int y = 0; y < nf; ++y) {
                if (ywin && std::abs(x - g.fine(y)) <= 2.0 * W) continue;  // merged below
                const double* qp = QP.data();
                double gv = qp[static_cast<std::size_t>(i) * nf + y];
                double gp1 = qp[static_cast<std::size_t>(std::min(i + 1, nc - 1)) * nf + y];
                double gm1 = qp[static_cast<std::size_t>(std::max(i - 1, 0)) * nf + y];
                double gd = (gp1 - gm1) / (2.0 * dz);
                double gdd = (gp1 - 2.0 * gv + gm1) / (dz * dz);
                double refined = m[0] * gv + m[1] * gd + 0.5 * m[2] * gdd;
                acc[static_cast<std::size_t>(i) * nf + y] +=
                    sn.weight * (refined - coarse_window_sum(i, y, x));
              }
            }
          }
          if (ywin) {
            for (int y = 0; y < nf; ++y) {
              double fy = g.fine(y);
              if (fy - W < -g.extent || fy + W > g.extent) continue;
              double m[3];
              window_moments([&](double r) { return engine_->q0(s, fy + r, fy); },
                             engine_->tables(g.nearest_coarse(fy)).sigma(s), W, m);
              for (int i = 0; i < nc; ++i) {
                double x = g.coarse(i);
                if (xwin && std::abs(x - fy) <= 2.0 * W) continue;
                auto f = [&](double zz) { return engine_->q0(u, x, zz); };
                double fv = f(fy);
                double fd = (f(fy + dz) - f(fy - dz)) / (2.0 * dz);
                double fdd = (f(fy + dz) - 2.0 * fv + f(fy - dz)) / (dz * dz);
                double refined = m[0] * fv + m[1] * fd + 0.5 * m[2] * fdd;
                acc[static_cast<std::size_t>(i) * nf + y] +=
                    sn.weight * (refined - coarse_window_sum(i, y, fy));
              }
            }
          }
          if (xwin && ywin) {
            // both peaks in one neighborhood: refined product quadrature
            for (int i = 0; i < nc; ++i) {
              double x = g.coarse(i);
              for (int y = 0; y < nf; ++y) {
                double fy = g.fine(y);
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
                for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
                  double mid = 0.5 * (edges[e] + edges[e + 1]);
                  double half = 0.5 * (edges[e + 1] - edges[e]);
                  if (half <= 0.0) continue;
                  for (std::size_t qq = 0; qq < gl.nodes.size(); ++qq) {
                    double zz = mid + half * gl.nodes[qq];
                    double inner = (n == 1) ? engine_->q0(s, zz, fy)
                                            : q_iterate_interp_z(n - 1, s, zz, y);
                    refined += half * gl.weights[qq] * engine_->q0(u, x, zz) * inner;
                  }
                }
                // covers both single windows for this (x,y) pair
                double lo_c = lo, hi_c = hi;
                double coarse = 0.0;
                for (int j = 0; j < nc; ++j) {
                  if (g.coarse(j) < lo_c || g.coarse(j) > hi_c) continue;
                  double wz = (j == 0 || j == nc - 1) ? 0.5 * dz : dz;
                  coarse += wz * Q0[static_cast<std::size_t>(i) * nc + j] *
                            QP[static_cast<std::size_t>(j) * nf + y];
                }
                acc[static_cast<std::size_t>(i) * nf + y] += sn.weight * (refined - coarse);
              }
            }
          }
        }
        for (int i = 0; i < nc; ++i)
          for (int y = 0; y < nf; ++y)
            out.at(k, i, y) = acc[static_cast<std::size_t>(i) * nf + y];
      },
      opts_.threads);

  IterateStats st;
  st.n = n;
  st.sup_norm = out.sup_abs();
  double prev = n == 1 ? q0_sup_ : stats_.back().sup_norm;
  st.ratio = prev > 0.0 ? st.sup_norm / prev : 0.0;
  st.rate_factor = beta_function(beta / alpha, n * beta / alpha);
  RhoProfile e1{0.0, (n + 1) * beta, alpha, 1};
  RhoProfile e2{beta, n * beta, alpha, 1};
  double emax = 0.0;
  for (int k = 0; k < nt; ++k) {
    for (int i = 0; i < nc; ++i) {
      for (int y = 0; y < nf; ++y) {
        double v = g.coarse(i) - g.fine(y);
        double env = rho1(e1, times_[k], v) + rho1(e2, times_[k], v);
        emax = std::max(emax, std::abs(out.at(k, i, y)) / env);
      }
    }
  }
  st.envelope_raw = emax;
  stats_.push_back(st);

  for (std::size_t idx = 0; idx < out.v.size(); ++idx) qc_sum_.v[idx] += out.v[idx];
  tables_.push_back(std::move(out));
}

double ParametrixState::q_correction(double s, double z, int y_index) const {
  if (tables_.empty()) return 0.0;
  const auto& g = engine_->grid();
  const double t_min = times_.front();
  const double beta = engine_->kernel().beta();
  const double alpha = engine_->kernel().alpha();
  double dz = g.dz();
  double pos = (z + g.extent) / dz;
  int j = std::max(1, std::min(g.n_coarse() - 3, static_cast<int>(pos)));
  double tz = pos - j;

  auto col = [&](int zc) {
    if (s < t_min) return qc_sum_.at(0, zc, y_index) * std::pow(s / t_min, beta / alpha);
    double dlog = std::log(times_[1] / times_[0]);
    double mu = std::log(s / t_min) / dlog;
    int nt = static_cast<int>(times_.size());
    int m = std::max(1, std::min(nt - 3, static_cast<int>(std::floor(mu))));
    double tt = mu - m;
    double f[4] = {qc_sum_.at(m - 1, zc, y_index), qc_sum_.at(m, zc, y_index),
                   qc_sum_.at(m + 1, zc, y_index), qc_sum_.at(m + 2, zc, y_index)};
    return lagrange4(f, tt);
  };
  double f[4] = {col(j - 1), col(j), col(j + 1), col(j + 2)};
  return lagrange4(f, tz);
}

double ParametrixState::q_total(double s, double z, int y_index) const {
  return engine_->q0(s, z, engine_->grid().fine(y_index)) + q_correction(s, z, y_index);
}

const TruncationCertificate& ParametrixState::sum_series(double rel_tol) {
  const auto& g = engine_->grid();
  const double alpha = engine_->kernel().alpha();
  const double beta = engine_->kernel().beta();

  if (engine_->kernel().is_x_independent()) {
    cert_ = TruncationCertificate{};
    cert_.converged = true;
    return cert_;
  }

  // q0 sup over the tensor nodes
  {
    double m = 0.0;
    for (double t : times_) {
      for (int i = 0; i < g.n_coarse(); ++i) {
        double x = g.coarse(i);
        for (int y = 0; y < g.n_fine(); y += 2)
          m = std::max(m, std::abs(engine_->q0(t, x, g.fine(y))));
      }
    }
    q0_sup_ = m;
  }
  if (q0_sup_ == 0.0) {
    cert_ = TruncationCertificate{};
    cert_.converged = true;
    return cert_;
  }

  cert_ = TruncationCertificate{};
  for (int n = 1; n <= opts_.max_iterates; ++n) {
    picard_step(n);
    const auto& st = stats_.back();
    double series_sup = q0_sup_ + qc_sum_.sup_abs();
    double cfit = 0.0;
    for (const auto& s : stats_) cfit = std::max(cfit, s.ratio / s.rate_factor);
    double rho_next = cfit * beta_function(beta / alpha, (n + 1) * beta / alpha);
    double tail = rho_next < 1.0 ? st.sup_norm * rho_next / (1.0 - rho_next)
                                 : std::numeric_limits<double>::infinity();
    cert_.terms = n;
    cert_.fitted_constant = cfit;
    cert_.tail_bound = tail;
    cert_.series_sup = series_sup;
    if (tail < rel_tol * series_sup || st.sup_norm == 0.0) {
      cert_.converged = true;
      break;
    }
  }

  // Gamma-rate envelope fit: log e_n + lgamma((n+1)b) ~ (n+1) log(C G(b)) + log c
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& s : stats_) {
      if (s.envelope_raw <= 0.0) continue;
      double x = s.n + 1.0;
      double y = std::log(s.envelope_raw) + std::lgamma((s.n + 1.0) * beta);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++cnt;
    }
    if (cnt >= 2) {
      double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
      double inter = (sy - slope * sx) / cnt;
      cert_.envelope_constant = std::exp(slope) / std::tgamma(beta);
      cert_.envelope_scale = std::exp(inter);
    } else if (cnt == 1) {
      // single iterate: attribute everything to the scale at C = ratio fit
      double c = std::max(cert_.fitted_constant, 1e-12);
      cert_.envelope_constant = c;
      cert_.envelope_scale = stats_[0].envelope_raw * std::tgamma(2.0 * beta) /
                             sqr(c * std::tgamma(beta));
    }
  }
  return cert_;
}

}  // namespace levikern
