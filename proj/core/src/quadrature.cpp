#include "levikern/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>

#include "levikern/special.hpp"

namespace levikern {

namespace {

// Monic Jacobi three-term recurrence coefficients on [-1,1] with weight
// (1-x)^a (1+x)^b (Gautschi's r_jacobi).
struct JacobiCoeffs {
  std::vector<double> alpha, beta;  // beta[0] = mu0 = total weight mass
};

JacobiCoeffs jacobi_coeffs(int n, double a, double b) {
  JacobiCoeffs c;
  c.alpha.resize(n);
  c.beta.resize(n);
  double ab = a + b;
  c.beta[0] = std::pow(2.0, ab + 1.0) * beta_function(a + 1.0, b + 1.0);
  for (int k = 0; k < n; ++k) {
    double kk = k;
    double den = (2.0 * kk + ab) * (2.0 * kk + ab + 2.0);
    c.alpha[k] = (den == 0.0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / den;
    if (k == 1) {
      c.beta[1] = 4.0 * (a + 1.0) * (b + 1.0) / (sqr(ab + 2.0) * (ab + 3.0));
    } else if (k >= 2) {
      c.beta[k] = 4.0 * kk * (kk + a) * (kk + b) * (kk + ab) /
                  (sqr(2.0 * kk + ab) * (2.0 * kk + ab + 1.0) * (2.0 * kk + ab - 1.0));
    }
  }
  return c;
}

// Orthonormal polynomial values p_0..p_n at x; returns p_n.
double orthonormal_eval(const JacobiCoeffs& c, int n, double x, std::vector<double>* all = nullptr) {
  double pm = 0.0;
  double p0 = 1.0 / std::sqrt(c.beta[0]);
  if (all) (*all)[0] = p0;
  for (int k = 0; k < n; ++k) {
    double sb_next = std::sqrt(c.beta[std::min<std::size_t>(k + 1, c.beta.size() - 1)]);
    double sb = k == 0 ? 0.0 : std::sqrt(c.beta[k]);
    double p1 = ((x - c.alpha[k]) * p0 - sb * pm) / sb_next;
    pm = p0;
    p0 = p1;
    if (all && k + 1 <= n) (*all)[k + 1] = p0;
  }
  return p0;
}

QuadRule jacobi_rule_m11(int n, double a, double b) {
  auto c = jacobi_coeffs(n + 1, a, b);
  // Bracket the n simple roots of p_n in (-1,1) by a sign scan, then bisect.
  int scan = std::max(64, 24 * n);
  std::vector<double> roots;
  roots.reserve(n);
  double prev_x = -1.0 + 1e-14;
  double prev_f = orthonormal_eval(c, n, prev_x);
  for (int i = 1; i <= scan && static_cast<int>(roots.size()) < n; ++i) {
    double x = -1.0 + 2.0 * i / scan;
    if (i == scan) x = 1.0 - 1e-14;
    double f = orthonormal_eval(c, n, x);
    if ((prev_f < 0.0) != (f < 0.0)) {
      double lo = prev_x, hi = x, flo = prev_f;
      for (int it = 0; it < 90; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = orthonormal_eval(c, n, mid);
        if ((flo < 0.0) != (fm < 0.0)) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev_f = f;
  }
  require(static_cast<int>(roots.size()) == n, "jacobi_rule: root scan failed");

  QuadRule rule;
  rule.nodes = roots;
  rule.weights.resize(n);
  std::vector<double> pk(n + 1);
  for (int i = 0; i < n; ++i) {
    orthonormal_eval(c, n, roots[i], &pk);
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += pk[k] * pk[k];
    rule.weights[i] = 1.0 / s;
  }
  return rule;
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  return cache.emplace(n, jacobi_rule_m11(n, 0.0, 0.0)).first->second;
}

QuadRule gauss_jacobi01(int n, double a, double b) {
  require(n >= 1, "gauss_jacobi01: n >= 1");
  require(a > -1.0 && b > -1.0, "gauss_jacobi01: exponents > -1");
  QuadRule r = jacobi_rule_m11(n, a, b);
  double norm = std::pow(2.0, a + b + 1.0);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = 0.5 * (1.0 + r.nodes[i]);
    r.weights[i] /= norm;
  }
  return r;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b,
               double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

void adapt(const std::function<double(double)>& f, double a, double fa, double b, double fb,
           double fm, double whole, double tol, int depth, AdaptiveResult& out) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  out.evaluations += 2;
  double left = simpson(f, a, fa, m, fm, flm);
  double right = simpson(f, m, fm, b, fb, frm);
  double err = (left + right - whole) / 15.0;
  if (depth <= 0 || std::abs(err) <= tol) {
    out.value += left + right + err;
    out.error_estimate += std::abs(err);
    if (depth <= 0 && std::abs(err) > tol) out.converged = false;
    return;
  }
  adapt(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1, out);
  adapt(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1, out);
}

}  // namespace

AdaptiveResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                double abs_tol, double rel_tol, int max_depth) {
  AdaptiveResult out;
  if (a == b) return out;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  out.evaluations = 3;
  double whole = simpson(f, a, fa, b, fb, fm);
  double tol = std::max(abs_tol, rel_tol * std::abs(whole));
  adapt(f, a, fa, b, fb, fm, whole, tol, max_depth, out);
  return out;
}

FilonCosine::FilonCosine(std::vector<double> edges) : edges_(std::move(edges)) {
  require(edges_.size() >= 2, "FilonCosine: need at least one panel");
  std::size_t panels = edges_.size() - 1;
  nodes_.reserve(3 * panels + 1);
  for (std::size_t p = 0; p < panels; ++p) {
    double A = edges_[p], h = edges_[p + 1] - edges_[p];
    nodes_.push_back(A);
    nodes_.push_back(A + h / 3.0);
    nodes_.push_back(A + 2.0 * h / 3.0);
  }
  nodes_.push_back(edges_.back());
}

namespace {

// mu_m(theta) = int_0^1 tau^m e^{i theta tau} dtau, m = 0..3.
void cosine_moments(double theta, std::complex<double> mu[4]) {
  const std::complex<double> I(0.0, 1.0);
  if (std::abs(theta) < 0.5) {
    for (int m = 0; m < 4; ++m) {
      std::complex<double> term(1.0, 0.0);
      std::complex<double> sum = term / double(m + 1);
      for (int j = 1; j < 24; ++j) {
        term *= I * theta / double(j);
        std::complex<double> add = term / double(m + j + 1);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
      }
      mu[m] = sum;
    }
    return;
  }
  std::complex<double> eit = std::exp(I * theta);
  mu[0] = (eit - 1.0) / (I * theta);
  for (int m = 1; m < 4; ++m) mu[m] = (eit - double(m) * mu[m - 1]) / (I * theta);
}

}  // namespace

FilonCosine::Prepared FilonCosine::prepare(const std::vector<double>& fvals) const {
  require(fvals.size() == nodes_.size(), "FilonCosine: value count mismatch");
  std::size_t panels = edges_.size() - 1;
  Prepared prep;
  prep.coeffs.resize(4 * panels);
  for (std::size_t p = 0; p < panels; ++p) {
    double f0 = fvals[3 * p], f1 = fvals[3 * p + 1], f2 = fvals[3 * p + 2],
           f3 = fvals[3 * p + 3];
    // cubic through equispaced nodes on [0,1]
    prep.coeffs[4 * p + 0] = f0;
    prep.coeffs[4 * p + 1] = 0.5 * (-11.0 * f0 + 18.0 * f1 - 9.0 * f2 + 2.0 * f3);
    prep.coeffs[4 * p + 2] = 0.5 * (18.0 * f0 - 45.0 * f1 + 36.0 * f2 - 9.0 * f3);
    prep.coeffs[4 * p + 3] = 4.5 * (-f0 + 3.0 * f1 - 3.0 * f2 + f3);
  }
  return prep;
}

double FilonCosine::integrate(const Prepared& prep, double v) const {
  std::size_t panels = edges_.size() - 1;
  std::vector<double> contrib(panels);
  // rotate e^{ivA} incrementally along the contiguous panels
  double ca = std::cos(v * edges_[0]), sa = std::sin(v * edges_[0]);
  for (std::size_t p = 0; p < panels; ++p) {
    double h = edges_[p + 1] - edges_[p];
    const double* c = &prep.coeffs[4 * p];
    double th = v * h;
    double ch = std::cos(th), sh = std::sin(th);
    double mre[4], mim[4];
    if (std::abs(th) < 0.5) {
      for (int m = 0; m < 4; ++m) {
        // series for int_0^1 tau^m e^{i th tau} dtau
        double tre = 1.0, tim = 0.0, sre = 1.0 / (m + 1), sim = 0.0;
        for (int j = 1; j < 20; ++j) {
          double nre = -tim * th / j, nim = tre * th / j;
          tre = nre;
          tim = nim;
          double are = tre / (m + j + 1), aim = tim / (m + j + 1);
          sre += are;
          sim += aim;
          if (std::abs(are) + std::abs(aim) < 1e-18 * (std::abs(sre) + std::abs(sim))) break;
        }
        mre[m] = sre;
        mim[m] = sim;
      }
    } else {
      // mu_0 = (e^{i th} - 1)/(i th); mu_m = (e^{i th} - m mu_{m-1})/(i th)
      double inv = 1.0 / th;
      mre[0] = sh * inv;
      mim[0] = (1.0 - ch) * inv;
      for (int m = 1; m < 4; ++m) {
        double nre = ch - m * mre[m - 1];
        double nim = sh - m * mim[m - 1];
        mre[m] = nim * inv;
        mim[m] = -nre * inv;
      }
    }
    double sre = c[0] * mre[0] + c[1] * mre[1] + c[2] * mre[2] + c[3] * mre[3];
    double sim = c[0] * mim[0] + c[1] * mim[1] + c[2] * mim[2] + c[3] * mim[3];
    contrib[p] = h * (ca * sre - sa * sim);
    double ca2 = ca * ch - sa * sh;
    sa = sa * ch + ca * sh;
    ca = ca2;
  }
  return pairwise_sum(contrib);
}

double FilonCosine::integrate(const std::vector<double>& fvals, double v) const {
  return integrate(prepare(fvals), v);
}

std::vector<double> geometric_edges(double lo, double hi, double ratio,
                                    const std::vector<double>& force) {
  require(lo > 0.0 && hi > lo && ratio > 1.0, "geometric_edges: bad arguments");
  std::vector<double> edges;
  edges.push_back(0.0);
  double x = lo;
  while (x < hi) {
    edges.push_back(x);
    x *= ratio;
  }
  edges.push_back(hi);
  for (double f : force)
    if (f > 0.0 && f < hi) edges.push_back(f);
  std::sort(edges.begin(), edges.end());
  // drop near-duplicates (relative to local scale)
  std::vector<double> out;
  out.reserve(edges.size());
  for (double e : edges) {
    if (out.empty() || e - out.back() > 1e-9 * (1.0 + e)) out.push_back(e);
  }
  return out;
}

}  // namespace levikern
