#include "levikern/symbol.hpp"

#include <algorithm>
#include <cmath>

#include "levikern/quadrature.hpp"
#include "levikern/special.hpp"

namespace levikern {

LevySymbol::LevySymbol(const JumpKernel& kernel, const Point& anchor)
    : d_(kernel.dimension()), alpha_(kernel.alpha()), anchor_(anchor) {
  m_const_ = 1.0 / stable_levy_constant(d_, alpha_);
  c_low_ = kernel.kappa0() * m_const_;
  c_high_ = kernel.kappa1() * m_const_;
  kappa_origin_ = kernel.kappa_at_origin(anchor);
  exact_ = kernel.is_cosine_form();
  if (exact_) {
    coefs_ = kernel.coefficients_at(anchor);
    for (const auto& t : kernel.cosine_terms()) {
      freqs_.push_back(t.freq);
      double w = norm(t.freq, d_);
      if (w > 0.0) kinks_.push_back(w);
    }
    std::sort(kinks_.begin(), kinks_.end());
  } else {
    kernel_ = std::make_shared<const JumpKernel>(kernel);
  }
}

double LevySymbol::operator()(const Point& xi) const {
  if (norm(xi, d_) == 0.0) return 0.0;
  return exact_ ? exact_value(xi) : numeric_value(xi);
}

double LevySymbol::exact_value(const Point& xi) const {
  double s = 0.0;
  for (std::size_t k = 0; k < coefs_.size(); ++k) {
    const Point& w = freqs_[k];
    double mw = norm(w, d_);
    double g;
    if (mw == 0.0) {
      g = std::pow(norm(xi, d_), alpha_);
    } else {
      g = 0.5 * std::pow(norm(add(xi, w), d_), alpha_) +
          0.5 * std::pow(norm(sub(xi, w), d_), alpha_) - std::pow(mw, alpha_);
    }
    s += coefs_[k] * g;
  }
  return m_const_ * s;
}

double LevySymbol::numeric_value(const Point& xi) const {
  return levy_symbol_quadrature(*kernel_, anchor_, xi, 1e-8);
}

namespace {

double symbol_quad_1d(const JumpKernel& k, const Point& y, double q, double rel_tol) {
  // psi(q) = 2 int_0^inf (1 - cos(qz)) ks(z) z^{-1-alpha} dz,
  // ks(z) = (kappa(y,z)+kappa(y,-z))/2.
  const double alpha = k.alpha();
  auto ks = [&](double z) {
    return 0.5 * (k.evaluate(y, point1(z)) + k.evaluate(y, point1(-z)));
  };

  // [0,1]: (1-cos(qz)) z^{-1-alpha} = [(1-cos(qz))/z^2] z^{1-alpha};
  // Gauss-Jacobi soaks up the z^{1-alpha} weight.
  double total = 0.0;
  {
    QuadRule gj = gauss_jacobi01(24, 0.0, 1.0 - alpha);
    for (std::size_t i = 0; i < gj.nodes.size(); ++i) {
      double z = gj.nodes[i];
      double c = q * z < 1e-4 ? 0.5 * q * q * (1.0 - q * q * z * z / 12.0)
                              : (1.0 - std::cos(q * z)) / (z * z);
      total += gj.weights[i] * c * ks(z);
    }
  }
  // [1, Z]: resolve both the cosine and the kernel's own z-scale.
  double scale_err;
  {
    double period = 2.0 * M_PI / std::max(q, 1e-300);
    double panel = std::min(0.35, period / 8.0);
    double Z = 1.0;
    double running = total;
    const QuadRule& gl = gauss_legendre(8);
    long long panels_used = 0;
    const long long panel_cap = 2000000;
    for (;;) {
      double hi = Z + panel;
      double mid = Z + 0.5 * panel, half = 0.5 * panel;
      double sum = 0.0;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        double z = mid + half * gl.nodes[i];
        sum += half * gl.weights[i] * (1.0 - std::cos(q * z)) * ks(z) *
               std::pow(z, -1.0 - alpha);
      }
      running += sum;
      Z = hi;
      ++panels_used;
      // remaining tail: int_Z (1-cos) ks nu <= 2 kappa1 Z^{-alpha}/alpha,
      // and the oscillatory part is bounded by parts as C/(q Z^{1+alpha}).
      double tail_abs = 2.0 * k.kappa1() * std::pow(Z, -alpha) / alpha;
      double tail_osc = 4.0 * k.kappa1() * std::pow(Z, -1.0 - alpha) / std::max(q, 1e-12);
      double tail = std::min(tail_abs, 2.0 * k.kappa1() * std::pow(Z, -alpha) / alpha);
      // Past a few cosine periods the mean of (1-cos) is 1; add the mean
      // tail and keep only the oscillation as error.
      if (std::min(tail, tail_osc) < rel_tol * std::abs(running) || panels_used > panel_cap) {
        // append the mean tail with kernel average approximated at Z
        scale_err = std::min(tail, tail_osc);
        // mean-value tail: int_Z^inf ks(z) z^{-1-alpha} dz by geometric panels
        double tail_sum = 0.0;
        double lo = Z;
        while (lo < Z * 1e6) {
          double hi2 = lo * 1.5;
          double m2 = 0.5 * (lo + hi2), h2 = 0.5 * (hi2 - lo);
          for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            double z = m2 + h2 * gl.nodes[i];
            tail_sum += h2 * gl.weights[i] * ks(z) * std::pow(z, -1.0 - alpha);
          }
          lo = hi2;
          if (k.kappa1() * std::pow(lo, -alpha) / alpha < 0.25 * rel_tol * std::abs(running))
            break;
        }
        if (q * Z > 20.0) running += tail_sum;  // cosine averages out
        total = running;
        break;
      }
    }
  }
  (void)scale_err;
  return 2.0 * total;
}

double symbol_quad_2d(const JumpKernel& k, const Point& y, const Point& xi, double rel_tol) {
  const double alpha = k.alpha();
  double q = norm(xi, 2);
  double thxi = std::atan2(xi[1], xi[0]);
  const int nth = 64;
  const QuadRule& gl = gauss_legendre(8);
  double total = 0.0;
  for (int j = 0; j < nth; ++j) {
    double th = 2.0 * M_PI * (j + 0.5) / nth;
    double wth = 2.0 * M_PI / nth;
    Point dir{std::cos(th), std::sin(th)};
    double proj = q * std::cos(th - thxi);
    auto kr = [&](double r) { return k.evaluate(y, scale(dir, r)); };
    // radial: [0,1] Jacobi then oscillation-resolving panels
    double rad = 0.0;
    {
      QuadRule gj = gauss_jacobi01(16, 0.0, 1.0 - alpha);
      for (std::size_t i = 0; i < gj.nodes.size(); ++i) {
        double r = gj.nodes[i];
        double pr = std::abs(proj) * r;
        double c = pr < 1e-4 ? 0.5 * proj * proj * (1.0 - pr * pr / 12.0)
                             : (1.0 - std::cos(proj * r)) / (r * r);
        rad += gj.weights[i] * c * kr(r);
      }
    }
    double panel = std::min(0.35, 2.0 * M_PI / (8.0 * std::max(std::abs(proj), 1e-12)));
    double Z = 1.0;
    for (;;) {
      double mid = Z + 0.5 * panel, half = 0.5 * panel;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        double r = mid + half * gl.nodes[i];
        rad += half * gl.weights[i] * (1.0 - std::cos(proj * r)) * kr(r) *
               std::pow(r, -1.0 - alpha);
      }
      Z += panel;
      double tail = 2.0 * k.kappa1() * std::pow(Z, -alpha) / alpha;
      if (tail < rel_tol * std::max(std::abs(rad), 1e-30) || Z > 1e4) {
        if (std::abs(proj) * Z > 20.0) {
          // mean tail with kernel at large radius along this direction
          double tail_sum = 0.0;
          double lo = Z;
          for (int step = 0; step < 80; ++step) {
            double hi2 = lo * 1.5;
            double m2 = 0.5 * (lo + hi2), h2 = 0.5 * (hi2 - lo);
            for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
              double r = m2 + h2 * gl.nodes[i];
              tail_sum += h2 * gl.weights[i] * kr(r) * std::pow(r, -1.0 - alpha);
            }
            lo = hi2;
            if (k.kappa1() * std::pow(lo, -alpha) / alpha < 0.1 * rel_tol * std::abs(rad)) break;
          }
          rad += tail_sum;
        }
        break;
      }
    }
    total += wth * rad;
  }
  return total;
}

}  // namespace

double levy_symbol_quadrature(const JumpKernel& kernel, const Point& anchor, const Point& xi,
                              double rel_tol) {
  int d = kernel.dimension();
  double q = norm(xi, d);
  if (q == 0.0) return 0.0;
  if (d == 1) return symbol_quad_1d(kernel, anchor, q, rel_tol);
  return symbol_quad_2d(kernel, anchor, xi, rel_tol);
}

}  // namespace levikern
