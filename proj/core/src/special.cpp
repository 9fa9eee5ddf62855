#include "levikern/special.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "levikern/quadrature.hpp"

namespace levikern {

double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double beta_function(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw domain_error_at("beta_function: arguments must be positive");
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double stable_levy_constant(int d, double alpha) {
  require(d >= 1, "stable_levy_constant: d >= 1");
  require(alpha > 0.0 && alpha < 2.0, "stable_levy_constant: alpha in (0,2)");
  return alpha * std::pow(2.0, alpha - 1.0) * std::tgamma(0.5 * (d + alpha)) /
         (std::pow(M_PI, 0.5 * d) * std::tgamma(1.0 - 0.5 * alpha));
}

namespace {

// exp(-rho^alpha) has unbounded slope at 0 for alpha<1; tiny leading panels
// keep the cubic interpolation honest there.
std::vector<double> profile_edges(double alpha) {
  double ximax = std::pow(std::log(1e16), 1.0 / alpha);
  return geometric_edges(1e-8, ximax, 1.10);
}

}  // namespace

StableProfile::StableProfile(int d, double alpha) : d_(d), alpha_(alpha) {
  require(d == 1 || d == 2, "StableProfile: d must be 1 or 2");
  require(alpha > 0.0 && alpha < 2.0, "StableProfile: alpha in (0,2)");

  // Asymptotic tail: g(r) ~ (1/pi) sum_k (-1)^{k+1} Gamma(k alpha + 1)/k! *
  // sin(k pi alpha / 2) r^{-k alpha - 1} in d=1; leading term c_{d,alpha}
  // r^{-d-alpha} in general (time-1 jump expansion).
  if (d == 1) {
    auto term = [alpha](int k) {
      return std::tgamma(k * alpha + 1.0) / std::tgamma(k + 1.0) *
             std::sin(0.5 * k * M_PI * alpha) / M_PI;
    };
    tail_coeff1_ = term(1);
    tail_coeff2_ = -term(2);
    tail_coeff3_ = term(3);
  } else {
    tail_coeff1_ = stable_levy_constant(d, alpha);
    tail_coeff2_ = 0.0;
    tail_coeff3_ = 0.0;
  }

  rmax_ = d == 1 ? 64.0 : 32.0;
  dr_ = d == 1 ? 1.0 / 128.0 : 1.0 / 32.0;
  std::size_t n = static_cast<std::size_t>(rmax_ / dr_) + 1;
  vals_.resize(n);

  FilonCosine filon(profile_edges(alpha));
  const auto& nodes = filon.nodes();
  if (d == 1) {
    std::vector<double> f(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      f[i] = std::exp(-std::pow(nodes[i], alpha));
    for (std::size_t k = 0; k < n; ++k)
      vals_[k] = filon.integrate(f, k * dr_) / M_PI;
  } else {
    // g(r) = (1/2pi) int_0^inf J0(r rho) e^{-rho^alpha} rho drho.
    // J0 oscillates with period ~2pi/r; refine panels accordingly.
    for (std::size_t k = 0; k < n; ++k) {
      double r = k * dr_;
      double ximax = std::pow(std::log(1e16), 1.0 / alpha);
      double panel = (r < 1.0) ? 0.35 : std::min(0.35, M_PI / (2.0 * r));
      const QuadRule& gl = gauss_legendre(8);
      double sum = 0.0;
      double lo = 0.0;
      while (lo < ximax) {
        double hi = std::min(ximax, lo + panel);
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
          double rho = mid + half * gl.nodes[q];
          double w = half * gl.weights[q];
          double j0 = (r * rho < 1e-12) ? 1.0 : std::cyl_bessel_j(0.0, r * rho);
          sum += w * j0 * std::exp(-std::pow(rho, alpha)) * rho;
        }
        lo = hi;
      }
      vals_[k] = sum / (2.0 * M_PI);
    }
  }

  if (d == 1) {
    cdf_.resize(n);
    cdf_[0] = 0.5;  // even density
    for (std::size_t k = 1; k < n; ++k)
      cdf_[k] = cdf_[k - 1] + 0.5 * dr_ * (vals_[k - 1] + vals_[k]);
  }
}

double StableProfile::tail_density(double r) const {
  double t1 = tail_coeff1_ * std::pow(r, -d_ - alpha_);
  if (d_ != 1) return t1;
  return t1 + tail_coeff2_ * std::pow(r, -2.0 * alpha_ - 1.0) +
         tail_coeff3_ * std::pow(r, -3.0 * alpha_ - 1.0);
}

double StableProfile::density(double r) const {
  r = std::abs(r);
  if (r >= rmax_ - 2.0 * dr_) return tail_density(r);
  double u = r / dr_;
  std::size_t k = static_cast<std::size_t>(u);
  if (k == 0) k = 1;
  if (k + 2 >= vals_.size()) k = vals_.size() - 3;
  // 4-point Lagrange on nodes k-1..k+2
  double t = u - k;
  double fm = vals_[k - 1], f0 = vals_[k], f1 = vals_[k + 1], f2 = vals_[k + 2];
  double c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  double c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  double c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  double c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return c0 * fm + c1 * f0 + c2 * f1 + c3 * f2;
}

double StableProfile::density_deriv(double r) const {
  double sign = r < 0.0 ? -1.0 : 1.0;
  r = std::abs(r);
  double h = 0.5 * dr_;
  if (r < h) return 0.0;
  return sign * (density(r + h) - density(r - h)) / (2.0 * h);
}

double StableProfile::cdf(double x) const {
  require(d_ == 1, "StableProfile::cdf: d=1 only");
  double ax = std::abs(x);
  double F;
  if (ax >= rmax_ - 2.0 * dr_) {
    // integrate the tail expansion
    double t1 = tail_coeff1_ / alpha_ * std::pow(ax, -alpha_);
    double t2 = tail_coeff2_ / (2.0 * alpha_) * std::pow(ax, -2.0 * alpha_);
    double t3 = tail_coeff3_ / (3.0 * alpha_) * std::pow(ax, -3.0 * alpha_);
    F = 1.0 - (t1 + t2 + t3);
  } else {
    double u = ax / dr_;
    std::size_t k = static_cast<std::size_t>(u);
    double t = u - k;
    F = cdf_[k] + t * (cdf_[std::min(k + 1, cdf_.size() - 1)] - cdf_[k]);
  }
  return x >= 0.0 ? F : 1.0 - F;
}

double StableProfile::quantile(double p) const {
  require(d_ == 1, "StableProfile::quantile: d=1 only");
  require(p > 0.0 && p < 1.0, "StableProfile::quantile: p in (0,1)");
  double lo = -1e9, hi = 1e9;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::shared_ptr<const StableProfile> stable_profile(int d, double alpha) {
  static std::mutex mu;
  static std::map<std::pair<int, long long>, std::shared_ptr<const StableProfile>> cache;
  long long key = static_cast<long long>(alpha * 1e12);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({d, key});
  if (it != cache.end()) return it->second;
  auto p = std::make_shared<const StableProfile>(d, alpha);
  cache[{d, key}] = p;
  return p;
}

}  // namespace levikern
