#include "levikern/jump_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levikern/parallel.hpp"
#include "levikern/rng.hpp"
#include "levikern/special.hpp"

namespace levikern {

namespace {

void check_params(int d, double alpha, double beta, double k0, double k1, double k2) {
  require(d == 1 || d == 2, "JumpKernel: dimension must be 1 or 2");
  require(alpha > 0.0 && alpha < 2.0, "JumpKernel: alpha out of (0,2)");
  require(beta > 0.0 && beta < 1.0, "JumpKernel: beta out of (0,1)");
  require(k0 > 0.0 && k1 >= k0, "JumpKernel: need 0 < kappa0 <= kappa1");
  require(k2 >= 0.0, "JumpKernel: kappa2 >= 0");
}

}  // namespace

JumpKernel JumpKernel::constant(int d, double alpha, double value) {
  require(value > 0.0, "JumpKernel::constant: value > 0");
  CosineTerm t;
  t.coef_is_constant = true;
  t.coef_value = value;
  t.coef_text = std::to_string(value);
  t.coef = [value](const Point&) { return value; };
  // beta is irrelevant for a constant kernel; 0.5 keeps contracts valid.
  return cosine_form(d, alpha, 0.5, value, value, 0.0, {t}, "constant");
}

JumpKernel JumpKernel::cosine_form(int d, double alpha, double beta, double kappa0,
                                   double kappa1, double kappa2, std::vector<CosineTerm> terms,
                                   std::string name) {
  check_params(d, alpha, beta, kappa0, kappa1, kappa2);
  require(!terms.empty(), "JumpKernel::cosine_form: no terms");
  JumpKernel k;
  k.d_ = d;
  k.alpha_ = alpha;
  k.beta_ = beta;
  k.kappa0_ = kappa0;
  k.kappa1_ = kappa1;
  k.kappa2_ = kappa2;
  k.cosine_ = true;
  k.x_independent_ = true;
  for (const auto& t : terms)
    if (!t.coef_is_constant) k.x_independent_ = false;
  k.terms_ = std::move(terms);
  k.name_ = std::move(name);
  auto terms_copy = k.terms_;
  int dim = d;
  k.eval_ = [terms_copy, dim](const Point& x, const Point& z) {
    double s = 0.0;
    for (const auto& t : terms_copy) {
      double a = t.coef_is_constant ? t.coef_value : t.coef(x);
      double ph = dot(t.freq, z, dim);
      s += a * std::cos(ph);
    }
    return s;
  };
  return k;
}

JumpKernel JumpKernel::free_form(int d, double alpha, double beta, double kappa0, double kappa1,
                                 double kappa2,
                                 std::function<double(const Point&, const Point&)> f,
                                 std::string name) {
  check_params(d, alpha, beta, kappa0, kappa1, kappa2);
  JumpKernel k;
  k.d_ = d;
  k.alpha_ = alpha;
  k.beta_ = beta;
  k.kappa0_ = kappa0;
  k.kappa1_ = kappa1;
  k.kappa2_ = kappa2;
  k.cosine_ = false;
  k.x_independent_ = false;
  k.eval_ = std::move(f);
  k.name_ = std::move(name);
  return k;
}

double JumpKernel::evaluate(const Point& x, const Point& z) const { return eval_(x, z); }

std::vector<double> JumpKernel::coefficients_at(const Point& x) const {
  std::vector<double> a(terms_.size());
  coefficients_at(x, a.data());
  return a;
}

void JumpKernel::coefficients_at(const Point& x, double* out) const {
  require(cosine_, "JumpKernel: not cosine-form");
  for (std::size_t i = 0; i < terms_.size(); ++i)
    out[i] = terms_[i].coef_is_constant ? terms_[i].coef_value : terms_[i].coef(x);
}

double JumpKernel::kappa_at_origin(const Point& x) const {
  if (cosine_) {
    double s = 0.0;
    for (const auto& t : terms_)
      s += t.coef_is_constant ? t.coef_value : t.coef(x);
    return s;
  }
  return eval_(x, {1e-9, 0.0});
}

std::string JumpKernel::fingerprint() const {
  std::ostringstream os;
  os << name_ << "|d=" << d_ << "|a=" << alpha_ << "|b=" << beta_ << "|k0=" << kappa0_
     << "|k1=" << kappa1_ << "|k2=" << kappa2_;
  if (cosine_) {
    for (const auto& t : terms_)
      os << "|t:" << t.coef_text << "@" << t.freq[0] << "," << t.freq[1];
  }
  return os.str();
}

MatrixField MatrixField::from_expressions(int d, const std::vector<std::string>& exprs,
                                          double lambda0, double lambda1, double lambda2,
                                          double beta) {
  require(d == 1 || d == 2, "MatrixField: d must be 1 or 2");
  require(static_cast<int>(exprs.size()) == d * d, "MatrixField: need d*d entries");
  require(lambda0 > 0.0 && lambda1 >= lambda0, "MatrixField: need 0 < lambda0 <= lambda1");
  MatrixField A;
  A.d = d;
  for (const auto& e : exprs) A.entries.push_back(Expression::parse(e));
  A.lambda0 = lambda0;
  A.lambda1 = lambda1;
  A.lambda2 = lambda2;
  A.beta = beta;
  return A;
}

void MatrixField::matrix_at(const Point& x, double out[4]) const {
  for (int i = 0; i < d * d; ++i) out[i] = entries[i].eval_x(x);
  if (d == 1) out[1] = out[2] = out[3] = 0.0;
}

double MatrixField::det_at(const Point& x) const {
  double m[4];
  matrix_at(x, m);
  return d == 1 ? m[0] : m[0] * m[3] - m[1] * m[2];
}

Point MatrixField::apply_inverse(const Point& x, const Point& z) const {
  double m[4];
  matrix_at(x, m);
  if (d == 1) {
    if (std::abs(m[0]) < det_epsilon)
      throw domain_error_at("MatrixField: singular matrix (|det| below epsilon)");
    return {z[0] / m[0], 0.0};
  }
  double det = m[0] * m[3] - m[1] * m[2];
  if (std::abs(det) < det_epsilon)
    throw domain_error_at("MatrixField: singular matrix (|det| below epsilon)");
  return {(m[3] * z[0] - m[1] * z[1]) / det, (-m[2] * z[0] + m[0] * z[1]) / det};
}

bool MatrixField::is_scalar() const {
  if (d == 1) return true;
  for (double x : {-7.3, -2.1, 0.0, 1.7, 5.9}) {
    for (double y : {-4.2, 0.3, 6.1}) {
      double m[4];
      matrix_at({x, y}, m);
      double scale = std::abs(m[0]) + std::abs(m[3]);
      if (std::abs(m[1]) + std::abs(m[2]) > 1e-12 * scale) return false;
      if (std::abs(m[0] - m[3]) > 1e-12 * scale) return false;
    }
  }
  return true;
}

JumpKernel kappa_from_matrix(const MatrixField& A, double alpha) {
  require(alpha > 0.0 && alpha < 2.0, "kappa_from_matrix: alpha out of (0,2)");
  const int d = A.d;
  const double c = stable_levy_constant(d, alpha);
  const double l0 = A.lambda0, l1 = A.lambda1;

  // Conservative envelope: kappa in [c l0^{d+a}/l1^d, c l1^{d+a}/l0^d].
  double k0 = c * std::pow(l0, d + alpha) / std::pow(l1, d);
  double k1 = c * std::pow(l1, d + alpha) / std::pow(l0, d);

  // Entrywise Holder constant of A -> Holder constant of kappa. The map
  // A |-> kappa has per-entry gradient bounded by
  //   f_max * (|cof|/det + (d+alpha) ||A^{-1}||)
  // on the ellipticity window; crude but safe.
  double f_max = std::pow(l1, d + alpha) / std::pow(l0, d);
  double grad = f_max * (std::pow(l1, d - 1) / std::pow(l0, d) +
                         (d + alpha) * std::sqrt(2.0) * l1 / (l0 * l0));
  double k2 = c * grad * d * d * A.lambda2;

  if (A.is_scalar()) {
    // A(x) = a(x) I: kappa(x,z) = c a(x)^alpha, independent of z.
    MatrixField Ac = A;
    CosineTerm t;
    t.coef_text = "c*(" + A.entries[0].text() + ")^alpha";
    t.coef = [Ac, c, alpha](const Point& x) {
      double a = Ac.entries[0].eval_x(x);
      if (std::abs(a) < Ac.det_epsilon)
        throw domain_error_at("kappa_from_matrix: singular matrix (|det| below epsilon)");
      return c * std::pow(std::abs(a), alpha);
    };
    return JumpKernel::cosine_form(A.d, alpha, A.beta, k0, k1, k2, {t}, "matrix-scalar");
  }

  MatrixField Ac = A;
  auto f = [Ac, c, alpha, d](const Point& x, const Point& z) {
    double det = Ac.det_at(x);
    if (std::abs(det) < Ac.det_epsilon)
      throw domain_error_at("kappa_from_matrix: singular matrix (|det| below epsilon)");
    Point w = Ac.apply_inverse(x, z);
    double r = norm(z, d) / norm(w, d);
    return c / std::abs(det) * std::pow(r, d + alpha);
  };
  return JumpKernel::free_form(A.d, alpha, A.beta, k0, k1, k2, f, "matrix-general");
}

KernelValidationReport validate_kernel(const JumpKernel& k, int sample_count,
                                       std::uint64_t rng_seed, int threads) {
  require(sample_count >= 1, "validate_kernel: sample_count >= 1");
  KernelValidationReport rep;
  rep.sample_count = sample_count;
  rep.rng_seed = rng_seed;

  const int d = k.dimension();
  struct Sample {
    double kmin, kmax, sym, holder;
  };
  std::vector<Sample> out(sample_count);

  parallel_for(
      static_cast<std::size_t>(sample_count),
      [&](std::size_t i) {
        CounterRng rng(rng_seed, i);
        Point x{rng.next_uniform(-8.0, 8.0), d == 2 ? rng.next_uniform(-8.0, 8.0) : 0.0};
        // z: random direction, log-uniform radius
        double rz = std::exp(rng.next_uniform(std::log(1e-3), std::log(10.0)));
        Point z;
        if (d == 1) {
          z = {rng.next_uniform() < 0.5 ? rz : -rz, 0.0};
        } else {
          double th = rng.next_uniform(0.0, 2.0 * M_PI);
          z = {rz * std::cos(th), rz * std::sin(th)};
        }
        // Holder pair: distance log-spaced in [1e-3, 2] so both the local
        // and the saturated regime of the bound get exercised.
        double h = std::exp(rng.next_uniform(std::log(1e-3), std::log(2.0)));
        Point y = x;
        if (d == 1) {
          y[0] += rng.next_uniform() < 0.5 ? h : -h;
        } else {
          double th = rng.next_uniform(0.0, 2.0 * M_PI);
          y[0] += h * std::cos(th);
          y[1] += h * std::sin(th);
        }

        double v = k.evaluate(x, z);
        double vm = k.evaluate(x, neg(z));
        double vy = k.evaluate(y, z);
        Sample s;
        s.kmin = std::min(v, std::min(vm, vy));
        s.kmax = std::max(v, std::max(vm, vy));
        s.sym = std::abs(v - vm);
        double dist = norm(sub(x, y), d);
        double denom = k.kappa2() * std::pow(dist, k.beta());
        s.holder = denom > 0.0 ? std::abs(v - vy) / denom
                               : (std::abs(v - vy) > 0.0 ? std::numeric_limits<double>::infinity()
                                                         : 0.0);
        out[i] = s;
      },
      threads);

  rep.kappa_min = out[0].kmin;
  rep.kappa_max = out[0].kmax;
  for (const auto& s : out) {
    rep.kappa_min = std::min(rep.kappa_min, s.kmin);
    rep.kappa_max = std::max(rep.kappa_max, s.kmax);
    rep.symmetry_defect = std::max(rep.symmetry_defect, s.sym);
    rep.holder_ratio_max = std::max(rep.holder_ratio_max, s.holder);
  }
  double tol = 1e-12 * std::max(1.0, k.kappa1());
  rep.bounds_ok = rep.kappa_min >= k.kappa0() - tol && rep.kappa_max <= k.kappa1() + tol;
  rep.symmetry_ok = rep.symmetry_defect <= tol;
  rep.holder_ok = rep.holder_ratio_max <= 1.0 + 1e-9;
  return rep;
}

}  // namespace levikern
