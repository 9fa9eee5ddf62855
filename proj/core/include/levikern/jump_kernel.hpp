#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "levikern/common.hpp"
#include "levikern/expr.hpp"

namespace levikern {

// One term of a cosine-form coefficient: a(x) * cos(<freq, z>).
// Kernels assembled from such terms admit closed-form Levy symbols, which
// the frozen-kernel machinery exploits; arbitrary kernels fall back to
// numeric symbol quadrature and are rejected by the parametrix builder.
struct CosineTerm {
  std::function<double(const Point&)> coef;
  Point freq{0.0, 0.0};
  std::string coef_text;  // for provenance/hashing
  bool coef_is_constant = false;
  double coef_value = 0.0;
};

// The coefficient kappa(x,z) of the jump intensity kappa(x,z)|z|^{-d-alpha},
// with its structural constants:
//   0 < kappa0 <= kappa(x,z) <= kappa1,   kappa(x,z) = kappa(x,-z),
//   |kappa(x,z)-kappa(y,z)| <= kappa2 |x-y|^beta.
class JumpKernel {
 public:
  static JumpKernel constant(int d, double alpha, double value);
  static JumpKernel cosine_form(int d, double alpha, double beta, double kappa0,
                                double kappa1, double kappa2, std::vector<CosineTerm> terms,
                                std::string name = "cosine");
  static JumpKernel free_form(int d, double alpha, double beta, double kappa0, double kappa1,
                              double kappa2, std::function<double(const Point&, const Point&)> f,
                              std::string name = "free");

  int dimension() const { return d_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double kappa0() const { return kappa0_; }
  double kappa1() const { return kappa1_; }
  double kappa2() const { return kappa2_; }
  const std::string& name() const { return name_; }

  double evaluate(const Point& x, const Point& z) const;

  bool is_cosine_form() const { return cosine_; }
  bool is_x_independent() const { return x_independent_; }
  const std::vector<CosineTerm>& cosine_terms() const { return terms_; }

  // Coefficient vector a_k(x) of the cosine form.
  std::vector<double> coefficients_at(const Point& x) const;
  std::size_t n_terms() const { return terms_.size(); }
  // allocation-free variant for hot loops; out must hold n_terms()
  void coefficients_at(const Point& x, double* out) const;
  // kappa(x, z -> 0) = sum_k a_k(x); the local stable intensity.
  double kappa_at_origin(const Point& x) const;

  std::string fingerprint() const;

 private:
  JumpKernel() = default;
  int d_ = 1;
  double alpha_ = 1.0, beta_ = 0.5;
  double kappa0_ = 1.0, kappa1_ = 1.0, kappa2_ = 0.0;
  bool cosine_ = false;
  bool x_independent_ = false;
  std::vector<CosineTerm> terms_;
  std::function<double(const Point&, const Point&)> eval_;
  std::string name_;
};

// Matrix coefficient field A(x) with ellipticity window [lambda0, lambda1]
// and entrywise Holder constant lambda2 (exponent beta).
struct MatrixField {
  int d = 1;
  std::vector<Expression> entries;  // row-major d*d
  double lambda0 = 1.0, lambda1 = 1.0, lambda2 = 0.0;
  double beta = 0.5;
  double det_epsilon = 1e-12;

  static MatrixField from_expressions(int d, const std::vector<std::string>& exprs,
                                      double lambda0, double lambda1, double lambda2,
                                      double beta);

  void matrix_at(const Point& x, double out[4]) const;
  double det_at(const Point& x) const;
  // Inverse applied to z. Throws if |det| < det_epsilon.
  Point apply_inverse(const Point& x, const Point& z) const;
  bool is_scalar() const;  // A(x) = a(x) * I within sampling tolerance
};

// kappa(x,z) = c_{d,alpha}/|det A(x)| * (|z|/|A(x)^{-1} z|)^{d+alpha}.
JumpKernel kappa_from_matrix(const MatrixField& A, double alpha);

struct KernelValidationReport {
  int sample_count = 0;
  std::uint64_t rng_seed = 0;
  double kappa_min = 0.0, kappa_max = 0.0;
  double symmetry_defect = 0.0;
  double holder_ratio_max = 0.0;  // |dk| / (kappa2 |x-y|^beta)
  bool bounds_ok = true;
  bool symmetry_ok = true;
  bool holder_ok = true;

  bool ok() const { return bounds_ok && symmetry_ok && holder_ok; }
};

// Samples the kernel and checks Eq-level structural constraints. Violations
// are reported, never thrown. Distances for the Holder check are log-spaced
// in [1e-3, 2].
KernelValidationReport validate_kernel(const JumpKernel& k, int sample_count,
                                       std::uint64_t rng_seed, int threads = 0);

}  // namespace levikern
