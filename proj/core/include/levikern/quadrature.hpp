#pragma once

#include <functional>
#include <vector>

#include "levikern/common.hpp"

namespace levikern {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre on [-1,1].
const QuadRule& gauss_legendre(int n);

// Nodes/weights for int_0^1 (1-tau)^a tau^b f(tau) dtau ~ sum w_i f(tau_i).
// Golub-Welsch is avoided; Newton iteration on the Jacobi recurrence.
QuadRule gauss_jacobi01(int n, double a, double b);

// Adaptive Simpson on [a,b] with absolute/relative tolerance.
struct AdaptiveResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  int evaluations = 0;
};

AdaptiveResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                double abs_tol, double rel_tol, int max_depth = 48);

// int_a^b f(x) cos(v x) dx with f smooth and non-oscillatory: cubic
// interpolation of f on panels, exact cosine moments. Panel boundaries are
// the caller's; accuracy is h^4 f'''' per panel, independent of v.
class FilonCosine {
 public:
  // panel edges: strictly increasing, size >= 2
  explicit FilonCosine(std::vector<double> edges);

  // Evaluate f at all required nodes (3 per panel + 1), in order.
  const std::vector<double>& nodes() const { return nodes_; }

  // Integral for one oscillation frequency v, given f values at nodes().
  double integrate(const std::vector<double>& fvals, double v) const;

  // Precomputed per-panel cubic coefficients, for many-v evaluation.
  struct Prepared {
    std::vector<double> coeffs;  // 4 per panel
  };
  Prepared prepare(const std::vector<double>& fvals) const;
  double integrate(const Prepared& prep, double v) const;

 private:
  std::vector<double> edges_;
  std::vector<double> nodes_;
};

// Geometric panel edges covering [lo, hi] with given growth ratio,
// optionally forcing the listed interior breakpoints (e.g. kink locations).
std::vector<double> geometric_edges(double lo, double hi, double ratio,
                                    const std::vector<double>& force = {});

}  // namespace levikern
