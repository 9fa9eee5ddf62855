#pragma once

#include <memory>
#include <string>
#include <vector>

#include "levikern/frozen.hpp"
#include "levikern/grid.hpp"
#include "levikern/operator.hpp"

namespace levikern {

// dense [time][x][y] table
struct Tensor3 {
  int nt = 0, nx = 0, ny = 0;
  std::vector<double> v;

  void resize(int t, int x, int y) {
    nt = t;
    nx = x;
    ny = y;
    v.assign(static_cast<std::size_t>(t) * x * y, 0.0);
  }
  double& at(int k, int i, int j) {
    return v[(static_cast<std::size_t>(k) * nx + i) * ny + j];
  }
  double at(int k, int i, int j) const {
    return v[(static_cast<std::size_t>(k) * nx + i) * ny + j];
  }
  double sup_abs() const;
};

struct ParametrixOptions {
  double rel_tol = 1e-6;
  int max_iterates = 12;
  int s_nodes = 8;          // Gauss-Jacobi nodes per half-interval
  double ai_mass_tol = 1e-4;
  int threads = 0;
};

struct IterateStats {
  int n = 0;
  double sup_norm = 0.0;
  double ratio = 0.0;            // sup|q_n| / sup|q_{n-1}|
  double rate_factor = 0.0;      // Beta(beta/alpha, n beta/alpha)
  double envelope_raw = 0.0;     // sup |q_n| / (rho^0_{(n+1)b} + rho^b_{nb})
};

struct TruncationCertificate {
  int terms = 0;                 // N: iterates computed beyond q0
  double fitted_constant = 0.0;  // C from measured ratios (drives the stop rule)
  double envelope_constant = 0.0;  // C of the Gamma-rate envelope fit
  double envelope_scale = 0.0;     // c with gamma_n = (C Gamma(b))^{n+1}/Gamma((n+1)b)
  double tail_bound = 0.0;
  double series_sup = 0.0;
  bool converged = false;
};

// Picard iterates of the freezing-defect equation on the tensor grid:
// x on coarse nodes, y on fine nodes, t on the slice ladder.
class ParametrixState {
 public:
  ParametrixState(const FrozenKernelEngine& engine, ParametrixOptions opts);

  const FrozenKernelEngine& engine() const { return *engine_; }
  const SpaceTimeGrid& grid() const { return engine_->grid(); }
  const ParametrixOptions& options() const { return opts_; }

  // computes iterate n (n >= 1; iterate n-1 must exist unless n == 1)
  void picard_step(int n);

  // runs picard_step until the Gamma-rate majorant tail is below
  // rel_tol * current sup; fills the certificate
  const TruncationCertificate& sum_series(double rel_tol);

  int iterates_computed() const { return static_cast<int>(tables_.size()); }
  const Tensor3& iterate(int n) const { return tables_.at(n - 1); }
  const std::vector<IterateStats>& stats() const { return stats_; }
  const TruncationCertificate& certificate() const { return cert_; }
  double q0_sup() const { return q0_sup_; }

  // q(s,z,y) = q0(s,z,y) + sum of iterates, interpolated in (s, z);
  // y must be a fine-grid node index
  double q_total(double s, double z, int y_index) const;
  double q_correction(double s, double z, int y_index) const;

 private:
  struct SNode {
    double s, weight;
  };
  std::vector<SNode> s_quadrature(double t, int n) const;
  void materialize_q0(double u, std::vector<double>& out) const;  // [x][z] coarse
  double qprev_eval(int n, double s, int zc, int yf) const;
  double q_iterate_interp_z(int n, double s, double z, int yf) const;

  std::shared_ptr<const FrozenKernelEngine> engine_holder_;
  const FrozenKernelEngine* engine_;
  ParametrixOptions opts_;
  std::vector<double> times_;
  std::vector<Tensor3> tables_;  // iterate n at index n-1
  Tensor3 qc_sum_;
  std::vector<IterateStats> stats_;
  TruncationCertificate cert_;
  double q0_sup_ = 0.0;
};

// Assembled heat kernel on the fine grid with provenance.
struct KernelField {
  SpaceTimeGrid grid;
  double alpha = 1.0, beta = 0.5;
  std::string kernel_fingerprint;
  std::uint64_t config_hash = 0;
  std::vector<double> times;
  Tensor3 values;  // [t][x fine][y fine]
  int negative_clipped = 0;
  double most_negative = 0.0;
  TruncationCertificate certificate;
  std::vector<IterateStats> iterate_stats;
  double q0_sup = 0.0;

  double at(int k, int i, int j) const { return values.at(k, i, j); }
  // log-time + bicubic-in-space interpolation
  double interp(double t, double x, double y) const;
  // x-slice at fixed (t, y) as a grid function with the jump-tail model
  GridFunction1D x_slice(const FrozenKernelEngine& eng, double t, double y) const;

  void save(const std::string& path) const;
  static KernelField load(const std::string& path);
  void export_slice_csv(const std::string& path, double t) const;
};

// Levi assembly: p(t,x,y) = p_y(t,x-y) + int_0^t int p_z(t-s,x-z) q(s,z,y).
// Negative values in [-1e-6, 0) are clipped with a count; below that the
// assembly aborts.
KernelField assemble_kernel(const FrozenKernelEngine& engine, ParametrixState& state,
                            const ParametrixOptions& opts);

struct ResidualReport {
  double t, x, y;
  double dp_dt;
  double generator_value;
  double residual;   // dp_dt - L p
  double envelope;   // rho^0_0(t, x-y)
};

// PDE residual at an interior point: nonuniform central difference in t
// against the frozen operator anchored at x.
ResidualReport heat_residual(const KernelField& field, const FrozenKernelEngine& engine,
                             double t, double x, double y, bool anchor_at_y = false);

}  // namespace levikern
