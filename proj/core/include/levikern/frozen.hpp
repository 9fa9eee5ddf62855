#pragma once

#include <memory>
#include <vector>

#include "levikern/grid.hpp"
#include "levikern/jump_kernel.hpp"
#include "levikern/special.hpp"
#include "levikern/symbol.hpp"

namespace levikern {

// Tabulated frozen-coefficient density p_y(t_k, x_i) on a uniform offset
// grid; the serializable artifact. Values are never renormalized; the mass
// defect (after the analytic jump-tail correction) is recorded instead.
struct FrozenKernelTable {
  int d = 1;
  double alpha = 1.0;
  Point anchor{0.0, 0.0};
  std::vector<double> times;
  double v_extent = 0.0;
  double dv = 0.0;
  std::vector<double> values;  // [time][offset], offsets -v_extent..v_extent
  double mass_defect_max = 0.0;
  double comparability_low = 0.0;   // min over grid of p / rho^0_alpha
  double comparability_high = 0.0;  // max over grid of p / rho^0_alpha

  int n_offsets() const { return static_cast<int>(std::round(2.0 * v_extent / dv)) + 1; }
  double offset(int i) const { return -v_extent + i * dv; }
  double value(int k, int i) const { return values[k * n_offsets() + i]; }

  void save(const std::string& path) const;
  static FrozenKernelTable load(const std::string& path);
  void export_csv(const std::string& path) const;
};

namespace detail {

// One anchor's p and R_omega tables over the u-slice ladder, with the
// scaled-profile model below the table floor. R_omega(u,y;v) is the inverse
// cosine transform of G_omega(xi) e^{-u psi_y(xi)}; the freezing defect
// q0 is assembled from these (see FrozenKernelEngine::q0).
class AnchorTables {
 public:
  AnchorTables(const JumpKernel& k, const Point& anchor, const SpaceTimeGrid& grid,
               double u_lo, double slice_ratio);

  double p(double u, double v) const;
  double rk(std::size_t family, double u, double v) const;  // family < n_terms
  double dp_dt(double u, double v) const;
  std::size_t families() const { return nfam_; }
  double u_floor() const { return u_lo_; }
  const LevySymbol& symbol() const { return psi_; }
  double sigma(double u) const;  // local peak scale

  double p_model(double u, double v) const;
  double rk_model(std::size_t family, double u, double v) const;
  double symbol_shift() const;

 private:
  struct Slice {
    double u = 0.0;
    // |v| >= 0 nodes: uniform at the peak scale, then a spacing-capped
    // geometric ladder out to the model crossover
    std::vector<double> nodes;
    std::vector<std::vector<double>> vals;  // per family

    double eval(const std::vector<double>& f, double v) const;
    double top() const { return nodes.empty() ? 0.0 : nodes[nodes.size() - 3]; }
  };

  double interp_u(std::size_t family, double u, double v, bool log_interp) const;

  std::shared_ptr<const JumpKernel> kernel_;
  Point anchor_;
  int d_;
  double alpha_;
  LevySymbol psi_;
  double u_lo_, ratio_;
  double vmax_;
  std::size_t nfam_;
  std::vector<double> coefs_;
  std::vector<Point> freqs_;
  std::shared_ptr<const StableProfile> profile_;
  std::vector<Slice> slices_;
};

}  // namespace detail

// Frozen kernels cached per coarse-grid anchor; anchors between grid points
// use nearest-anchor semantics. d=1 only (the parametrix lane); d=2 frozen
// densities go through frozen_density_2d below.
class FrozenKernelEngine {
 public:
  FrozenKernelEngine(const JumpKernel& kernel, const SpaceTimeGrid& grid, int threads = 0);

  const JumpKernel& kernel() const { return *kernel_; }
  const SpaceTimeGrid& grid() const { return grid_; }
  double u_floor() const { return u_lo_; }

  // p_{z_j}(u, v) for coarse anchor j
  double p(int anchor, double u, double v) const;
  // time derivative of the same, via the R-tables
  double dp_dt(int anchor, double u, double v) const;

  // freezing defect q0(u, x, z) = (L^{kappa(x)} - L^{kappa(z)}) p_z(u,.)(x-z),
  // exact in (x, z) coefficients, nearest-anchor in the R-table argument
  double q0(double u, double x, double z) const;
  // q0 with an explicit table anchor (already the nearest coarse index)
  double q0_anchored(int anchor, double u, double x, double z) const;
  // q0 with caller-supplied coefficient vectors (hot loops)
  double q0_coeffs(int anchor, double u, double v, const double* ax, const double* az) const;

  std::size_t n_terms() const { return kernel_->n_terms(); }
  // coefficients on the grid nodes, [node][term]
  const std::vector<double>& fine_coefs() const { return fine_coefs_; }
  const std::vector<double>& coarse_coefs() const { return coarse_coefs_; }

  // int q0(u, x, z) dz over a window |z - x| <= w, resolved at the peak
  // scale; used by the convolution window corrections.
  double q0_window_moments(double u, double x, double w, double out_m[3]) const;

  // density for an arbitrary anchor (exact symbol), one Filon build per
  // (y, u); offsets may be any values. Used for the field's diagonal term.
  void density_at(const Point& y, double u, const std::vector<double>& offsets,
                  std::vector<double>& out) const;

  // mass of p_y(u,.) outside |v| > w, by the table + jump-tail model
  double mass_outside(int anchor, double u, double w) const;
  // truncated second moment int_{|v|<=w} v^2 p(u,v) dv
  double second_moment_inside(int anchor, double u, double w) const;

  // kappa(y, v) nu(v) jump-tail intensity of the anchor's local kernel
  double levy_tail_density(int anchor, double u, double v) const;

  const detail::AnchorTables& tables(int anchor) const { return *tables_[anchor]; }

  FrozenKernelTable make_table(const Point& anchor, const std::vector<double>& times,
                               double v_extent, double dv) const;

 private:
  std::shared_ptr<const JumpKernel> kernel_;
  SpaceTimeGrid grid_;
  double u_lo_, ratio_;
  std::vector<std::shared_ptr<const detail::AnchorTables>> tables_;
  std::vector<double> fine_coefs_, coarse_coefs_;
};

// Mass of the frozen density p_y(t, .) beyond |v| > R: stable-profile CDF
// for the mean intensity plus the oscillation-cancelling kernel-shape
// correction. Accurate to second order in the peak-to-window ratio.
double tail_mass_beyond(const JumpKernel& k, const Point& anchor, double t, double R);

// Single frozen-density slice by Fourier inversion (spec operation).
// Throws if the requested time needs more spatial extent than the grid
// offers (mass defect beyond tolerance).
FrozenKernelTable frozen_density(const JumpKernel& k, const Point& anchor, double t,
                                 const SpaceTimeGrid& grid);

// d=2 tensor-grid inversion for symbols even in each frequency coordinate.
// Coarse, smoke-level resolution.
std::vector<double> frozen_density_2d(const JumpKernel& k, const Point& anchor, double t,
                                      const std::vector<double>& v1,
                                      const std::vector<double>& v2);

}  // namespace levikern
