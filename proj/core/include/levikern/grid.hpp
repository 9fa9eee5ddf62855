#pragma once

#include <cmath>
#include <vector>

#include "levikern/common.hpp"

namespace levikern {

// Shared discretization for the Levi construction. Fine nodes carry the
// kernel field axes; coarse nodes (every `coarsen`-th fine node) carry the
// frozen-kernel anchors and the convolution z-grid. Time slices form a
// geometric ladder that contains the dyadic times exactly.
struct SpaceTimeGrid {
  int d = 1;
  double extent = 16.0;
  double dx = 0.125;
  int coarsen = 2;
  double t_min = 1.0 / 128.0;
  double t_max = 1.0;
  int slices_per_octave = 4;
  double eval_window = 6.0;   // checks sample |x| <= eval_window
  double r_inner_factor = 4.0;

  void validate() const {
    require(d == 1 || d == 2, "grid: d must be 1 or 2");
    require(extent > 0.0 && dx > 0.0 && coarsen >= 1, "grid: bad spacing");
    require(t_min > 0.0 && t_min < t_max && t_max <= 1.0, "grid: bad time range");
    require(slices_per_octave >= 1, "grid: slices_per_octave >= 1");
    require(r_inner() < r_outer(), "grid: r_inner must be below R_outer");
    double n = extent / dx;
    require(std::abs(n - std::round(n)) < 1e-9, "grid: extent must be a multiple of dx");
    double m = std::round(n);
    require(std::fmod(m, coarsen) < 1e-9, "grid: extent/dx must be divisible by coarsen");
  }

  double dz() const { return coarsen * dx; }
  int n_fine() const { return 2 * static_cast<int>(std::round(extent / dx)) + 1; }
  int n_coarse() const { return 2 * static_cast<int>(std::round(extent / dz())) + 1; }
  double fine(int i) const { return -extent + i * dx; }
  double coarse(int j) const { return -extent + j * dz(); }
  int fine_index(double x) const {
    int i = static_cast<int>(std::round((x + extent) / dx));
    return std::max(0, std::min(n_fine() - 1, i));
  }
  int nearest_coarse(double x) const {
    int j = static_cast<int>(std::round((x + extent) / dz()));
    return std::max(0, std::min(n_coarse() - 1, j));
  }

  // singular-quadrature radii for grid functions
  double r_inner() const { return r_inner_factor * dx; }
  double r_outer() const { return 2.0 * extent; }

  std::vector<double> time_slices() const {
    std::vector<double> ts;
    double lo = std::log2(t_min), hi = std::log2(t_max);
    int m = static_cast<int>(std::round((hi - lo) * slices_per_octave));
    for (int k = 0; k <= m; ++k) ts.push_back(std::pow(2.0, lo + static_cast<double>(k) / slices_per_octave));
    ts.back() = t_max;
    return ts;
  }

  int time_index(double t) const {
    // nearest slice index on the geometric ladder
    double pos = (std::log2(t) - std::log2(t_min)) * slices_per_octave;
    int n = static_cast<int>(time_slices().size());
    return std::max(0, std::min(n - 1, static_cast<int>(std::round(pos))));
  }
};

}  // namespace levikern
