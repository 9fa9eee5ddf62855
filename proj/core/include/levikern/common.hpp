#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace levikern {

// Points live in R^1 or R^2; the active dimension travels with the kernel
// or grid that produced them. Unused components stay zero.
using Point = std::array<double, 2>;

inline Point point1(double x) { return {x, 0.0}; }
inline Point point2(double x, double y) { return {x, y}; }

inline double norm(const Point& p, int d) {
  return d == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
}

inline double dot(const Point& a, const Point& b, int d) {
  return d == 1 ? a[0] * b[0] : a[0] * b[0] + a[1] * b[1];
}

inline Point add(const Point& a, const Point& b) {
  return {a[0] + b[0], a[1] + b[1]};
}
inline Point sub(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1]};
}
inline Point scale(const Point& a, double c) { return {a[0] * c, a[1] * c}; }
inline Point neg(const Point& a) { return {-a[0], -a[1]}; }

struct domain_error_at : std::domain_error {
  using std::domain_error::domain_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline double sqr(double x) { return x * x; }

// Deterministic pairwise summation: fixed reduction order regardless of
// thread count, more accurate than a running sum on long arrays.
double pairwise_sum(const double* data, std::size_t n);

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace levikern
