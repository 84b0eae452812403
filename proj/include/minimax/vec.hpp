#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace minimax {

/// Dense real vector. Entries are expected to stay finite; operations that
/// the contract requires to reject non-finite input check explicitly.
using Vec = std::vector<double>;

/// Primal/dual iterate pair.
struct Point {
  Vec w;  // primal
  Vec v;  // dual
};

inline bool is_finite(const Vec& x) {
  for (double e : x) {
    if (!std::isfinite(e)) return false;
  }
  return true;
}

inline Vec zeros(std::size_t dim) { return Vec(dim, 0.0); }

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

inline double dist2_sq(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dist2_sq: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

/// y += alpha * x
inline void axpy(double alpha, const Vec& x, Vec& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("axpy: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(Vec& x, double alpha) {
  for (double& e : x) e *= alpha;
}

inline Vec sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("sub: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

/// Euclidean-ball projection. Points with ||x|| <= radius (including the
/// boundary and a 4-ulp rounding band, which makes the map idempotent
/// bitwise) are returned unchanged; outside points are scaled radially.
inline Vec project_ball(Vec x, double radius) {
  if (std::isnan(radius) || radius < 0.0)
    throw std::invalid_argument("project_ball: radius must be >= 0");
  if (!is_finite(x))
    throw std::invalid_argument("project_ball: non-finite input");
  const double n = norm2(x);
  constexpr double slack = 4.0 * std::numeric_limits<double>::epsilon();
  if (n <= radius * (1.0 + slack)) return x;
  scale(x, radius / n);
  return x;
}

/// Joint Euclidean distance sqrt(||a.w - b.w||^2 + ||a.v - b.v||^2).
inline double joint_norm(const Point& a, const Point& b) {
  return std::sqrt(dist2_sq(a.w, b.w) + dist2_sq(a.v, b.v));
}

}  // namespace minimax
