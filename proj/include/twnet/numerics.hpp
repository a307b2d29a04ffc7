#pragma once

// Small numerical kernels shared by the wave constructions: bracketed
// bisection, golden-section search and adaptive Gauss-Kronrod quadrature.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <cstdio>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace twnet {

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error estimate " + format(achieved) + ")"), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  static std::string format(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
  }
  double achieved_;
};

/// Logistic function 1 / (1 + e^{-u}), evaluated without overflow.
inline double logistic(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

/// ln(logistic(u)).
inline double log_logistic(double u) {
  if (u >= 0.0) return -std::log1p(std::exp(-u));
  return u - std::log1p(std::exp(u));
}

/// Root of a non-decreasing function on [lo, hi] by bisection.  Requires
/// fn(lo) <= 0 <= fn(hi).  Stops when the bracket is narrower than tol or no
/// longer shrinks in floating point.
template <class F>
double bisect_increasing(F&& fn, double lo, double hi, double tol = 0.0) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= tol) return mid;
    if (fn(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Maximizer of a unimodal function on [a, b] by golden-section search.
template <class F>
double golden_section_max(F&& fn, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = fn(x1);
  double f2 = fn(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = fn(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = fn(x1);
    }
  }
  return 0.5 * (a + b);
}

/// Minimizer of a unimodal function on [a, b].
template <class F>
double golden_section_min(F&& fn, double a, double b, double tol) {
  return golden_section_max([&](double x) { return -fn(x); }, a, b, tol);
}

/// Adaptive 15-point Gauss-Kronrod quadrature.  Throws QuadratureError when
/// the error estimate stays above the requested tolerance.
template <class F>
double integrate(F&& fn, double a, double b, double rel_tol = 1e-13, double abs_floor = 1e-300) {
  if (a == b) return 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double err = 0.0;
  // Adaptive bisection of a short interval accumulates roundoff in the error
  // estimate, so a single rule is tried first.
  double value = GK::integrate(fn, a, b, 0, rel_tol, &err);
  if (!(err <= std::max(rel_tol * std::abs(value), abs_floor))) value = GK::integrate(fn, a, b, 20, rel_tol, &err);
  const double scale = std::abs(value);
  if (!std::isfinite(value) || err > std::max(100.0 * rel_tol * scale, abs_floor) + 1e-15) {
    throw QuadratureError("quadrature did not converge", err);
  }
  return value;
}

}  // namespace twnet
