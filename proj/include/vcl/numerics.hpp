#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "vcl/error.hpp"

namespace vcl {

/// Tolerance contract shared by every numerical kernel.
struct Tolerances {
  double root_abs = 1e-10;        // |f(x)| bound accepted by find_root
  double quad_rel = 1e-9;         // relative error target for integrate
  double deriv_step = 1e-4;       // base step for differentiate (1/length)
  double zero_energy_eps = 1e-6;  // |E| below this (units of m) counts as zero
  int max_root_iterations = 300;
  int max_quad_depth = 30;

  /// Throws InvalidArgument when a field is non-positive, or when deriv_step
  /// is not below a tenth of `min_k_spacing` (pass 0 to skip that check).
  void validate(double min_k_spacing = 0.0) const;
};

namespace detail {

template <class F>
double simpson_recurse(F& f, double a, double b, double fa, double fm, double fb,
                       double whole, double eps_per_length, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h = b - a;
  const double left = (fa + 4.0 * flm + fm) * h / 12.0;
  const double right = (fm + 4.0 * frm + fb) * h / 12.0;
  const double diff = left + right - whole;
  if (std::abs(diff) <= 15.0 * eps_per_length * h) return left + right + diff / 15.0;
  if (depth >= max_depth)
    throw Error(ErrorKind::SubdivisionLimit, "adaptive Simpson hit the recursion cap");
  return simpson_recurse(f, a, m, fa, flm, fm, left, eps_per_length, depth + 1, max_depth) +
         simpson_recurse(f, m, b, fm, frm, fb, right, eps_per_length, depth + 1, max_depth);
}

}  // namespace detail

/// Bracketing root finder: bisection, switching to false-position steps once
/// the bracket is narrower than 1e-3 of its scale. Every secant step that fails
/// to halve the bracket is followed by a bisection step, so convergence is
/// never slower than plain bisection.
template <class F>
double find_root(F&& f, double lo, double hi, const Tolerances& tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi))
    throw Error(ErrorKind::NoSignChange, "find_root: f(lo) and f(hi) have the same sign");
  if (lo > hi) {
    std::swap(lo, hi);
    std::swap(flo, fhi);
  }
  const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
  double best_x = std::abs(flo) < std::abs(fhi) ? lo : hi;
  double best_f = std::min(std::abs(flo), std::abs(fhi));
  bool last_was_secant = false;
  double width_before_secant = hi - lo;
  for (int it = 0; it < tol.max_root_iterations; ++it) {
    const double width = hi - lo;
    double x;
    const bool small = width < 1e-3 * scale;
    const bool secant_ok = small && !(last_was_secant && width > 0.5 * width_before_secant);
    if (secant_ok) {
      x = hi - fhi * (hi - lo) / (fhi - flo);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
      width_before_secant = width;
      last_was_secant = true;
    } else {
      x = 0.5 * (lo + hi);
      last_was_secant = false;
    }
    const double fx = f(x);
    if (std::abs(fx) < best_f) {
      best_f = std::abs(fx);
      best_x = x;
    }
    if (std::abs(fx) <= tol.root_abs) return x;
    if (std::signbit(fx) == std::signbit(flo)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * scale) break;
  }
  if (best_f <= tol.root_abs) return best_x;
  throw Error(ErrorKind::MaxIterations,
              "find_root: residual " + std::to_string(best_f) + " above tolerance");
}

/// Adaptive Simpson quadrature of f over [z1, z2], started from `panels`
/// equal panels. The error target is quad_rel times a coarse estimate of
/// the integral of |f|, so integrals that cancel to zero still terminate.
template <class F>
double integrate(F&& f, double z1, double z2, const Tolerances& tol, int panels = 8) {
  if (z1 == z2) return 0.0;
  double sign = 1.0;
  if (z2 < z1) {
    std::swap(z1, z2);
    sign = -1.0;
  }
  panels = std::max(panels, 1);
  const double h = (z2 - z1) / panels;
  std::vector<double> nodes(2 * panels + 1);
  for (int i = 0; i <= 2 * panels; ++i) nodes[i] = f(z1 + 0.5 * h * i);
  double abs_est = 0.0;
  for (int i = 0; i < panels; ++i)
    abs_est += (std::abs(nodes[2 * i]) + 4.0 * std::abs(nodes[2 * i + 1]) +
                std::abs(nodes[2 * i + 2])) * h / 6.0;
  const double floor_abs = 1e-300;
  const double eps_per_length = tol.quad_rel * std::max(abs_est, floor_abs) / (z2 - z1);
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = z1 + h * i;
    const double b = (i + 1 == panels) ? z2 : a + h;
    const double whole = (nodes[2 * i] + 4.0 * nodes[2 * i + 1] + nodes[2 * i + 2]) * (b - a) / 6.0;
    total += detail::simpson_recurse(f, a, b, nodes[2 * i], nodes[2 * i + 1], nodes[2 * i + 2],
                                     whole, eps_per_length, 0, tol.max_quad_depth);
  }
  return sign * total;
}

/// Central difference with one Richardson step; error O(step^4).
/// The step shrinks near the origin so that x - step stays positive when x > 0.
template <class F>
double differentiate(F&& f, double x, const Tolerances& tol) {
  double h = tol.deriv_step;
  if (x > 0.0 && h > 0.25 * x) h = 0.25 * x;
  const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
  const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace vcl
