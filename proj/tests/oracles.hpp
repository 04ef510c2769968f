#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <functional>
#include <algorithm>
#include <tuple>
#include <utility>
#include <vector>

#include "vcl/potential.hpp"

namespace oracle {

using cplx = std::complex<double>;

/// Composite Simpson rule with a fixed, large panel count.
inline double simpson(const std::function<double(double)>& f, double a, double b, long panels = 1000000) {
  if (panels % 2) ++panels;
  const double h = (b - a) / double(panels);
  double s = f(a) + f(b);
  for (long i = 1; i < panels; ++i) s += f(a + h * double(i)) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// RK4 integration of f' = i(E+V+m) g, g' = i(E+V-m) f from z0 to z1.
inline std::pair<cplx, cplx> rk4_dirac(const vcl::PotentialSpec& p, double E, cplx f, cplx g, double z0, double z1,
                                       int steps = 20000) {
  const cplx I{0, 1};
  const double m = p.mass();
  const double h = (z1 - z0) / steps;
  auto rhs = [&](double z, cplx ff, cplx gg) {
    const double v = p.value(z);
    return std::pair<cplx, cplx>{I * (E + v + m) * gg, I * (E + v - m) * ff};
  };
  double z = z0;
  for (int i = 0; i < steps; ++i) {
    auto [k1f, k1g] = rhs(z, f, g);
    auto [k2f, k2g] = rhs(z + h / 2, f + h / 2 * k1f, g + h / 2 * k1g);
    auto [k3f, k3g] = rhs(z + h / 2, f + h / 2 * k2f, g + h / 2 * k2g);
    auto [k4f, k4g] = rhs(z + h, f + h * k3f, g + h * k3g);
    f += h / 6 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
    g += h / 6 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    z += h;
  }
  return {f, g};
}

/// RK4 across a piecewise-constant potential, one segment at a time so no
/// step straddles a jump.
inline std::pair<cplx, cplx> rk4_dirac_pieces(const vcl::PotentialSpec& p, double E, cplx f, cplx g, double z1,
                                              int steps_per_unit = 20000) {
  double z = 0.0;
  std::vector<double> cuts;
  for (const auto& s : p.right_half()) cuts.push_back(s.z_hi);
  cuts.push_back(z1);
  for (double c : cuts) {
    const double end = std::min(c, z1);
    if (end <= z) continue;
    const double mid = 0.5 * (z + end);
    const vcl::PotentialSpec flat = vcl::PotentialSpec::piecewise({{-1e9, 1e9, p.value(mid)}}, p.mass());
    std::tie(f, g) = rk4_dirac(flat, E, f, g, z, end, std::max(100, int((end - z) * steps_per_unit)));
    z = end;
  }
  return {f, g};
}

/// Delta-potential phase shifts on the principal branch.
inline double delta_even_pos(double lambda, double k, double m = 1.0) {
  const double E = std::sqrt(k * k + m * m);
  return std::atan(std::tan(lambda / 2) * (E + m) / k);
}
inline double delta_odd_pos(double lambda, double k, double m = 1.0) {
  const double E = std::sqrt(k * k + m * m);
  return std::atan(std::tan(lambda / 2) * k / (E + m));
}

/// Plain bisection without tolerance bookkeeping.
inline double bisect(const std::function<double(double)>& f, double a, double b, int iters = 200) {
  double fa = f(a);
  for (int i = 0; i < iters; ++i) {
    const double c = 0.5 * (a + b);
    const double fc = f(c);
    if ((fc < 0) == (fa < 0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace oracle
