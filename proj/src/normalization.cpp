#include "vcl/normalization.hpp"

#include <algorithm>
#include <cmath>

#include "vcl/error.hpp"

namespace vcl {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kOnShellTol = 1e-6;

// Integral of f over [z1, z2] split at the potential's breakpoints, panels
// no longer than a quarter of the shortest wavelength.
template <class F>
cplx integrate_complex(const PotentialSpec& p, F&& f, double z1, double z2, double kmax, const Tolerances& tol) {
  std::vector<double> cuts{z1, z2, 0.0, p.support(), -p.support()};
  for (const auto& s : p.right_half()) {
    cuts.insert(cuts.end(), {s.z_lo, -s.z_lo, s.z_hi, -s.z_hi});
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double quarter = 0.5 * 3.141592653589793 / std::max(kmax, 1e-3);
  cplx sum{};
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (hi <= z1 || lo >= z2) continue;
    const int panels = std::max(8, int(std::ceil((hi - lo) / quarter)));
    sum += cplx(integrate([&](double z) { return f(z).real(); }, lo, hi, tol, panels),
                integrate([&](double z) { return f(z).imag(); }, lo, hi, tol, panels));
  }
  return sum;
}

IdentityCheck finish(cplx lhs, cplx rhs) {
  IdentityCheck r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = std::abs(lhs - rhs);
  r.relative = r.residual / std::max(std::abs(rhs), 1e-300);
  return r;
}

void require_on_shell(const ChannelPhase& phase, double k, const BoxSpec& box) {
  if (!(k > 0)) throw Error(ErrorKind::OffShell, "normalization needs an on-shell mode with k > 0");
  const double res = quantization_residual(phase, box, k);
  if (std::abs(res) > kOnShellTol) throw Error(ErrorKind::OffShell, "k is not a box mode of this channel");
}

}  // namespace

IdentityCheck lls_bilinear_check(const PotentialSpec& p, Channel c, double k, double k_prime, double z1, double z2,
                                 const Tolerances& tol) {
  if (!(z1 < z2)) throw Error(ErrorKind::InvalidArgument, "lls_bilinear_check needs z1 < z2");
  const ChannelPhase phase(p, c, std::max(k, k_prime));
  const ModeFunction u(p, c, k, phase(k), 1.0, 1.0);
  const ModeFunction v(p, c, k_prime, phase(k_prime), 1.0, 1.0);
  const auto bil = [&](double z) { return alpha_bilinear(u.spinor(z), v.spinor(z)); };
  const cplx lhs = (bil(z2) - bil(z1)) / I;
  const auto overlap = [&](double z) {
    const Spinor2 a = u.spinor(z), b = v.spinor(z);
    return std::conj(a.upper) * b.upper + std::conj(a.lower) * b.lower;
  };
  const cplx rhs = (v.energy() - u.energy()) * integrate_complex(p, overlap, z1, z2, std::max(k, k_prime), tol);
  return finish(lhs, rhs);
}

IdentityCheck lls_derivative_check(const ChannelPhase& phase, double k, double z1, double z2, Endpoints ends,
                                   const Tolerances& tol) {
  if (!(z1 < z2)) throw Error(ErrorKind::InvalidArgument, "lls_derivative_check needs z1 < z2");
  if (!(k > 0)) throw Error(ErrorKind::InvalidArgument, "lls_derivative_check needs k > 0");
  const PotentialSpec& p = phase.potential();
  const Channel c = phase.channel();
  const auto mode = [&](double kk) { return ModeFunction(p, c, kk, phase(kk), 1.0, 1.0); };
  const ModeFunction u = mode(k);
  const auto at = [&](const ModeFunction& f, double z) {
    return ends == Endpoints::asymptotic ? f.spinor(z) : f.propagated_spinor(z);
  };
  // du/dk at z by Richardson extrapolation of central differences
  const double reach = std::max({1.0, std::abs(z1), std::abs(z2)});
  const double h = std::min(1e-2 * k, 5e-3 / reach);
  const ModeFunction up1 = mode(k + h), dn1 = mode(k - h);
  const ModeFunction up2 = mode(k + 0.5 * h), dn2 = mode(k - 0.5 * h);
  const auto dudk = [&](double z) {
    const Spinor2 a1 = at(up1, z), b1 = at(dn1, z), a2 = at(up2, z), b2 = at(dn2, z);
    const cplx d1u = (a1.upper - b1.upper) / (2 * h), d1l = (a1.lower - b1.lower) / (2 * h);
    const cplx d2u = (a2.upper - b2.upper) / h, d2l = (a2.lower - b2.lower) / h;
    return Spinor2{(4.0 * d2u - d1u) / 3.0, (4.0 * d2l - d1l) / 3.0};
  };
  const auto bil = [&](double z) { return alpha_bilinear(at(u, z), dudk(z)); };
  const cplx lhs = (bil(z2) - bil(z1)) / I;
  const cplx rhs = (k / u.energy()) * u.integral(z1, z2, tol);
  return finish(lhs, rhs);
}

IdentityCheck lls_derivative_check(const PotentialSpec& p, Channel c, double k, double z1, double z2, Endpoints ends,
                                   const Tolerances& tol) {
  return lls_derivative_check(ChannelPhase(p, c, k), k, z1, z2, ends, tol);
}

double normalization_factor(const ChannelPhase& phase, double k, const BoxSpec& box, const Tolerances& tol) {
  require_on_shell(phase, k, box);
  const double arg = 1.0 + phase.derivative(k, tol) / box.L;
  if (!(arg > 0)) throw Error(ErrorKind::NegativeArgument, "1 + Delta'/L is not positive");
  return 1.0 / std::sqrt(arg);
}

double normalization_factor(const PotentialSpec& p, Channel c, double k, const BoxSpec& box,
                            const Tolerances& tol) {
  return normalization_factor(ChannelPhase(p, c, k), k, box, tol);
}

double direct_norm(const ChannelPhase& phase, double k, const BoxSpec& box, const Tolerances& tol) {
  require_on_shell(phase, k, box);
  const ModeFunction u(phase.potential(), phase.channel(), k, phase(k), 1.0, box.L);
  return 1.0 / std::sqrt(u.integral(-box.L, box.L, tol));
}

double direct_norm(const PotentialSpec& p, Channel c, double k, const BoxSpec& box, const Tolerances& tol) {
  return direct_norm(ChannelPhase(p, c, k), k, box, tol);
}

NormComparison compare_norm(const ChannelPhase& phase, double k, const BoxSpec& box, const Tolerances& tol) {
  NormComparison r;
  r.k = k;
  const double nd = direct_norm(phase, k, box, tol);
  r.N2_direct = nd * nd;
  r.dDelta_dk = phase.derivative(k, tol);
  r.N2_exact_formula = 1.0 / (1.0 + r.dDelta_dk / box.L);
  r.N2_first_order = 1.0 - r.dDelta_dk / box.L;
  return r;
}

}  // namespace vcl
