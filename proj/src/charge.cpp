#include "vcl/charge.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "vcl/error.hpp"
#include "vcl/normalization.hpp"

namespace vcl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinK = 1e-3;  // in units of m

double parity_term(Channel c) { return c.parity == Parity::even ? 1.0 : -1.0; }

}  // namespace

double uniform_density_shift(const ChannelPhase& phase, double k, const BoxSpec& box, const Tolerances& tol) {
  if (std::abs(quantization_residual(phase, box, k)) > 1e-6)
    throw Error(ErrorKind::OffShell, "uniform_density_shift needs an on-shell mode");
  return -phase.derivative(k, tol) / box.L;
}

double mode_exterior_charge(const ChannelPhase& phase, const ModeSolution& mode, const BoxSpec& box,
                            const Tolerances& tol) {
  const double m = phase.potential().mass();
  if (mode.k < kMinK * m) throw Error(ErrorKind::KTooSmall, "closed form needs k >= 1e-3 m");
  const double a = phase.potential().support();
  const double L = box.L;
  const double eabs = std::sqrt(mode.k * mode.k + m * m);
  const double osc = m / (2.0 * L * eabs * mode.k) * std::sin(2.0 * (mode.k * a + mode.delta));
  return 1.0 - a / L - parity_term(mode.channel) * osc - phase.derivative(mode.k, tol) / L;
}

double mode_exterior_charge_numeric(const ChannelPhase& phase, const ModeSolution& mode, const BoxSpec& box,
                                    const Tolerances& tol) {
  const double n = direct_norm(phase, mode.k, box, tol);
  const ModeFunction u(phase.potential(), mode.channel, mode.k, mode.delta, n, box.L);
  const double a = phase.potential().support();
  return 2.0 * u.integral(a, box.L, tol);
}

double mode_exterior_charge_exact(const ModeSolution& mode, double a, const BoxSpec& box, double m) {
  const double L = box.L;
  const double n2 = mode.norm * mode.norm;
  if (mode.k == 0.0) return 2.0 * n2 * (L - a) / L;
  const double eabs = std::sqrt(mode.k * mode.k + m * m);
  const double osc = m / (2.0 * eabs * mode.k) *
                     (std::sin(2.0 * (mode.k * L + mode.delta)) - std::sin(2.0 * (mode.k * a + mode.delta)));
  return n2 / L * ((L - a) + parity_term(mode.channel) * osc);
}

double bound_exterior_charge(const BoundState& b, double a, double m) {
  return b.C * b.C * 2.0 * m / (b.kappa * (b.energy + m)) * std::exp(-2.0 * b.kappa * a);
}

double bound_exterior_charge_numeric(const PotentialSpec& p, const BoundState& b, double z_max,
                                     const Tolerances& tol) {
  const double a = p.support();
  const double lo = std::nextafter(a, z_max);
  const int panels = std::max(16, int(std::ceil((z_max - a) * b.kappa)));
  return 2.0 * integrate([&](double z) { return density(bound_spinor(p, b, z)); }, lo, z_max, tol, panels);
}

ChargeReport vacuum_charge_exterior(const PotentialSpec& p, const BoxSpec& box, const Tolerances& tol) {
  box.validate(p);
  const double m = p.mass();
  const double a = p.support();
  const double L = box.L;
  const long nlev = box.level_cutoff(m);

  ChargeReport r;
  r.L = L;
  r.E_max = box.E_max;
  double counted_pos = 0, counted_neg = 0;
  double dpi = 0, dpz = 0, dni = 0, dnz = 0;

  for (Channel c : kAllChannels) {
    const ChannelPhase phase(p, c, box.k_max(m) + 1.0);
    const double sb = branch_sign(c.branch);
    if (sb > 0) {
      dpi += phase.at_infinity();
      dpz += phase.at_zero();
    } else {
      dni += phase.at_infinity();
      dnz += phase.at_zero();
    }
    double shift = 0;
    for (const auto& md : enumerate_modes(phase, box, tol)) {
      if (md.n > nlev) continue;
      ModeCharge mc;
      mc.channel = c;
      mc.n = md.n;
      mc.k = md.k;
      mc.exact = mode_exterior_charge_exact(md, a, box, m);
      mc.closed_form = std::numeric_limits<double>::quiet_NaN();
      (sb > 0 ? counted_pos : counted_neg) += 1;
      r.counting_part += -0.5 * sb * (1.0 - a / L);
      if (md.k > 0) {
        const double n2 = md.norm * md.norm;
        const double eabs = std::sqrt(md.k * md.k + m * m);
        const double osc = m / (2.0 * eabs * md.k) *
                           (std::sin(2.0 * (md.k * L + md.delta)) - std::sin(2.0 * (md.k * a + md.delta)));
        r.phase_part += -0.5 * sb * (n2 - 1.0) * (1.0 - a / L);
        r.mass_part += -0.5 * sb * n2 * parity_term(c) * osc / L;
        const double dd = phase.derivative(md.k, tol);
        shift += -dd / L;
        if (md.k >= kMinK * m) {
          const double osc_a = m / (2.0 * L * eabs * md.k) * std::sin(2.0 * (md.k * a + md.delta));
          mc.closed_form = 1.0 - a / L - parity_term(c) * osc_a - dd / L;
        }
      } else {
        // threshold mode: 2N^2 = 1 carries the full (1 - a/L)
        r.phase_part += -0.5 * sb * (2.0 * md.norm * md.norm - 1.0) * (1.0 - a / L);
      }
      r.Q0_ext_direct += -0.5 * sb * mc.exact;
      r.modes.push_back(mc);
    }
    r.uniform_shift[to_string(c)] = shift;
  }

  double bound_pos = 0, bound_neg = 0;
  for (const auto& b : find_bound_states(p, tol)) {
    if (std::abs(b.energy) < tol.zero_energy_eps) continue;
    const double inside_box = bound_exterior_charge(b, a, m) - bound_exterior_charge(b, L, m);
    r.bound_tail += bound_exterior_charge(b, L, m);
    const double sb = b.energy > 0 ? 1.0 : -1.0;
    r.bound_part += -0.5 * sb * inside_box;
    r.Q0_ext_direct += -0.5 * sb * inside_box;
    (sb > 0 ? bound_pos : bound_neg) += 1;
  }
  r.Q0 = 0.5 * ((counted_neg + bound_neg) - (counted_pos + bound_pos));
  r.Q0_ext_phase_formula = (dpi - dpz - dni + dnz) / (2.0 * kPi);
  return r;
}

}  // namespace vcl
