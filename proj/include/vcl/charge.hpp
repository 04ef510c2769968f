#pragma once

#include <map>
#include <string>
#include <vector>

#include "vcl/box.hpp"
#include "vcl/scattering.hpp"

namespace vcl {

/// -(1/L) dDelta/dk for an on-shell mode.
double uniform_density_shift(const ChannelPhase& phase, double k, const BoxSpec& box, const Tolerances& tol = {});

/// First-order closed form of 2 int_a^L rho:
/// 1 - a/L -+ (m/2L|E|k) sin 2(ka + Delta) - (1/L) dDelta/dk, upper sign for even.
/// Throws KTooSmall for k < 1e-3 m.
double mode_exterior_charge(const ChannelPhase& phase, const ModeSolution& mode, const BoxSpec& box,
                            const Tolerances& tol = {});

/// 2 int_a^L rho by quadrature of the matched mode, with N from direct normalization.
double mode_exterior_charge_numeric(const ChannelPhase& phase, const ModeSolution& mode, const BoxSpec& box,
                                    const Tolerances& tol = {});

/// 2 int_a^L rho integrated analytically from the exterior form with the mode's N.
double mode_exterior_charge_exact(const ModeSolution& mode, double a, const BoxSpec& box, double m);

/// C^2 (2m / kappa(E + m)) e^{-2 kappa a}.
double bound_exterior_charge(const BoundState& b, double a, double m);
/// 2 int_a^zmax of the bound density by quadrature.
double bound_exterior_charge_numeric(const PotentialSpec& p, const BoundState& b, double z_max,
                                     const Tolerances& tol = {});

struct ModeCharge {
  Channel channel;
  long n = 0;
  double k = 0;
  double exact = 0;        // analytic integral of the exact exterior density
  double closed_form = 0;  // first-order formula, NaN below the k cutoff
};

struct ChargeReport {
  double L = 0;
  double E_max = 0;
  std::vector<ModeCharge> modes;
  std::map<std::string, double> uniform_shift;  // per channel, summed over modes
  double phase_part = 0;     // from N^2 - 1
  double mass_part = 0;      // from the (m/2L|E|k) sin 2(ka + Delta) terms
  double counting_part = 0;  // from 1 - a/L per mode
  double bound_part = 0;
  double bound_tail = 0;     // exterior bound charge beyond L, not included
  double Q0_ext_direct = 0;
  double Q0_ext_phase_formula = 0;  // (1/2pi)(d+(inf) - d+(0) - d-(inf) + d-(0))
  double Q0 = 0;                    // total vacuum charge from the same spectrum
  double mass_term_branch_sign = 1; // the m-term keeps its sign on the negative branch
};

/// Exterior vacuum charge 1/2 (sum_- - sum_+) over the level-cut box spectrum,
/// split into phase, mass, counting and bound parts.
ChargeReport vacuum_charge_exterior(const PotentialSpec& p, const BoxSpec& box, const Tolerances& tol = {});

}  // namespace vcl
