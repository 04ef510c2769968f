#pragma once

#include <span>
#include <string>
#include <vector>

#include "vcl/dirac.hpp"
#include "vcl/numerics.hpp"
#include "vcl/potential.hpp"

namespace vcl {

/// Phase shift of `c` at wavevector k > 0, principal value in (-pi/2, pi/2].
/// Throws EvanescentError for k <= 0 (|E| <= m, no scattering state).
double phase_shift(const PotentialSpec& p, Channel c, double k);

/// Large-k limit of a single channel's phase: half of +-integral(V).
double asymptotic_phase(const PotentialSpec& p, Channel c);

/// Sampled continuous phase shift of one channel.
struct PhaseShiftTable {
  Channel channel;
  std::vector<double> k;      // strictly increasing, > 0
  std::vector<double> delta;  // unwrapped, radians
  std::string potential_tag;

  /// Linear interpolation, clamped at the ends.
  double interpolate(double kq) const;
  /// Derivative at sample i by non-uniform central differences.
  double derivative_at(size_t i) const;
};

/// Continuous phase-shift branch of one channel, anchored at large k to
/// asymptotic_phase() and unwrapped downward. Evaluation at any k combines
/// the exact principal value with a branch chosen from an adaptive skeleton
/// table, so the result is exact to matching precision and continuous in k.
class ChannelPhase {
 public:
  ChannelPhase(PotentialSpec p, Channel c, double k_top = 0.0);

  double operator()(double k) const;
  double derivative(double k, const Tolerances& tol) const;
  /// Limit k -> 0+ on this branch.
  double at_zero() const { return zero_value_; }
  double at_infinity() const { return asymptote_; }
  double k_top() const { return skeleton_.k.back(); }

  Channel channel() const { return skeleton_.channel; }
  const PotentialSpec& potential() const { return potential_; }
  const PhaseShiftTable& skeleton() const { return skeleton_; }

  static constexpr double kFloor = 1e-7;  // in units of m

 private:
  PotentialSpec potential_;
  PhaseShiftTable skeleton_;
  double asymptote_ = 0;
  double zero_value_ = 0;
};

/// Unwrapped table on `k_grid`; inserts midpoints where neighbouring samples
/// would differ by pi/2 or more.
PhaseShiftTable phase_shift_table(const PotentialSpec& p, Channel c, std::span<const double> k_grid);

struct SumRuleResult {
  double lhs = 0;  // Delta_even(k_max) + Delta_odd(k_max)
  double rhs = 0;  // +-integral(V)
  double residual = 0;
};

SumRuleResult sum_rule_check(const PotentialSpec& p, Branch branch, double k_max);

/// All bound states with -m < E < m, sorted by energy, normalized on the
/// whole line. Sign scan of the matching residual over `scan_points`
/// energies in (-m + 1e-9 m, m - 1e-9 m), refined by bisection.
std::vector<BoundState> find_bound_states(const PotentialSpec& p, const Tolerances& tol = {},
                                          int scan_points = 2000);

/// Matching residual used by find_bound_states, normalized to |u(a)|.
double bound_state_residual(const PotentialSpec& p, double E, int beta_parity);

/// Full bound-state spinor at any z.
Spinor2 bound_spinor(const PotentialSpec& p, const BoundState& b, double z);

/// A scattering eigenfunction on the whole line: interior transfer-matrix
/// solution matched to the exterior form with the given phase and N.
class ModeFunction {
 public:
  ModeFunction(const PotentialSpec& p, Channel c, double k, double delta, double norm, double L);

  Spinor2 spinor(double z) const;
  /// Interior solution carried to z by transfer matrices, also for |z| > a.
  Spinor2 propagated_spinor(double z) const;
  double density(double z) const { return vcl::density(spinor(z)); }
  double energy() const { return energy_; }
  const ModeParams& params() const { return params_; }
  /// |exterior(a+) - scaled interior(a)| / |exterior(a+)|.
  double continuation_residual() const { return continuation_residual_; }

  /// Integral of the density over [z1, z2] by adaptive quadrature, with
  /// panels no longer than a quarter wavelength outside the support.
  double integral(double z1, double z2, const Tolerances& tol) const;

 private:
  PotentialSpec potential_;
  ModeParams params_;
  double energy_ = 0;
  double a_ = 0;
  int beta_parity_ = 1;
  cplx interior_scale_{1.0};
  double continuation_residual_ = 0;
};

}  // namespace vcl
