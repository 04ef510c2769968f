#pragma once

#include <map>
#include <optional>
#include <vector>

#include "vcl/dirac.hpp"
#include "vcl/numerics.hpp"
#include "vcl/potential.hpp"
#include "vcl/scattering.hpp"

namespace vcl {

/// Periodic box [-L, L] with spectral cutoff E_max.
struct BoxSpec {
  double L = 100.0;
  double E_max = 25.0;

  /// Throws InvalidArgument unless L > support(p) and E_max > m.
  void validate(const PotentialSpec& p) const;
  double k_max(double m) const;
  /// Highest mode label kept per channel, floor(k_max L / pi).
  long level_cutoff(double m) const;
};

struct ModeSolution {
  Channel channel;
  long n = 0;     // kL + Delta(k) = n pi
  double k = 0;   // 0 only for a threshold mode
  double E = 0;
  double norm = 1;
  double delta = 0;
};

/// sin(kL + Delta_c(k)). Its zeros are the box modes of channel c.
double quantization_residual(const PotentialSpec& p, Channel c, const BoxSpec& box, double k);
double quantization_residual(const ChannelPhase& phase, const BoxSpec& box, double k);

/// All modes of channel c with label n <= level_cutoff, plus the k = 0 mode
/// when the channel has one. Roots are bracketed on a grid finer than
/// pi/(4L) and refined to tol.root_abs.
std::vector<ModeSolution> enumerate_modes(const PotentialSpec& p, const BoxSpec& box, Channel c,
                                          const Tolerances& tol = {});
std::vector<ModeSolution> enumerate_modes(const ChannelPhase& phase, const BoxSpec& box,
                                          const Tolerances& tol = {});

/// True when channel c carries a k = 0 box mode: even channels whose phase
/// tends to a multiple of pi at threshold.
bool has_threshold_mode(const ChannelPhase& phase);

struct SpectrumReport {
  long continuum_pos = 0;  // modes kept by the level cutoff, both parities
  long continuum_neg = 0;
  std::vector<double> bound_pos;  // bound energies > zero_energy_eps
  std::vector<double> bound_neg;  // bound energies < -zero_energy_eps
  int zero_energy_states = 0;
  double Q0 = 0;                  // 1/2 (N_- - N_+), integer unless a zero mode is present
  double Q0_energy_cutoff = 0;    // same with an |E| <= E_max cutoff instead of a level cutoff
  double naive_Q0 = 0;
  double E_max = 0;
  bool converged = false;
  bool half_integer_boundary = false;
  std::map<std::string, long> continuum_by_channel;
};

/// Vacuum charge by explicit counting in the box, checked against the same
/// count at 2 E_max. Throws NotConverged if the two differ.
SpectrumReport spectral_asymmetry(const PotentialSpec& p, const BoxSpec& box, const Tolerances& tol = {});

struct NaiveCharge {
  double delta_pos_inf = 0, delta_pos_zero = 0;
  double delta_neg_inf = 0, delta_neg_zero = 0;
  int bound_pos = 0, bound_neg = 0;
  double value = 0;
};

/// 1/2 {(1/pi)(d+(inf) - d+(0) - d-(inf) + d-(0)) + N+ - N-}, evaluated from
/// the anchored channel phases and bound-state counts.
NaiveCharge naive_vacuum_charge(const PotentialSpec& p, const Tolerances& tol = {});

struct IntegerCharge {
  long value = 0;
  bool half_integer_boundary = false;
};

/// floor(lambda/pi + 1/2).
IntegerCharge integral_vacuum_charge(double lambda);

struct SweepRow {
  double lambda = 0;
  double Q0_exact = 0;
  double Q0_naive = 0;
  long Q0_formula = 0;
  int n_bound_pos = 0;
  int n_bound_neg = 0;
  std::optional<double> E_b_min;  // lowest bound energy, if any
  bool converged = false;
  std::vector<double> bound_energies;
};

/// Delta-potential sweep over an increasing lambda grid. Points run on up to
/// worker_count() threads; rows come back in grid order.
std::vector<SweepRow> crossing_sweep(const std::vector<double>& lambda_grid, const BoxSpec& box,
                                     double mass = 1.0, const Tolerances& tol = {});

/// Worker cap from VCL_THREADS (0 or unset means hardware concurrency).
unsigned worker_count();

}  // namespace vcl
