#include "vcl/box.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <thread>

#include "vcl/error.hpp"

namespace vcl {

namespace {

constexpr double kPi = std::numbers::pi;

struct Counts {
  long cont_pos = 0, cont_neg = 0;
  long cut_pos = 0, cut_neg = 0;  // energy-cutoff counts
  std::map<std::string, long> by_channel;
};

// Crossings of phi(k) = kL + Delta(k) through multiples of pi on [k_lo, k_hi].
struct Sample {
  double k, phi;
};

void collect_roots(const ChannelPhase& ph, const BoxSpec& box, const Tolerances& tol, const Sample& s0,
                   const Sample& s1, int depth, std::vector<ModeSolution>& out) {
  const double L = box.L;
  const auto phi = [&](double k) { return k * L + ph(k); };
  // split intervals whose phase moves too far to bracket reliably
  if (std::abs(s1.phi - s0.phi) > 0.5 * kPi && depth < 40) {
    const double km = 0.5 * (s0.k + s1.k);
    const Sample sm{km, phi(km)};
    collect_roots(ph, box, tol, s0, sm, depth + 1, out);
    collect_roots(ph, box, tol, sm, s1, depth + 1, out);
    return;
  }
  const double lo = std::min(s0.phi, s1.phi);
  const double hi = std::max(s0.phi, s1.phi);
  // rising: multiples in (lo, hi]; falling: in [lo, hi); s0 is never counted twice
  long n_first, n_last;
  if (s1.phi >= s0.phi) {
    n_first = long(std::floor(lo / kPi)) + 1;
    n_last = long(std::floor(hi / kPi));
  } else {
    n_first = long(std::ceil(lo / kPi));
    n_last = long(std::ceil(hi / kPi)) - 1;
  }
  const double m = ph.potential().mass();
  const double kfloor = ChannelPhase::kFloor * m;
  for (long n = n_first; n <= n_last; ++n) {
    const auto g = [&](double k) { return phi(k) - n * kPi; };
    const double a = std::max(s0.k, kfloor);
    const double b = s1.k;
    double root;
    const double ga = g(a), gb = g(b);
    if (ga == 0.0) {
      root = a;
    } else if (gb == 0.0) {
      root = b;
    } else if (ga * gb < 0) {
      root = find_root(g, a, b, tol);
    } else {
      root = std::abs(ga) < std::abs(gb) ? a : b;
    }
    ModeSolution ms;
    ms.channel = ph.channel();
    ms.n = n;
    ms.k = root;
    ms.E = channel_energy(ms.channel, root, m);
    ms.delta = ph(root);
    out.push_back(ms);
  }
}

Counts count_modes(const std::array<ChannelPhase, 4>& phases, const BoxSpec& box, const Tolerances& tol) {
  Counts c;
  const double m = phases[0].potential().mass();
  const double kmax = box.k_max(m);
  for (const auto& ph : phases) {
    const auto modes = enumerate_modes(ph, box, tol);
    long kept = 0, cut = 0;
    const long nlev = box.level_cutoff(m);
    for (const auto& md : modes) {
      if (md.n <= nlev) ++kept;
      if (md.k <= kmax) ++cut;
    }
    c.by_channel[to_string(ph.channel())] = kept;
    if (ph.channel().branch == Branch::positive) {
      c.cont_pos += kept;
      c.cut_pos += cut;
    } else {
      c.cont_neg += kept;
      c.cut_neg += cut;
    }
  }
  return c;
}

std::array<ChannelPhase, 4> make_phases(const PotentialSpec& p, double k_top) {
  return {ChannelPhase(p, kAllChannels[0], k_top), ChannelPhase(p, kAllChannels[1], k_top),
          ChannelPhase(p, kAllChannels[2], k_top), ChannelPhase(p, kAllChannels[3], k_top)};
}

}  // namespace

void BoxSpec::validate(const PotentialSpec& p) const {
  if (!(L > p.support()) || !std::isfinite(L))
    throw Error(ErrorKind::InvalidArgument, "box half-length must exceed the potential support");
  if (!(E_max > p.mass()) || !std::isfinite(E_max))
    throw Error(ErrorKind::InvalidArgument, "E_max must exceed the mass");
}

double BoxSpec::k_max(double m) const { return std::sqrt(std::max(0.0, E_max * E_max - m * m)); }

long BoxSpec::level_cutoff(double m) const { return long(std::floor(k_max(m) * L / kPi)); }

double quantization_residual(const ChannelPhase& phase, const BoxSpec& box, double k) {
  if (!(k > 0)) throw Error(ErrorKind::InvalidArgument, "quantization_residual needs k > 0");
  return std::sin(k * box.L + phase(k));
}

double quantization_residual(const PotentialSpec& p, Channel c, const BoxSpec& box, double k) {
  if (!(k > 0)) throw Error(ErrorKind::InvalidArgument, "quantization_residual needs k > 0");
  // the sine is insensitive to the branch of Delta up to sign
  return std::sin(k * box.L + phase_shift(p, c, k));
}

bool has_threshold_mode(const ChannelPhase& phase) {
  if (phase.channel().parity != Parity::even) return false;
  const double z = phase.at_zero() / kPi;
  return std::abs(z - std::round(z)) < 1e-6;
}

std::vector<ModeSolution> enumerate_modes(const ChannelPhase& ph, const BoxSpec& box, const Tolerances& tol) {
  const PotentialSpec& p = ph.potential();
  box.validate(p);
  const double m = p.mass();
  const double L = box.L;
  const long nlev = box.level_cutoff(m);

  double dmax = 0;
  for (double d : ph.skeleton().delta) dmax = std::max(dmax, std::abs(d));
  const double k_top = box.k_max(m) + (dmax + 2.0 * kPi) / L;

  std::vector<ModeSolution> out;
  if (has_threshold_mode(ph)) {
    ModeSolution z;
    z.channel = ph.channel();
    z.n = long(std::round(ph.at_zero() / kPi));
    z.k = 0;
    z.E = channel_energy(z.channel, 0.0, m);
    z.norm = 1.0 / std::sqrt(2.0);
    z.delta = ph.at_zero();
    out.push_back(z);
  }

  const double step = kPi / (4.0 * L);
  const long n_steps = long(std::ceil(k_top / step));
  constexpr long kMaxSteps = 50'000'000;
  if (n_steps > kMaxSteps) throw Error(ErrorKind::RootScanOverflow, "box scan grid too large");

  // threshold limits are multiples of pi/2; snap away the kFloor offset
  double phi0 = ph.at_zero();
  const double q = std::round(phi0 / (0.5 * kPi));
  if (std::abs(phi0 - 0.5 * kPi * q) < 1e-5) phi0 = 0.5 * kPi * q;
  Sample prev{0.0, phi0};
  for (long i = 1; i <= n_steps; ++i) {
    const double k = std::min(k_top, i * step);
    const Sample cur{k, k * L + ph(k)};
    collect_roots(ph, box, tol, prev, cur, 0, out);
    prev = cur;
  }
  // keep the level cutoff plus the slack needed for energy-cutoff counting
  std::vector<ModeSolution> kept;
  const double kmax = box.k_max(m);
  for (auto& md : out) {
    if (md.n > nlev && md.k > kmax) continue;
    if (md.k > 0) {
      const double dd = ph.derivative(md.k, tol);
      const double arg = 1.0 + dd / L;
      md.norm = arg > 0 ? 1.0 / std::sqrt(arg) : std::numeric_limits<double>::quiet_NaN();
    }
    kept.push_back(md);
  }
  std::sort(kept.begin(), kept.end(), [](const ModeSolution& a, const ModeSolution& b) { return a.k < b.k; });
  return kept;
}

std::vector<ModeSolution> enumerate_modes(const PotentialSpec& p, const BoxSpec& box, Channel c,
                                          const Tolerances& tol) {
  box.validate(p);
  const ChannelPhase ph(p, c, box.k_max(p.mass()) + 1.0);
  return enumerate_modes(ph, box, tol);
}

NaiveCharge naive_vacuum_charge(const PotentialSpec& p, const Tolerances& tol) {
  NaiveCharge r;
  for (Channel c : kAllChannels) {
    const ChannelPhase ph(p, c);
    if (c.branch == Branch::positive) {
      r.delta_pos_inf += ph.at_infinity();
      r.delta_pos_zero += ph.at_zero();
    } else {
      r.delta_neg_inf += ph.at_infinity();
      r.delta_neg_zero += ph.at_zero();
    }
  }
  for (const auto& b : find_bound_states(p, tol)) {
    if (b.energy > tol.zero_energy_eps) ++r.bound_pos;
    if (b.energy < -tol.zero_energy_eps) ++r.bound_neg;
  }
  r.value = 0.5 * ((r.delta_pos_inf - r.delta_pos_zero - r.delta_neg_inf + r.delta_neg_zero) / kPi +
                   r.bound_pos - r.bound_neg);
  return r;
}

SpectrumReport spectral_asymmetry(const PotentialSpec& p, const BoxSpec& box, const Tolerances& tol) {
  box.validate(p);
  const double m = p.mass();
  SpectrumReport rep;
  rep.E_max = box.E_max;
  for (const auto& b : find_bound_states(p, tol)) {
    if (b.energy > tol.zero_energy_eps) rep.bound_pos.push_back(b.energy);
    else if (b.energy < -tol.zero_energy_eps) rep.bound_neg.push_back(b.energy);
    else ++rep.zero_energy_states;
  }
  const BoxSpec doubled{box.L, 2.0 * box.E_max};
  const auto phases = make_phases(p, doubled.k_max(m) + 1.0);
  const Counts base = count_modes(phases, box, tol);
  const Counts twice = count_modes(phases, doubled, tol);

  const auto q0 = [&](const Counts& c) {
    return 0.5 * (double(c.cont_neg + long(rep.bound_neg.size())) - double(c.cont_pos + long(rep.bound_pos.size())));
  };
  rep.continuum_pos = base.cont_pos;
  rep.continuum_neg = base.cont_neg;
  rep.continuum_by_channel = base.by_channel;
  rep.Q0 = q0(base);
  rep.Q0_energy_cutoff =
      0.5 * (double(base.cut_neg + long(rep.bound_neg.size())) - double(base.cut_pos + long(rep.bound_pos.size())));
  rep.half_integer_boundary = rep.zero_energy_states > 0;

  double naive = 0.0;
  {
    double dpi = 0, dpz = 0, dni = 0, dnz = 0;
    for (const auto& ph : phases) {
      if (ph.channel().branch == Branch::positive) {
        dpi += ph.at_infinity();
        dpz += ph.at_zero();
      } else {
        dni += ph.at_infinity();
        dnz += ph.at_zero();
      }
    }
    naive = 0.5 * ((dpi - dpz - dni + dnz) / kPi + double(rep.bound_pos.size()) - double(rep.bound_neg.size()));
  }
  rep.naive_Q0 = naive;

  rep.converged = q0(twice) == rep.Q0;
  if (!rep.converged)
    throw Error(ErrorKind::NotConverged, "vacuum charge changes when E_max is doubled");
  return rep;
}

IntegerCharge integral_vacuum_charge(double lambda) {
  if (!(lambda >= 0)) throw Error(ErrorKind::InvalidArgument, "integral_vacuum_charge needs lambda >= 0");
  const double x = lambda / kPi + 0.5;
  IntegerCharge r;
  r.value = long(std::floor(x));
  r.half_integer_boundary = std::abs(x - std::round(x)) < 1e-12;
  return r;
}

unsigned worker_count() {
  unsigned n = 0;
  if (const char* env = std::getenv("VCL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = unsigned(v);
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

std::vector<SweepRow> crossing_sweep(const std::vector<double>& lambda_grid, const BoxSpec& box, double mass,
                                     const Tolerances& tol) {
  for (size_t i = 1; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > lambda_grid[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "lambda grid must be strictly increasing");
  }
  std::vector<SweepRow> rows(lambda_grid.size());
  std::vector<std::exception_ptr> errors(lambda_grid.size());
  std::atomic<size_t> next{0};

  const auto work = [&] {
    for (size_t i = next++; i < rows.size(); i = next++) {
      try {
        const double lam = lambda_grid[i];
        const auto p = PotentialSpec::delta(lam, mass);
        SweepRow r;
        r.lambda = lam;
        r.Q0_formula = integral_vacuum_charge(lam).value;
        SpectrumReport rep;
        try {
          rep = spectral_asymmetry(p, box, tol);
          r.converged = true;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NotConverged) throw;
          r.converged = false;
          rep.Q0 = std::numeric_limits<double>::quiet_NaN();
          rep.naive_Q0 = naive_vacuum_charge(p, tol).value;
        }
        r.Q0_exact = rep.Q0;
        r.Q0_naive = rep.naive_Q0;
        r.n_bound_pos = int(rep.bound_pos.size());
        r.n_bound_neg = int(rep.bound_neg.size());
        for (const auto& b : find_bound_states(p, tol)) r.bound_energies.push_back(b.energy);
        if (!r.bound_energies.empty()) r.E_b_min = r.bound_energies.front();
        rows[i] = std::move(r);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned n = std::min<unsigned>(worker_count(), unsigned(std::max<size_t>(1, rows.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

}  // namespace vcl
