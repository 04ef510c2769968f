// Acceptance run: one PASS/FAIL line per criterion.
// Exits nonzero only when a criterion outside the documented-failing set fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "vcl/box.hpp"
#include "vcl/charge.hpp"
#include "vcl/normalization.hpp"
#include "vcl/scattering.hpp"

using namespace vcl;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Channel kEvenPos{Parity::even, Branch::positive};

// the naive continuum formula agrees with lambda/pi only below the first crossing
const std::set<int> kDocumentedFailing = {2};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const std::vector<double> kLambdaGrid = {0.1 * kPi, 0.3 * kPi, 0.45 * kPi, 0.55 * kPi, 0.8 * kPi,
                                         1.2 * kPi, 1.6 * kPi, 2.4 * kPi, 2.9 * kPi};

long int_part(double lambda) { return long(std::floor(lambda / kPi + 0.5)); }

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Verdict integer_charge() {
  int bad = 0;
  std::string got;
  for (double lam : kLambdaGrid) {
    const auto p = PotentialSpec::delta(lam);
    const double q200 = spectral_asymmetry(p, {200.0, 25.0}).Q0;
    const double q100 = spectral_asymmetry(p, {100.0, 25.0}).Q0;
    const double want = double(int_part(lam));
    if (q200 != want || q100 != want) ++bad;
    got += fmt("%g ", q200);
  }
  return {bad == 0, fmt("Q0 = [ %s] at L=200, %d mismatches against Int[lambda/pi + 1/2] or L=100", got.c_str(), bad)};
}

Verdict naive_charge() {
  int within = 0;
  double worst_identity = 0;
  for (double lam : kLambdaGrid) {
    const double naive = naive_vacuum_charge(PotentialSpec::delta(lam)).value;
    within += std::abs(naive - lam / kPi) <= 1e-3;
    worst_identity = std::max(worst_identity, std::abs(naive - (lam / kPi - double(int_part(lam)))));
  }
  return {within == int(kLambdaGrid.size()),
          fmt("%d/%zu points within 1e-3 of lambda/pi; beyond lambda = pi/2 the value is lambda/pi - Q0 "
              "(worst deviation from that %.2e)",
              within, kLambdaGrid.size(), worst_identity)};
}

Verdict jump_location() {
  const double step = 0.005 * kPi;
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.4 * kPi + i * step);
  const auto rows = crossing_sweep(grid, {200.0, 25.0});
  int jump = -1, cross = -1;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (jump < 0 && rows[i].Q0_exact > 0.5) jump = int(i);
    if (cross < 0 && rows[i].E_b_min && *rows[i].E_b_min <= 1e-6) cross = int(i);
  }
  if (jump <= 0 || cross < 0) return {false, "no jump or no crossing in the window"};
  const double at = 0.5 * (grid[jump - 1] + grid[jump]);
  const bool ok = std::abs(at - kPi / 2) <= step && std::abs(jump - cross) <= 1 &&
                  std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.converged; });
  return {ok, fmt("jump at lambda/pi = %.4f, E_b crosses 0 at grid index %d vs jump index %d", at / kPi, cross, jump)};
}

Verdict normalization_slope() {
  const auto p = PotentialSpec::delta(1.0);
  const ChannelPhase ph(p, kEvenPos);
  std::vector<double> Ls{25, 50, 100, 200}, res;
  for (double L : Ls) {
    const BoxSpec box{L, 3.0};
    double worst = 0;
    int used = 0;
    for (const auto& m : enumerate_modes(ph, box)) {
      if (m.k <= 0.5 || used == 3) continue;
      const auto c = compare_norm(ph, m.k, box);
      worst = std::max(worst, std::abs(c.N2_direct - c.N2_first_order));
      ++used;
    }
    res.push_back(worst);
  }
  std::vector<double> lx, ly;
  for (size_t i = 0; i < Ls.size(); ++i) lx.push_back(std::log(Ls[i])), ly.push_back(std::log(res[i]));
  const double slope = slope_fit(lx, ly);
  const bool ok = res[1] <= 10.0 / (50.0 * 50.0) && std::abs(slope + 2.0) <= 0.1;
  return {ok, fmt("residual %.3e at L=50 (bound %.1e), slope %.3f", res[1], 10.0 / 2500.0, slope)};
}

Verdict lls_lemma() {
  struct Sample {
    PotentialSpec p;
    Channel c;
    double k;
  };
  const auto d = PotentialSpec::delta(1.0);
  const auto w = PotentialSpec::square_well(1.0, 1.0);
  const Channel eo[4] = {kAllChannels[0], kAllChannels[1], kAllChannels[2], kAllChannels[3]};
  const std::vector<Sample> samples = {{d, eo[0], 0.3}, {d, eo[1], 0.8}, {d, eo[2], 1.5}, {d, eo[3], 2.5},
                                       {d, eo[0], 5.0}, {w, eo[2], 0.4}, {w, eo[3], 0.9}, {w, eo[0], 1.7},
                                       {w, eo[1], 3.0}, {w, eo[2], 6.0}};
  double worst = 0, worst_agree = 0;
  for (const auto& s : samples) {
    const ChannelPhase ph(s.p, s.c);
    const auto a = lls_derivative_check(ph, s.k, -15.0, 15.0, Endpoints::asymptotic);
    const auto b = lls_derivative_check(ph, s.k, -15.0, 15.0, Endpoints::propagated);
    worst = std::max({worst, a.relative, b.relative});
    worst_agree = std::max(worst_agree, std::abs(a.lhs - b.lhs) / std::abs(a.lhs));
  }
  return {worst <= 1e-7 && worst_agree <= 1e-8,
          fmt("worst relative residual %.2e, endpoint agreement %.2e", worst, worst_agree)};
}

Verdict sum_rule() {
  double worst = 0;
  for (double lam : {0.5, 1.0, 2.0}) {
    const auto p = PotentialSpec::delta(lam);
    for (Branch b : {Branch::positive, Branch::negative}) {
      const double sign = b == Branch::positive ? 1.0 : -1.0;
      const double sum = ChannelPhase(p, {Parity::even, b})(100.0) + ChannelPhase(p, {Parity::odd, b})(100.0);
      worst = std::max(worst, std::abs(sum - sign * lam));
    }
  }
  return {worst <= 1e-3, fmt("worst |sum - (+-lambda)| = %.2e", worst)};
}

Verdict exterior_closed_forms() {
  const auto w = PotentialSpec::square_well(1.0, 1.0);
  const BoxSpec box{100.0, 7.0};
  double worst = 0;
  int count = 0;
  for (Channel c : kAllChannels) {
    const ChannelPhase ph(w, c);
    const auto modes = enumerate_modes(ph, box);
    for (double target : {0.3, 0.8, 1.5, 3.0, 6.0}) {
      const ModeSolution* best = nullptr;
      for (const auto& m : modes)
        if (m.k > 0 && (!best || std::abs(m.k - target) < std::abs(best->k - target))) best = &m;
      const double cf = mode_exterior_charge(ph, *best, box);
      const double q = mode_exterior_charge_numeric(ph, *best, box);
      worst = std::max(worst, std::abs(cf - q));
      ++count;
    }
  }
  const double bound = 20.0 / (100.0 * 100.0);
  return {worst <= bound && count == 20, fmt("%d modes, worst %.2e (bound %.1e)", count, worst, bound)};
}

Verdict bound_exterior() {
  double worst = 0;
  int count = 0;
  for (double lam : {0.3, 1.0, 2.0}) {
    const auto p = PotentialSpec::delta(lam);
    for (const auto& b : find_bound_states(p)) {
      const double cf = bound_exterior_charge(b, 0.0, 1.0);
      const double q = bound_exterior_charge_numeric(p, b, 40.0 / b.kappa);
      worst = std::max(worst, std::abs(cf - q));
      ++count;
    }
  }
  return {count > 0 && worst <= 1e-8, fmt("%d bound states, worst %.2e", count, worst)};
}

Verdict exterior_assembly() {
  const auto p = PotentialSpec::delta(1.0);
  std::vector<ChargeReport> r;
  for (double L : {50.0, 100.0, 200.0}) r.push_back(vacuum_charge_exterior(p, {L, 25.0}));
  const double d1 = std::abs(r[1].Q0_ext_direct - r[0].Q0_ext_direct);
  const double d2 = std::abs(r[2].Q0_ext_direct - r[1].Q0_ext_direct);
  // a delta has no interior, so the direct sum can be converged to roundoff already
  const bool shrinks = d2 * 2.0 <= d1 || (d1 < 1e-9 && d2 < 1e-9);
  const double phase_gap = std::abs(r[2].phase_part - r[2].Q0_ext_phase_formula);
  const bool integer = std::all_of(r.begin(), r.end(), [](const ChargeReport& c) { return c.Q0 == std::round(c.Q0); });
  return {shrinks && phase_gap <= 1e-3 && integer,
          fmt("Q0_ext %.10f, successive differences %.2e, %.2e; phase term vs formula %.2e at L=200; Q0 = %g",
              r[2].Q0_ext_direct, d1, d2, phase_gap, r[2].Q0)};
}

Verdict state_count() {
  const BoxSpec box{100.0, 25.0};
  const auto weak = spectral_asymmetry(PotentialSpec::delta(0.3), box);
  const auto free = spectral_asymmetry(PotentialSpec::free(), box);
  const long tot_pos = weak.continuum_pos + long(weak.bound_pos.size());
  const long tot_neg = weak.continuum_neg + long(weak.bound_neg.size());
  const bool totals = tot_pos == free.continuum_pos && tot_neg == free.continuum_neg;
  const bool host_pos = weak.bound_pos.size() == 1 && weak.bound_neg.empty();
  const bool deficit = host_pos && weak.continuum_pos == free.continuum_pos - 1 &&
                       weak.continuum_neg == free.continuum_neg;
  return {totals && deficit && weak.zero_energy_states == 0,
          fmt("+ branch %ld continuum + %zu bound vs %ld free; - branch %ld + %zu vs %ld", weak.continuum_pos,
              weak.bound_pos.size(), free.continuum_pos, weak.continuum_neg, weak.bound_neg.size(),
              free.continuum_neg)};
}

Verdict mode_density() {
  const double L = 200.0;
  double worst = 0;
  for (const auto& p : {PotentialSpec::delta(1.0), PotentialSpec::square_well(1.0, 1.0)}) {
    for (Channel c : kAllChannels) {
      const ChannelPhase ph(p, c);
      const auto modes = enumerate_modes(ph, {L, 11.0});
      for (double k0 = 1.0; k0 < 10.0 - 1e-9; k0 += 1.0) {
        std::vector<double> ks, ns;
        for (const auto& m : modes)
          if (m.k >= k0 && m.k < k0 + 1.0) ks.push_back(m.k), ns.push_back(double(m.n));
        const double fitted = 1.0 / slope_fit(ns, ks);
        const double predicted = (L + ph.derivative(k0 + 0.5, {})) / kPi;
        worst = std::max(worst, std::abs(fitted - predicted) / predicted);
      }
    }
  }
  return {worst <= 1e-3, fmt("worst relative residual %.2e over 72 windows", worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"integer vacuum charge", integer_charge},
      {"naive formula gives lambda/pi", naive_charge},
      {"jump location", jump_location},
      {"normalization factor", normalization_slope},
      {"derivative bilinear identity", lls_lemma},
      {"phase-shift sum rule", sum_rule},
      {"exterior charge closed forms", exterior_closed_forms},
      {"bound-state exterior charge", bound_exterior},
      {"exterior vacuum charge assembly", exterior_assembly},
      {"state-count conservation", state_count},
      {"mode-density law", mode_density},
  };
  int unexpected = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const bool documented = kDocumentedFailing.count(id) > 0;
    std::printf("criterion %2d %s: %s%s  %s\n", id, criteria[i].first, v.pass ? "PASS" : "FAIL",
                !v.pass && documented ? " (documented)" : "", v.detail.c_str());
    if (!v.pass && !documented) ++unexpected;
  }
  std::fflush(stdout);
  return unexpected == 0 ? 0 : 1;
}
