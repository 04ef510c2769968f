#include "vcl/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vcl/error.hpp"

namespace vcl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

// Map to (-pi/2, pi/2].
double wrap_half_pi(double x) {
  double y = x - kPi * std::round(x / kPi);
  if (y <= -0.5 * kPi) y += kPi;
  if (y > 0.5 * kPi) y -= kPi;
  return y;
}

// Phase theta (mod pi) of the exterior form matching u at z = a.
double matching_phase(Channel c, double k, double m, const Spinor2& u) {
  const double r = k / (std::sqrt(k * k + m * m) + m);
  double sn = 0, cs = 0;
  if (c.branch == Branch::positive) {
    if (c.parity == Parity::even) {  // (cos, i r sin)
      sn = u.lower.imag();
      cs = r * u.upper.real();
    } else {  // (i sin, r cos)
      sn = r * u.upper.imag();
      cs = u.lower.real();
    }
  } else {
    if (c.parity == Parity::even) {  // (-i r sin, cos)
      sn = -u.upper.imag();
      cs = r * u.lower.real();
    } else {  // (-r cos, i sin)
      sn = r * u.lower.imag();
      cs = -u.upper.real();
    }
  }
  return std::atan2(sn, cs);
}

std::vector<double> skeleton_grid(const PotentialSpec& p, double k_top) {
  const double m = p.mass();
  const double a = p.support();
  const double k_floor = ChannelPhase::kFloor * m;
  std::vector<double> g;
  const int n_log = 240;
  for (int i = 0; i < n_log; ++i)
    g.push_back(k_floor * std::pow(k_top / k_floor, double(i) / (n_log - 1)));
  const double du = a > 0 ? std::min(0.25 * m, kPi / (8.0 * a)) : 0.25 * m;
  const double u_top = a > 0 ? k_top : std::min(k_top, 20.0 * m);
  for (double k = du; k < u_top; k += du) g.push_back(k);
  g.push_back(k_top);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end(), [](double x, double y) { return std::abs(x - y) < 1e-14 * std::max(1.0, y); }), g.end());
  return g;
}

}  // namespace

double phase_shift(const PotentialSpec& p, Channel c, double k) {
  if (!(k > 0)) throw Error(ErrorKind::EvanescentError, "phase_shift needs k > 0 (|E| > m)");
  const double m = p.mass();
  const double a = p.support();
  const double E = channel_energy(c, k, m);
  const Spinor2 u = interior_solution(p, E, beta_parity(c), a);
  return wrap_half_pi(matching_phase(c, k, m, u) - k * a);
}

double asymptotic_phase(const PotentialSpec& p, Channel c) {
  return 0.5 * branch_sign(c.branch) * p.integral();
}

double PhaseShiftTable::interpolate(double kq) const {
  if (k.empty()) return 0.0;
  if (kq <= k.front()) return delta.front();
  if (kq >= k.back()) return delta.back();
  const auto it = std::upper_bound(k.begin(), k.end(), kq);
  const size_t i = size_t(it - k.begin());
  const double t = (kq - k[i - 1]) / (k[i] - k[i - 1]);
  return delta[i - 1] + t * (delta[i] - delta[i - 1]);
}

double PhaseShiftTable::derivative_at(size_t i) const {
  const size_t n = k.size();
  if (n < 2) return 0.0;
  if (i == 0) return (delta[1] - delta[0]) / (k[1] - k[0]);
  if (i + 1 == n) return (delta[n - 1] - delta[n - 2]) / (k[n - 1] - k[n - 2]);
  const double h1 = k[i] - k[i - 1];
  const double h2 = k[i + 1] - k[i];
  return (delta[i + 1] * h1 * h1 - delta[i - 1] * h2 * h2 + delta[i] * (h2 * h2 - h1 * h1)) /
         (h1 * h2 * (h1 + h2));
}

ChannelPhase::ChannelPhase(PotentialSpec p, Channel c, double k_top) : potential_(std::move(p)) {
  const double m = potential_.mass();
  const double a = potential_.support();
  double top = std::max(100.0 * m, a > 0 ? 100.0 / a : 0.0);
  top = std::max(top, k_top);
  asymptote_ = asymptotic_phase(potential_, c);

  std::vector<double> ks = skeleton_grid(potential_, top);
  std::vector<double> pv(ks.size());
  for (size_t i = 0; i < ks.size(); ++i) pv[i] = phase_shift(potential_, c, ks[i]);

  // refine until neighbouring principal values differ by less than 0.2 rad
  constexpr double kMaxStep = 0.2;
  constexpr size_t kMaxSamples = 200000;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<double> nk{ks.front()}, np{pv.front()};
    for (size_t i = 1; i < ks.size(); ++i) {
      if (std::abs(wrap_half_pi(pv[i] - pv[i - 1])) > kMaxStep && ks[i] - ks[i - 1] > 1e-12 * ks[i]) {
        const double mid = 0.5 * (ks[i] + ks[i - 1]);
        nk.push_back(mid);
        np.push_back(phase_shift(potential_, c, mid));
        changed = true;
      }
      nk.push_back(ks[i]);
      np.push_back(pv[i]);
    }
    ks = std::move(nk);
    pv = std::move(np);
    if (ks.size() > kMaxSamples)
      throw Error(ErrorKind::RootScanOverflow, "phase skeleton refinement exceeded its cap");
  }

  // anchor the top sample to the asymptote, unwrap downward
  std::vector<double> dv(ks.size());
  const size_t n = ks.size();
  dv[n - 1] = pv[n - 1] + kPi * std::round((asymptote_ - pv[n - 1]) / kPi);
  for (size_t i = n - 1; i-- > 0;) dv[i] = dv[i + 1] + wrap_half_pi(pv[i] - pv[i + 1]);

  skeleton_.channel = c;
  skeleton_.k = std::move(ks);
  skeleton_.delta = std::move(dv);
  skeleton_.potential_tag = potential_.tag();
  zero_value_ = skeleton_.delta.front();
}

double ChannelPhase::operator()(double k) const {
  const double principal = phase_shift(potential_, skeleton_.channel, k);
  const double ref = k > skeleton_.k.back() ? asymptote_ : skeleton_.interpolate(k);
  return principal + kPi * std::round((ref - principal) / kPi);
}

double ChannelPhase::derivative(double k, const Tolerances& tol) const {
  return differentiate([this](double x) { return (*this)(x); }, k, tol);
}

PhaseShiftTable phase_shift_table(const PotentialSpec& p, Channel c, std::span<const double> k_grid) {
  for (size_t i = 0; i < k_grid.size(); ++i) {
    if (!(k_grid[i] > 0) || (i > 0 && !(k_grid[i] > k_grid[i - 1])))
      throw Error(ErrorKind::InvalidArgument, "k_grid must be positive and strictly increasing");
  }
  PhaseShiftTable t;
  t.channel = c;
  t.potential_tag = p.tag();
  if (k_grid.empty()) return t;
  const ChannelPhase phase(p, c, k_grid.back());
  for (size_t i = 0; i < k_grid.size(); ++i) {
    const double kq = k_grid[i];
    const double d = phase(kq);
    // insert midpoints until the unwrap invariant holds
    while (!t.k.empty() && std::abs(d - t.delta.back()) >= 0.5 * kPi) {
      double lo = t.k.back();
      double mid = 0.5 * (lo + kq);
      double dm = phase(mid);
      while (std::abs(dm - t.delta.back()) >= 0.5 * kPi) {
        mid = 0.5 * (lo + mid);
        dm = phase(mid);
      }
      t.k.push_back(mid);
      t.delta.push_back(dm);
    }
    t.k.push_back(kq);
    t.delta.push_back(d);
  }
  return t;
}

SumRuleResult sum_rule_check(const PotentialSpec& p, Branch branch, double k_max) {
  const ChannelPhase even(p, {Parity::even, branch}, k_max);
  const ChannelPhase odd(p, {Parity::odd, branch}, k_max);
  SumRuleResult r;
  r.lhs = even(k_max) + odd(k_max);
  r.rhs = branch_sign(branch) * p.integral();
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

double bound_state_residual(const PotentialSpec& p, double E, int beta_par) {
  const double m = p.mass();
  const Spinor2 u = interior_solution(p, E, beta_par, p.support());
  const double sp = std::sqrt(std::max(0.0, (m + E) / (2.0 * m)));
  const double sm = std::sqrt(std::max(0.0, (m - E) / (2.0 * m)));
  const cplx w = u.lower * sp - I * sm * u.upper;
  const double scale = std::sqrt(density(u));
  return (beta_par > 0 ? w.imag() : w.real()) / scale;
}

std::vector<BoundState> find_bound_states(const PotentialSpec& p, const Tolerances& tol, int scan_points) {
  const double m = p.mass();
  const double a = p.support();
  const double eps = 1e-9 * m;
  std::vector<BoundState> out;
  if (scan_points < 2) throw Error(ErrorKind::InvalidArgument, "scan_points must be >= 2");
  for (int par : {1, -1}) {
    auto R = [&](double E) { return bound_state_residual(p, E, par); };
    std::vector<double> es(scan_points), rs(scan_points);
    for (int i = 0; i < scan_points; ++i) {
      es[i] = (-m + eps) + (2.0 * m - 2.0 * eps) * i / (scan_points - 1);
      rs[i] = R(es[i]);
    }
    std::vector<double> roots;
    for (int i = 0; i + 1 < scan_points; ++i) {
      if (rs[i] == 0.0) {
        roots.push_back(es[i]);
      } else if (rs[i] * rs[i + 1] < 0.0) {
        roots.push_back(find_root(R, es[i], es[i + 1], tol));
      }
    }
    if (rs.back() == 0.0) roots.push_back(es.back());

    for (double E : roots) {
      BoundState b;
      b.parity = par > 0 ? Parity::even : Parity::odd;
      b.energy = E;
      b.kappa = std::sqrt(m * m - E * E);
      const double ratio = (m - E) / b.kappa;
      const cplx phase = par > 0 ? cplx(1.0) : I;
      const Spinor2 ua = interior_solution(p, E, par, a);
      const double ea = std::exp(-b.kappa * a);
      // scale taking the interior to the C = 1 exterior at z = a
      const cplx s0 = std::abs(ua.upper) >= std::abs(ua.lower) ? phase * ea / ua.upper
                                                               : phase * I * ratio * ea / ua.lower;
      double interior = 0.0;
      for (const auto& seg : p.right_half()) {
        interior += integrate([&](double z) { return std::norm(s0) * density(interior_solution(p, E, par, z)); },
                              seg.z_lo, seg.z_hi, tol, 16);
      }
      const double zmax = a + 40.0 / b.kappa;
      const double exterior = integrate(
          [&](double z) { return (1.0 + ratio * ratio) * std::exp(-2.0 * b.kappa * z); }, a, zmax, tol, 32);
      const double total = 2.0 * (interior + exterior);
      b.C = 1.0 / std::sqrt(total);
      b.interior_scale = b.C * s0;
      out.push_back(b);
    }
  }
  std::sort(out.begin(), out.end(), [](const BoundState& x, const BoundState& y) { return x.energy < y.energy; });
  return out;
}

Spinor2 bound_spinor(const PotentialSpec& p, const BoundState& b, double z) {
  const double a = p.support();
  if (std::abs(z) > a) return bound_exterior_spinor(b, p.mass(), a, z);
  const int par = b.parity == Parity::even ? 1 : -1;
  Spinor2 u = interior_solution(p, b.energy, par, std::abs(z));
  u.upper *= b.interior_scale;
  u.lower *= b.interior_scale;
  return z >= 0 ? u : mirror(u, par);
}

ModeFunction::ModeFunction(const PotentialSpec& p, Channel c, double k, double delta, double norm, double L)
    : potential_(p) {
  params_ = {c, k, delta, norm, L, p.mass()};
  energy_ = channel_energy(c, k, p.mass());
  a_ = p.support();
  beta_parity_ = beta_parity(c);
  const double m = p.mass();
  const double eabs = std::abs(energy_);
  const double pref = norm / std::sqrt(L) * std::sqrt((eabs + m) / (2.0 * eabs));
  Spinor2 ext = exterior_shape(c, k, m, k * a_ + delta);
  ext.upper *= pref;
  ext.lower *= pref;
  const Spinor2 ua = interior_solution(p, energy_, beta_parity_, a_);
  interior_scale_ = std::abs(ua.upper) >= std::abs(ua.lower) ? ext.upper / ua.upper : ext.lower / ua.lower;
  const Spinor2 diff{ext.upper - interior_scale_ * ua.upper, ext.lower - interior_scale_ * ua.lower};
  continuation_residual_ = std::sqrt(vcl::density(diff) / vcl::density(ext));
}

Spinor2 ModeFunction::spinor(double z) const {
  if (std::abs(z) > a_) return exterior_spinor(params_, a_, z);
  Spinor2 u = interior_solution(potential_, energy_, beta_parity_, std::abs(z));
  u.upper *= interior_scale_;
  u.lower *= interior_scale_;
  return z >= 0 ? u : mirror(u, beta_parity_);
}

Spinor2 ModeFunction::propagated_spinor(double z) const {
  Spinor2 u = interior_solution(potential_, energy_, beta_parity_, std::abs(z));
  u.upper *= interior_scale_;
  u.lower *= interior_scale_;
  return z >= 0 ? u : mirror(u, beta_parity_);
}

double ModeFunction::integral(double z1, double z2, const Tolerances& tol) const {
  if (z2 < z1) return -integral(z2, z1, tol);
  std::vector<double> cuts{z1, z2, 0.0, a_, -a_};
  for (const auto& s : potential_.right_half()) {
    cuts.push_back(s.z_lo);
    cuts.push_back(-s.z_lo);
    cuts.push_back(s.z_hi);
    cuts.push_back(-s.z_hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double quarter = 0.5 * kPi / params_.k;
  double sum = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (hi <= z1 || lo >= z2) continue;
    const int panels = std::max(8, int(std::ceil((hi - lo) / quarter)));
    sum += integrate([this](double z) { return density(z); }, lo, hi, tol, panels);
  }
  return sum;
}

}  // namespace vcl
