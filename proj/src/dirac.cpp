#include "vcl/dirac.hpp"

#include <cmath>

#include "vcl/error.hpp"

namespace vcl {

namespace {

constexpr cplx I{0.0, 1.0};

// cos(q dz) and sin(q dz)/q for q^2 of either sign.
void slab_trig(double q2, double dz, double& c, double& s) {
  if (q2 >= 0) {
    const double q = std::sqrt(q2);
    const double x = q * dz;
    c = std::cos(x);
    s = std::abs(x) < 1e-8 ? dz * (1.0 - x * x / 6.0) : std::sin(x) / q;
  } else {
    const double kap = std::sqrt(-q2);
    const double x = kap * dz;
    c = std::cosh(x);
    s = std::abs(x) < 1e-8 ? dz * (1.0 + x * x / 6.0) : std::sinh(x) / kap;
  }
}

}  // namespace

std::string to_string(Channel c) {
  std::string s = c.parity == Parity::even ? "even" : "odd";
  s += c.branch == Branch::positive ? "+" : "-";
  return s;
}

int beta_parity(Channel c) {
  const bool even = c.parity == Parity::even;
  const bool pos = c.branch == Branch::positive;
  return even == pos ? 1 : -1;
}

double channel_energy(Channel c, double k, double m) {
  return branch_sign(c.branch) * std::sqrt(k * k + m * m);
}

Mat2 transfer_matrix(double v, double E, double m, double dz) {
  const double eps = E + v;
  double c = 0, s = 0;
  slab_trig(eps * eps - m * m, dz, c, s);
  return {cplx(c), I * s * (eps + m), I * s * (eps - m), cplx(c)};
}

Mat2 delta_jump(double lambda) {
  const double c = std::cos(lambda);
  const double s = std::sin(lambda);
  return {cplx(c), I * s, I * s, cplx(c)};
}

Spinor2 interior_solution(const PotentialSpec& p, double E, int beta_par, double z) {
  if (z < 0) throw Error(ErrorKind::DomainError, "interior_solution expects z >= 0");
  // eigenvector of delta_jump(lambda) * beta with eigenvalue beta_par
  const double half = 0.5 * p.delta_strength();
  Spinor2 u = beta_par > 0 ? Spinor2{std::cos(half), I * std::sin(half)}
                           : Spinor2{I * std::sin(half), cplx(std::cos(half))};
  const double m = p.mass();
  double pos = 0.0;
  for (const auto& seg : p.right_half()) {
    if (z <= seg.z_lo) break;
    const double end = std::min(z, seg.z_hi);
    u = transfer_matrix(seg.v, E, m, end - seg.z_lo) * u;
    pos = end;
    if (z <= seg.z_hi) return u;
  }
  if (z > pos) u = transfer_matrix(0.0, E, m, z - pos) * u;
  return u;
}

Spinor2 exterior_shape(Channel c, double k, double m, double theta) {
  const double eabs = std::sqrt(k * k + m * m);
  const double r = k / (eabs + m);
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  if (c.branch == Branch::positive) {
    if (c.parity == Parity::even) return {cplx(cs), I * r * sn};
    return {I * sn, cplx(r * cs)};
  }
  if (c.parity == Parity::even) return {-I * r * sn, cplx(cs)};
  return {cplx(-r * cs), I * sn};
}

Spinor2 exterior_spinor(const ModeParams& mp, double a, double z) {
  if (std::abs(z) <= a) throw Error(ErrorKind::DomainError, "exterior_spinor needs |z| > a");
  if (!(mp.k > 0)) throw Error(ErrorKind::DomainError, "exterior_spinor needs k > 0");
  const double eabs = std::sqrt(mp.k * mp.k + mp.mass * mp.mass);
  const double pref = mp.norm / std::sqrt(mp.L) * std::sqrt((eabs + mp.mass) / (2.0 * eabs));
  Spinor2 s = exterior_shape(mp.channel, mp.k, mp.mass, mp.k * std::abs(z) + mp.delta);
  s.upper *= pref;
  s.lower *= pref;
  return z > 0 ? s : mirror(s, beta_parity(mp.channel));
}

Spinor2 bound_exterior_spinor(const BoundState& b, double m, double a, double z) {
  if (std::abs(z) <= a) throw Error(ErrorKind::DomainError, "bound_exterior_spinor needs |z| > a");
  const double decay = b.C * std::exp(-b.kappa * std::abs(z));
  const double ratio = (m - b.energy) / b.kappa;
  Spinor2 s{cplx(decay), I * ratio * decay};
  const int par = b.parity == Parity::even ? 1 : -1;
  if (par < 0) {
    s.upper *= I;
    s.lower *= I;
  }
  return z > 0 ? s : mirror(s, par);
}

}  // namespace vcl
