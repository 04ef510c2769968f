#pragma once

#include <array>
#include <complex>
#include <string>

#include "vcl/potential.hpp"

namespace vcl {

using cplx = std::complex<double>;

enum class Parity { even, odd };
enum class Branch { positive, negative };

/// Mode label. Parity refers to the large component: the upper component for
/// positive energies, the lower one for negative energies. With this label
/// both branches share the exterior density (N^2/L)[1/2 +- (m/2|E|) cos 2(kz+D)].
struct Channel {
  Parity parity = Parity::even;
  Branch branch = Branch::positive;

  friend bool operator==(const Channel&, const Channel&) = default;
};

inline constexpr std::array<Channel, 4> kAllChannels = {{
    {Parity::even, Branch::positive},
    {Parity::odd, Branch::positive},
    {Parity::even, Branch::negative},
    {Parity::odd, Branch::negative},
}};

std::string to_string(Channel c);
inline double branch_sign(Branch b) { return b == Branch::positive ? 1.0 : -1.0; }
inline double parity_sign(Parity p) { return p == Parity::even ? 1.0 : -1.0; }
/// Eigenvalue of beta-parity (u(-z) = P beta u(z)) carried by a channel.
int beta_parity(Channel c);
/// Signed energy +-sqrt(k^2 + m^2).
double channel_energy(Channel c, double k, double m);

/// Components 1 and 3 of the four-spinor; components 2 and 4 vanish.
struct Spinor2 {
  cplx upper{};
  cplx lower{};
};

struct Mat2 {
  cplx a{1}, b{0}, c{0}, d{1};  // [[a, b], [c, d]]

  static Mat2 identity() { return {}; }
  Spinor2 operator*(const Spinor2& s) const { return {a * s.upper + b * s.lower, c * s.upper + d * s.lower}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  cplx det() const { return a * d - b * c; }
};

/// Propagator across a slab of constant potential v and width dz: maps
/// (upper, lower) at z to z + dz. Uses cosh/sinh where (E + v)^2 < m^2.
Mat2 transfer_matrix(double v, double E, double m, double dz);

/// Matching across V = lambda delta(z): u(0+) = (cos lambda + i sin lambda alpha_z) u(0-).
Mat2 delta_jump(double lambda);

/// Charge density |upper|^2 + |lower|^2.
inline double density(const Spinor2& s) { return std::norm(s.upper) + std::norm(s.lower); }

/// Alpha_z bilinear s1^dagger alpha_z s2.
inline cplx alpha_bilinear(const Spinor2& s1, const Spinor2& s2) {
  return std::conj(s1.upper) * s2.lower + std::conj(s1.lower) * s2.upper;
}

/// Interior solution of definite beta-parity (+1 or -1), unnormalized, at
/// energy E and 0 <= z. Starts from the parity eigenvector just right of the
/// origin (including any delta jump) and crosses the constant pieces; beyond
/// the support it propagates freely.
Spinor2 interior_solution(const PotentialSpec& p, double E, int beta_parity, double z);

/// Mirror a z >= 0 value to -z using u(-z) = P beta u(z).
inline Spinor2 mirror(const Spinor2& s, int beta_parity) {
  return {double(beta_parity) * s.upper, -double(beta_parity) * s.lower};
}

/// Parameters of an exterior scattering mode.
struct ModeParams {
  Channel channel;
  double k = 0;      // > 0
  double delta = 0;  // phase shift
  double norm = 1;   // N
  double L = 1;      // box half-length
  double mass = 1;
};

/// Asymptotic scattering spinor for |z| > a, phase kz + D for z > a and
/// kz - D for z < -a. Throws DomainError for |z| <= a.
Spinor2 exterior_spinor(const ModeParams& mp, double a, double z);

/// Shape of the exterior spinor as a function of the phase theta = kz +- D,
/// without the N/sqrt(L) sqrt((|E|+m)/2|E|) prefactor, for z > 0.
Spinor2 exterior_shape(Channel c, double k, double m, double theta);

struct BoundState {
  Parity parity = Parity::even;  // parity of the upper component
  double energy = 0;             // in (-m, m)
  double kappa = 0;              // sqrt(m^2 - E^2)
  double C = 0;                  // exterior coefficient, fixed by normalization
  cplx interior_scale{1.0};      // multiplies interior_solution to give the normalized state
};

/// C (1, i(m - E)/kappa) e^{-kappa z} for z > a, times i for odd parity;
/// mirrored for z < -a. Throws DomainError for |z| <= a.
Spinor2 bound_exterior_spinor(const BoundState& b, double m, double a, double z);

}  // namespace vcl
