#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace vcl {

/// Piece of a piecewise-constant potential: V = v on [z_lo, z_hi].
struct Segment {
  double z_lo = 0;
  double z_hi = 0;
  double v = 0;
};

struct DeltaShape {
  double lambda = 0;  // V(z) = lambda * delta(z)
};

struct SquareWellShape {
  double v0 = 0;  // V(z) = -v0 for |z| < a
  double a = 0;
};

struct PiecewiseShape {
  std::vector<Segment> segments;
};

/// Symmetric background potential with support inside |z| <= a.
///
/// V enters the Dirac equation as (1/i) alpha u' + m beta u = (E + V) u, so
/// a positive V lowers positive-energy levels. Units: m = 1 unless a mass is
/// given explicitly; lengths in 1/m, energies in m.
class PotentialSpec {
 public:
  using Shape = std::variant<DeltaShape, SquareWellShape, PiecewiseShape>;

  static PotentialSpec free(double mass = 1.0);
  static PotentialSpec delta(double lambda, double mass = 1.0);
  static PotentialSpec square_well(double v0, double a, double mass = 1.0);
  static PotentialSpec piecewise(std::vector<Segment> segments, double mass = 1.0);

  /// Mini-language: `delta:lambda=X`, `well:v0=X,a=Y`, `pcw:z0,z1,v;...`, `free`.
  /// A bare `delta` gives lambda = 0 (callers fill it in from a sweep).
  static PotentialSpec parse(std::string_view text, double mass = 1.0);
  static PotentialSpec from_json(const nlohmann::json& j);

  const Shape& shape() const { return shape_; }
  double mass() const { return mass_; }
  PotentialSpec with_mass(double m) const;
  PotentialSpec with_lambda(double lambda) const;  // Delta only

  /// Half-width a of the support (0 for the delta).
  double support() const;
  /// Integral of V over the whole line.
  double integral() const;
  /// Strength of a delta at the origin (0 for finite-width variants).
  double delta_strength() const;
  bool is_delta() const { return std::holds_alternative<DeltaShape>(shape_); }
  bool is_free() const;

  /// Constant pieces on [0, a], ordered outward, clipped at the origin.
  const std::vector<Segment>& right_half() const { return right_half_; }
  /// V(z) for z away from a delta.
  double value(double z) const;

  /// Canonical mini-language form, usable as an identifier.
  std::string tag() const;
  nlohmann::json to_json() const;

 private:
  PotentialSpec(Shape shape, double mass);
  void validate_and_cache();

  Shape shape_;
  double mass_ = 1.0;
  std::vector<Segment> right_half_;
};

}  // namespace vcl
