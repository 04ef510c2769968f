#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "vcl/charge.hpp"
#include "vcl/error.hpp"

using namespace vcl;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Channel kEvenPos{Parity::even, Branch::positive};
constexpr Channel kEvenNeg{Parity::even, Branch::negative};

ModeSolution mode_near(const ChannelPhase& ph, const BoxSpec& box, double k) {
  const auto modes = enumerate_modes(ph, box);
  ModeSolution best = modes.front();
  for (const auto& m : modes)
    if (std::abs(m.k - k) < std::abs(best.k - k)) best = m;
  return best;
}

}  // namespace

TEST_CASE("uniform density shift") {
  const BoxSpec box{50.0, 3.0};
  const auto free = ChannelPhase(PotentialSpec::free(), kEvenPos);
  CHECK(uniform_density_shift(free, 10 * kPi / 50.0, box) == 0.0);
  const auto p = PotentialSpec::delta(1.0);
  const ChannelPhase pos(p, kEvenPos), neg(p, kEvenNeg);
  const auto m = mode_near(pos, box, 1.0);
  CHECK(uniform_density_shift(pos, m.k, box) == doctest::Approx(-pos.derivative(m.k, {}) / 50.0));
  // branches mirror each other, so the shifts have opposite signs
  CHECK(pos.derivative(m.k, {}) == doctest::Approx(-neg.derivative(m.k, {})).epsilon(1e-8));
}

TEST_CASE("free exterior charge closed forms") {
  const BoxSpec box{40.0, 3.0};
  const ChannelPhase free(PotentialSpec::free(), kEvenPos);
  const auto m = mode_near(free, box, 1.0);
  CHECK(mode_exterior_charge(free, m, box) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mode_exterior_charge_numeric(free, m, box) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("exterior charge closed form against quadrature") {
  const auto p = PotentialSpec::delta(1.0);
  const ChannelPhase ph(p, kEvenPos);
  for (double L : {50.0, 100.0, 200.0}) {
    const BoxSpec box{L, 3.0};
    const auto m = mode_near(ph, box, 1.0);
    const double cf = mode_exterior_charge(ph, m, box);
    const double q = mode_exterior_charge_numeric(ph, m, box);
    CHECK(std::abs(cf - q) < 5.0 / (L * L));
    CHECK(mode_exterior_charge_exact(m, 0.0, box, 1.0) == doctest::Approx(q).epsilon(1e-9));
  }
  const auto w = PotentialSpec::square_well(1.0, 1.0);
  const ChannelPhase pw(w, kEvenNeg);
  const BoxSpec box{60.0, 3.0};
  const auto m = mode_near(pw, box, 1.5);
  const ModeFunction u(w, kEvenNeg, m.k, m.delta, m.norm, 60.0);
  const double ref = 2.0 * oracle::simpson([&](double z) { return u.density(z); }, 1.0, 60.0, 400000);
  CHECK(mode_exterior_charge_exact(m, 1.0, box, 1.0) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("closed form refuses tiny k") {
  const ChannelPhase ph(PotentialSpec::delta(1.0), kEvenPos);
  ModeSolution m;
  m.channel = kEvenPos;
  m.k = 1e-4;
  try {
    mode_exterior_charge(ph, m, {50.0, 3.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::KTooSmall);
  }
}

TEST_CASE("bound-state exterior charge") {
  for (double lambda : {0.3, 1.0, 2.0}) {
    const auto p = PotentialSpec::delta(lambda);
    for (const auto& b : find_bound_states(p)) {
      CHECK(bound_exterior_charge(b, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(bound_exterior_charge_numeric(p, b, 40.0 / b.kappa) ==
            doctest::Approx(bound_exterior_charge(b, 0.0, 1.0)).epsilon(1e-9));
    }
  }
  const auto w = PotentialSpec::square_well(2.5, 1.2);
  for (const auto& b : find_bound_states(w)) {
    const double ref = 2.0 * oracle::simpson([&](double z) { return density(bound_spinor(w, b, z)); },
                                             std::nextafter(1.2, 2.0), 1.2 + 40.0 / b.kappa);
    CHECK(bound_exterior_charge(b, 1.2, 1.0) == doctest::Approx(ref).epsilon(1e-9));
  }
  BoundState deep;
  deep.energy = 0.0;
  deep.kappa = 1e3;
  deep.C = 1.0;
  CHECK(bound_exterior_charge(deep, 1.0, 1.0) < 1e-300);
}

TEST_CASE("exterior vacuum charge") {
  const BoxSpec box{50.0, 10.0};
  const auto free = vacuum_charge_exterior(PotentialSpec::free(), box);
  CHECK(std::abs(free.Q0_ext_direct) < 1e-12);
  CHECK(std::abs(free.phase_part) < 1e-12);
  CHECK(std::abs(free.mass_part) < 1e-12);
  CHECK(free.Q0_ext_phase_formula == 0.0);

  // a delta has no interior, so the exterior charge is the whole vacuum charge
  const auto d = vacuum_charge_exterior(PotentialSpec::delta(2.0), box);
  CHECK(d.Q0 == 1.0);
  CHECK(d.Q0_ext_direct == doctest::Approx(d.Q0).epsilon(1e-9));
  CHECK(d.phase_part + d.mass_part + d.counting_part + d.bound_part == doctest::Approx(d.Q0_ext_direct).epsilon(1e-12));
  const auto nc = naive_vacuum_charge(PotentialSpec::delta(2.0));
  const double formula = (nc.delta_pos_inf - nc.delta_pos_zero - nc.delta_neg_inf + nc.delta_neg_zero) / (2 * kPi);
  CHECK(d.Q0_ext_phase_formula == doctest::Approx(formula).epsilon(1e-9));
  CHECK(std::abs(d.phase_part - formula) < 1.0 / 50.0);

  const auto w = vacuum_charge_exterior(PotentialSpec::square_well(1.0, 1.0), box);
  CHECK(w.Q0 == 0.0);
  CHECK(std::abs(w.Q0_ext_direct - std::round(w.Q0_ext_direct)) > 0.1);
}
