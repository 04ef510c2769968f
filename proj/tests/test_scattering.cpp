#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "vcl/error.hpp"
#include "vcl/scattering.hpp"

using namespace vcl;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Channel kEvenPos{Parity::even, Branch::positive};
constexpr Channel kOddPos{Parity::odd, Branch::positive};
constexpr Channel kEvenNeg{Parity::even, Branch::negative};
constexpr Channel kOddNeg{Parity::odd, Branch::negative};

double wrap(double x) { return x - kPi * std::round(x / kPi); }

PotentialSpec barrier(double lambda, double w) { return PotentialSpec::piecewise({{-w / 2, w / 2, lambda / w}}); }

}  // namespace

TEST_CASE("delta phase shifts match the closed forms") {
  for (double lambda : {0.3, 1.0, 2.0, 4.0}) {
    const auto p = PotentialSpec::delta(lambda);
    for (double k : {0.05, 0.6, 3.0, 40.0}) {
      CHECK(std::abs(wrap(phase_shift(p, kEvenPos, k) - oracle::delta_even_pos(lambda, k))) < 1e-12);
      CHECK(std::abs(wrap(phase_shift(p, kOddPos, k) - oracle::delta_odd_pos(lambda, k))) < 1e-12);
      CHECK(std::abs(wrap(phase_shift(p, kEvenNeg, k) + oracle::delta_even_pos(lambda, k))) < 1e-12);
      CHECK(std::abs(wrap(phase_shift(p, kOddNeg, k) + oracle::delta_odd_pos(lambda, k))) < 1e-12);
    }
  }
}

TEST_CASE("delta phase shifts are the zero-width limit of a barrier") {
  const double lambda = 1.0;
  const auto d = PotentialSpec::delta(lambda);
  for (Channel c : kAllChannels) {
    for (double k : {0.4, 2.0}) {
      const double w = 1e-3;
      const double coarse = phase_shift(barrier(lambda, w), c, k);
      const double fine = phase_shift(barrier(lambda, w / 2), c, k);
      const double extrapolated = 2.0 * fine - coarse;
      CHECK(std::abs(wrap(extrapolated - phase_shift(d, c, k))) < 1e-6);
    }
  }
}

TEST_CASE("free phase shifts vanish") {
  const auto p = PotentialSpec::free();
  for (Channel c : kAllChannels) {
    const ChannelPhase ph(p, c);
    for (double k : {1e-3, 0.5, 7.0}) CHECK(std::abs(ph(k)) < 1e-12);
    CHECK(ph.at_infinity() == 0.0);
  }
}

TEST_CASE("phase_shift rejects evanescent k") {
  try {
    phase_shift(PotentialSpec::delta(1.0), kEvenPos, 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EvanescentError);
  }
}

TEST_CASE("anchored branch is continuous and reaches half the potential integral") {
  const auto w = PotentialSpec::square_well(3.0, 1.5);
  for (Channel c : kAllChannels) {
    const ChannelPhase ph(w, c);
    CHECK(ph.at_infinity() == doctest::Approx(0.5 * branch_sign(c.branch) * w.integral()));
    double prev = ph(1e-3);
    for (int i = 1; i <= 4000; ++i) {
      const double k = 1e-3 + 0.005 * i;
      const double cur = ph(k);
      CHECK(std::abs(cur - prev) < 0.3);
      prev = cur;
    }
    CHECK(std::abs(ph(300.0) - ph.at_infinity()) < 0.02);
  }
}

TEST_CASE("sum rule at large k") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto p = PotentialSpec::delta(lambda);
    CHECK(sum_rule_check(p, Branch::positive, 100.0).residual < 1e-3);
    CHECK(sum_rule_check(p, Branch::negative, 100.0).residual < 1e-3);
  }
  const auto r = sum_rule_check(PotentialSpec::square_well(1, 1), Branch::positive, 400.0);
  CHECK(r.rhs == doctest::Approx(-2.0));
  CHECK(r.residual < 1e-2);
}

TEST_CASE("delta branch limits at threshold") {
  const auto p = PotentialSpec::delta(1.0);
  CHECK(ChannelPhase(p, kEvenPos).at_zero() == doctest::Approx(kPi / 2).epsilon(1e-5));
  CHECK(ChannelPhase(p, kEvenNeg).at_zero() == doctest::Approx(-kPi / 2).epsilon(1e-5));
  CHECK(std::abs(ChannelPhase(p, kOddPos).at_zero()) < 1e-6);
  // positive and negative branches mirror each other for the delta
  const ChannelPhase a(p, kEvenPos), b(p, kEvenNeg);
  for (double k : {0.2, 1.0, 5.0}) CHECK(a(k) == doctest::Approx(-b(k)).epsilon(1e-12));
}

TEST_CASE("phase_shift_table keeps neighbouring samples within pi/2") {
  const auto w = PotentialSpec::square_well(8.0, 2.0);
  std::vector<double> grid;
  for (int i = 1; i <= 50; ++i) grid.push_back(0.4 * i);
  const auto t = phase_shift_table(w, kEvenPos, grid);
  CHECK(t.k.size() >= grid.size());
  for (size_t i = 1; i < t.k.size(); ++i) {
    CHECK(t.k[i] > t.k[i - 1]);
    CHECK(std::abs(t.delta[i] - t.delta[i - 1]) < kPi / 2);
  }
  CHECK(t.interpolate(t.k[3]) == doctest::Approx(t.delta[3]));
  const std::vector<double> bad{1.0, 0.5};
  CHECK_THROWS_AS(phase_shift_table(w, kEvenPos, bad), Error);
}

TEST_CASE("table derivative of the delta even phase") {
  const auto p = PotentialSpec::delta(1.0);
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(0.5 + 0.01 * i);
  const auto t = phase_shift_table(p, kEvenPos, grid);
  const double k = t.k[100], h = 1e-5;
  const double ref =
      (oracle::delta_even_pos(1.0, k + h) - oracle::delta_even_pos(1.0, k - h)) / (2 * h);
  CHECK(t.derivative_at(100) == doctest::Approx(ref).epsilon(1e-4));
  const ChannelPhase ph(p, kEvenPos);
  CHECK(ph.derivative(k, {}) == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("delta bound states sit at m cos lambda or -m cos lambda") {
  for (double lambda : {0.3, 1.0, 2.0}) {
    const auto bs = find_bound_states(PotentialSpec::delta(lambda));
    REQUIRE(bs.size() == 1);
    CHECK(bs[0].energy == doctest::Approx(std::cos(lambda)).epsilon(1e-10));
    CHECK(bs[0].parity == Parity::even);
  }
  const auto odd = find_bound_states(PotentialSpec::delta(4.0));
  REQUIRE(odd.size() == 1);
  CHECK(odd[0].energy == doctest::Approx(-std::cos(4.0)).epsilon(1e-10));
  CHECK(odd[0].parity == Parity::odd);
  CHECK(find_bound_states(PotentialSpec::free()).empty());
}

TEST_CASE("square well bound states against an RK4 shooting oracle") {
  const auto w = PotentialSpec::square_well(2.5, 1.2);
  const double m = 1.0, a = 1.2;
  std::vector<double> ref;
  for (int par : {1, -1}) {
    const auto residual = [&](double E) {
      const cplx f0 = par > 0 ? cplx(1) : cplx(0), g0 = par > 0 ? cplx(0) : cplx(1);
      const auto [f, g] = oracle::rk4_dirac(w, E, f0, g0, 0.0, a, 4000);
      // decaying exterior requires g = i (m - E)/kappa f
      const double kappa = std::sqrt(m * m - E * E);
      const cplx mis = g - cplx(0, 1) * (m - E) / kappa * f;
      return (par > 0 ? mis.imag() : mis.real()) / std::sqrt(std::norm(f) + std::norm(g));
    };
    const int n = 4000;
    double prev_e = -m + 1e-9, prev_r = residual(prev_e);
    for (int i = 1; i <= n; ++i) {
      const double e = -m + 1e-9 + (2 * m - 2e-9) * i / n;
      const double r = residual(e);
      if (prev_r * r < 0) ref.push_back(oracle::bisect(residual, prev_e, e, 80));
      prev_e = e;
      prev_r = r;
    }
  }
  std::sort(ref.begin(), ref.end());
  const auto bs = find_bound_states(w);
  REQUIRE(bs.size() == ref.size());
  REQUIRE(!bs.empty());
  for (size_t i = 0; i < bs.size(); ++i) CHECK(bs[i].energy == doctest::Approx(ref[i]).epsilon(1e-8));
}

TEST_CASE("bound states are normalized on the whole line") {
  const auto w = PotentialSpec::square_well(2.5, 1.2);
  for (const auto& b : find_bound_states(w)) {
    const double total = oracle::simpson([&](double z) { return density(bound_spinor(w, b, z)); },
                                         -1.2 - 40 / b.kappa, 1.2 + 40 / b.kappa, 400000);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    // continuity at the edge
    const Spinor2 in = bound_spinor(w, b, 1.2), out = bound_spinor(w, b, std::nextafter(1.2, 2.0));
    CHECK(std::abs(in.upper - out.upper) + std::abs(in.lower - out.lower) < 1e-10);
  }
}

TEST_CASE("mode functions are continuous and integrate like a fine Simpson sum") {
  const auto w = PotentialSpec::square_well(1.0, 1.0);
  for (Channel c : kAllChannels) {
    const ChannelPhase ph(w, c);
    const double k = 1.3;
    const ModeFunction u(w, c, k, ph(k), 1.0, 10.0);
    CHECK(u.continuation_residual() < 1e-12);
    const Spinor2 lo = u.spinor(-1.0), lo_out = u.spinor(std::nextafter(-1.0, -2.0));
    CHECK(std::abs(lo.upper - lo_out.upper) + std::abs(lo.lower - lo_out.lower) < 1e-10);
    const double ref = oracle::simpson([&](double z) { return u.density(z); }, -10.0, 10.0, 200000);
    CHECK(u.integral(-10.0, 10.0, {}) == doctest::Approx(ref).epsilon(1e-9));
    // asymptotic and propagated forms coincide outside the support
    for (double z : {-7.0, 2.5, 9.0}) {
      const Spinor2 s = u.spinor(z), t = u.propagated_spinor(z);
      CHECK(std::abs(s.upper - t.upper) + std::abs(s.lower - t.lower) < 1e-12);
    }
  }
}
