#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "padg/ionic.hpp"

using padg::Vec2;

TEST_CASE("cubic_f examples") {
  const padg::CubicReactionParams p;
  CHECK(padg::cubic_f(-85.0, p) == 0.0);
  CHECK(padg::cubic_f(-57.6, p) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(padg::cubic_f(0.0, p) == doctest::Approx(1.4e-5 * 85.0 * 57.6 * (-30.0)).epsilon(1e-14));
  CHECK(padg::cubic_f(0.0, p) == doctest::Approx(-2.05632).epsilon(1e-12));
}

TEST_CASE("cubic_f roots and signs") {
  const padg::CubicReactionParams p;
  CHECK(padg::cubic_f(30.0, p) == 0.0);
  CHECK(padg::cubic_f(-100.0, p) < 0.0);
  CHECK(padg::cubic_f(-70.0, p) > 0.0);
  CHECK(padg::cubic_f(-10.0, p) < 0.0);
  CHECK(padg::cubic_f(40.0, p) > 0.0);
  const double u = -20.0, h = 1e-5;
  CHECK(padg::cubic_df(u, p) ==
        doctest::Approx((padg::cubic_f(u + h, p) - padg::cubic_f(u - h, p)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("cubic parameters are validated") {
  padg::CubicReactionParams p;
  p.a = 0.0;
  CHECK_THROWS(p.validate());
  p = padg::CubicReactionParams{};
  p.v_thres = -90.0;
  CHECK_THROWS(p.validate());
}

TEST_CASE("bc_currents examples") {
  padg::BarretoCressmanParams p;
  const padg::IonicState y;
  const padg::BcCurrents at = padg::bc_currents(0.0, y, p);
  CHECK(padg::bc_currents(at.e_cl, y, p).i_cl == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

  padg::IonicState off = y;
  off.y[3] = 0.0;
  p.g_nal = 0.0;
  CHECK(padg::bc_currents(-40.0, off, p).i_na == 0.0);
}

TEST_CASE("bc_currents matches the independent evaluation") {
  const padg::BarretoCressmanParams p;
  const padg::IonicState y;
  for (double u : {-67.0, -50.0, 0.0, 20.0}) {
    const auto ref = oracle::bc_currents(u, y.y, 8.0);
    const auto got = padg::bc_currents(u, y, p);
    CHECK(got.i_na == doctest::Approx(ref[0]).epsilon(1e-12));
    CHECK(got.i_k == doctest::Approx(ref[1]).epsilon(1e-12));
    CHECK(got.i_cl == doctest::Approx(ref[2]).epsilon(1e-12));
  }
}

TEST_CASE("bc_currents is affine in u") {
  const padg::BarretoCressmanParams p;
  const padg::IonicState y;
  const double a = padg::bc_currents(-80.0, y, p).total();
  const double b = padg::bc_currents(-20.0, y, p).total();
  const double c = padg::bc_currents(40.0, y, p).total();
  CHECK((c - b) == doctest::Approx(b - a).epsilon(1e-12));
}

TEST_CASE("bc_currents rejects non-finite reversal potentials") {
  padg::IonicState y;
  y.y[1] = 0.0;
  CHECK_THROWS_AS(padg::bc_currents(-60.0, y, padg::BarretoCressmanParams{}), std::domain_error);
}

TEST_CASE("bc_rhs matches the independent evaluation") {
  const padg::BarretoCressmanParams p;
  const padg::IonicState y;
  for (double u : {-67.0, -50.0, 10.0}) {
    const auto ref = oracle::bc_rhs(u, y.y, 8.0);
    const auto got = padg::bc_rhs(u, y, p);
    for (int i = 0; i < 6; ++i) {
      CAPTURE(i);
      CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-10).scale(1e-12));
    }
  }
}

TEST_CASE("bc_rhs fixed points") {
  const padg::BarretoCressmanParams p;
  const double u = -40.0;
  padg::IonicState y;
  // calcium at its fixed point
  y.y[2] = -80.0 * p.g_ca * 0.002 * (u - p.e_ca) / (1.0 + std::exp(-(25.0 + u) / 2.5));
  const padg::GatingRates g = padg::bc_gating(u, p);
  for (int i = 0; i < 3; ++i) y.y[3 + i] = g.inf[i];
  const auto d = padg::bc_rhs(u, y, p);
  CHECK(std::abs(d[2]) <= 1e-15);
  for (int i = 3; i < 6; ++i) CHECK(std::abs(d[i]) <= 1e-14);
}

TEST_CASE("clamp_state") {
  padg::IonicState y;
  y.y[0] = -1.0;
  y.y[3] = 1.5;
  y.y[5] = -0.1;
  CHECK(padg::clamp_state(y) == 3);
  CHECK(y.y[0] == 0.0);
  CHECK(y.y[3] == 1.0);
  CHECK(y.y[5] == 0.0);
}

TEST_CASE("forcing_value examples") {
  padg::ForcingSpec f;
  f.amplitude = 9.0;
  f.region = padg::ForcingSpec::Region::disk;
  f.center = Vec2(1.0, 1.0);
  f.radius = 0.5;
  CHECK(padg::forcing_value(0.0, Vec2(3.0, 3.0), f) == 0.0);
  CHECK(padg::forcing_value(0.0, Vec2(1.0, 1.2), f) == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(padg::forcing_value(M_PI / 2, Vec2(1.0, 1.0), f) ==
        doctest::Approx(9.0 / (1.0 + std::exp(1.0))).epsilon(1e-14));
}

TEST_CASE("integrate_0d is stationary with everything switched off") {
  padg::BarretoCressmanParams p;
  p.g_nal = p.g_na = p.g_k = p.g_ahp = p.g_kl = p.g_cll = p.g_ca = p.g_glia = 0.0;
  p.rho = 0.0;
  p.eps_diff = 0.0;
  p.phi = 0.0;
  padg::IonicState y;
  y.y[2] = 0.0;
  const auto tr = padg::integrate_0d(p, -60.0, y, 1e-2, 5.0, padg::ForcingSpec{});
  CHECK(tr.u.back() == -60.0);
  for (int i = 0; i < 6; ++i) CHECK(tr.y.back().y[i] == y.y[i]);
}

TEST_CASE("integrate_0d spike timings") {
  const padg::BarretoCressmanParams p;
  const auto tr = padg::integrate_0d(p, -50.0, padg::IonicState{}, 1e-3, 60.0, padg::ForcingSpec{}, 100);
  REQUIRE(tr.spikes.size() >= 2);
  CHECK(tr.spikes[1] == doctest::Approx(40.0).epsilon(0.25));
  CHECK(tr.clamp_events == 0);
  for (const auto& y : tr.y) {
    for (int i = 3; i < 6; ++i) CHECK((y.y[i] >= 0.0 && y.y[i] <= 1.0));
  }

  padg::ForcingSpec f;
  f.amplitude = 9.0;
  const auto tf = padg::integrate_0d(p, -50.0, padg::IonicState{}, 1e-3, 20.0, f, 100);
  REQUIRE(tf.spikes.size() >= 2);
  CHECK(tf.spikes[1] == doctest::Approx(7.0).epsilon(0.30));

  const auto half = padg::integrate_0d(p, -50.0, padg::IonicState{}, 5e-4, 5.0, padg::ForcingSpec{}, 100);
  REQUIRE(!half.spikes.empty());
  CHECK(std::abs(half.spikes[0] - tr.spikes[0]) <= 0.02 * tr.spikes[0]);
}

TEST_CASE("integrate_0d reports blow-up with the step") {
  padg::BarretoCressmanParams p;
  padg::ForcingSpec f;
  f.amplitude = 1e7;
  try {
    padg::integrate_0d(p, -50.0, padg::IonicState{}, 1e-2, 10.0, f);
    FAIL("expected blow-up");
  } catch (const padg::BlowUpError& e) {
    CHECK(e.step >= 1);
  }
}

TEST_CASE("trace_csv header") {
  padg::SpikeTrace t;
  t.t = {0.0, 0.5};
  t.u = {-50.0, -49.0};
  CHECK(padg::trace_csv(t).rfind("t,v\n", 0) == 0);
}
