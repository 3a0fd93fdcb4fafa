#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "longsim/control_design.hpp"

using namespace longsim;

namespace {

// Portable uniform draw: raw 32-bit output scaled to [0,1), identical on
// every standard library.
double uniform01(std::mt19937& rng) {
  return rng() / 4294967296.0;
}

double oracle_dt(double omega_n) { return 0.005 * (2.0 * M_PI / omega_n); }

}  // namespace

TEST_SUITE_BEGIN("control_design");

TEST_CASE("closed-form step metrics worked example") {
  const step_metrics m = loop_metrics({4.0, 1.0, 1.0});
  CHECK(m.omega_n == doctest::Approx(2.0));
  CHECK(m.xi == doctest::Approx(0.5));
  CHECK(m.rise_time == doctest::Approx(0.7854).epsilon(1e-4));
  CHECK(m.settling_time == doctest::Approx(4.0));
  REQUIRE(m.overshoot.has_value());
  REQUIRE(m.peak_time.has_value());
  CHECK(*m.overshoot == doctest::Approx(0.1630).epsilon(1e-3));
  CHECK(*m.peak_time == doctest::Approx(1.8138).epsilon(1e-4));
}

TEST_CASE("damping boundary and overdamped handling") {
  SUBCASE("xi = 1 exactly at kp = 1, lag = 1, kd = 1") {
    const step_metrics m = loop_metrics({1.0, 1.0, 1.0});
    CHECK(m.xi == doctest::Approx(1.0));
    CHECK(!m.overshoot.has_value());
    CHECK(!m.peak_time.has_value());
  }
  SUBCASE("overshoot vanishes as xi approaches 1") {
    // Walk kd so xi rises toward 1; v_p must fall monotonically to 0.
    double prev = 1.0;
    for (double kd = 0.0; kd < 0.99; kd += 0.1) {
      const step_metrics m = loop_metrics({1.0, kd, 1.0});
      REQUIRE(m.overshoot.has_value());
      CHECK(*m.overshoot < prev);
      prev = *m.overshoot;
    }
    CHECK(prev < 0.01);
  }
  SUBCASE("invalid parameters are rejected") {
    CHECK_THROWS_AS((void)loop_metrics({0.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)loop_metrics({4.0, 1.0, 0.0}), std::invalid_argument);
  }
}

TEST_CASE("numerical step-response oracle") {
  SUBCASE("overshoot measurement at the worked example point") {
    const double dt = oracle_dt(2.0);
    const auto trace = simulate_step_response(2.0, 0.5, dt, 12.0);
    const step_measurements got = measure_step_metrics(trace, dt);
    CHECK(std::abs(got.overshoot - 0.163) < 0.002);
  }
  SUBCASE("critically damped response never overshoots") {
    const double dt = oracle_dt(2.0);
    const auto trace = simulate_step_response(2.0, 1.0, dt, 12.0);
    const step_measurements got = measure_step_metrics(trace, dt);
    CHECK(got.overshoot < 1e-6);
  }
  SUBCASE("DC gain is exactly one") {
    const double dt = oracle_dt(1.0);
    const auto trace = simulate_step_response(1.0, 0.7, dt, 60.0);
    CHECK(trace.back() == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("peak overshoot and peak time match the exact underdamped forms") {
    for (double xi : {0.3, 0.5, 0.8}) {
      for (double wn : {0.7, 2.0, 4.5}) {
        const double dt = oracle_dt(wn);
        const auto trace = simulate_step_response(wn, xi, dt, 40.0 / wn);
        const step_measurements got = measure_step_metrics(trace, dt);
        const double vp_true = std::exp(-M_PI * xi / std::sqrt(1.0 - xi * xi));
        const double tc_true = M_PI / (wn * std::sqrt(1.0 - xi * xi));
        CHECK(got.overshoot == doctest::Approx(vp_true).epsilon(0.01));
        CHECK(got.peak_time == doctest::Approx(tc_true).epsilon(0.01));
      }
    }
  }
  SUBCASE("measurement code agrees with the true 10-90% and settling values") {
    // For the canonical second-order system the exact rise/settling times are
    // found by bisection on the analytic solution; the trace measurement must
    // reproduce them. (The pi/(2 wn) and 4/(xi wn) closed forms above are
    // textbook approximations of these, not equalities.)
    const double wn = 2.0, xi = 0.5;
    const double wd = wn * std::sqrt(1.0 - xi * xi);
    auto y = [&](double t) {
      return 1.0 - std::exp(-xi * wn * t) *
                       (std::cos(wd * t) + xi * wn / wd * std::sin(wd * t));
    };
    auto first_crossing = [&](double level) {
      double lo = 0.0, hi = 10.0;
      // Find the first time y(t) = level on the rising edge by fine scan +
      // bisection.
      double t = 0.0;
      for (; t < hi; t += 1e-4) {
        if (y(t) >= level) break;
      }
      lo = t - 1e-4;
      hi = t;
      for (int i = 0; i < 60; ++i) {
        const double mid = (lo + hi) / 2.0;
        (y(mid) < level ? lo : hi) = mid;
      }
      return (lo + hi) / 2.0;
    };
    const double tr_true = first_crossing(0.9) - first_crossing(0.1);

    // True settling: last time |y-1| = 0.1.
    double ts_true = 0.0;
    for (double t = 0.0; t < 20.0; t += 1e-4) {
      if (std::abs(y(t) - 1.0) > 0.1) ts_true = t;
    }

    const double dt = oracle_dt(wn);
    const auto trace = simulate_step_response(wn, xi, dt, 20.0);
    const step_measurements got = measure_step_metrics(trace, dt);
    CHECK(got.rise_time == doctest::Approx(tr_true).epsilon(0.01));
    CHECK(got.settling_time == doctest::Approx(ts_true).epsilon(0.01));
  }
  SUBCASE("too-coarse sampling is rejected") {
    CHECK_THROWS_AS((void)simulate_step_response(2.0, 0.5, 1.0, 10.0),
                    std::invalid_argument);
  }
  SUBCASE("horizon that ends outside the band is rejected") {
    // Lightly damped loop cut off near its first peak (~1.85).
    const double dt = oracle_dt(2.0);
    const auto trace = simulate_step_response(2.0, 0.05, dt, 1.6);
    CHECK_THROWS_WITH_AS((void)measure_step_metrics(trace, dt),
                         "horizon too short to settle", std::runtime_error);
  }
}

TEST_CASE("full-loop response: derivative gain cuts rise time, adds overshoot") {
  // Ten deterministic draws here; the acceptance suite runs the full hundred.
  std::mt19937 rng(20211);
  for (int i = 0; i < 10; ++i) {
    const double kd = 0.2 + uniform01(rng) * 2.8;
    const double lag = 0.5 + uniform01(rng) * 3.5;
    const double xi = 0.25 + uniform01(rng) * 0.6;
    const double kp = (kd + 1.0) * (kd + 1.0) / (4.0 * xi * xi) / lag;

    const step_metrics m = loop_metrics({kp, kd, lag});
    const double dt = oracle_dt(m.omega_n);
    const double horizon = 60.0 / (m.xi * m.omega_n);
    const auto h = simulate_full_loop_step({kp, kd, lag}, dt, horizon);
    const auto g = simulate_step_response(m.omega_n, m.xi, dt, horizon);
    const step_measurements mh = measure_step_metrics(h, dt);
    const step_measurements mg = measure_step_metrics(g, dt);
    CHECK(mh.rise_time < mg.rise_time);
    CHECK(mh.overshoot > mg.overshoot);
  }
}

TEST_CASE("full-loop DC gain and zero-derivative limit") {
  const loop_params p{2.5, 0.0, 0.8};
  const step_metrics m = loop_metrics(p);
  const double dt = oracle_dt(m.omega_n);
  const double horizon = 80.0 / (m.xi * m.omega_n);
  const auto h = simulate_full_loop_step(p, dt, horizon);
  CHECK(h.back() == doctest::Approx(1.0).epsilon(1e-6));
  // With kd = 0 the loop is exactly the canonical system.
  const auto g = simulate_step_response(m.omega_n, m.xi, dt, horizon);
  REQUIRE(h.size() == g.size());
  for (std::size_t i = 0; i < h.size(); i += 25) {
    CHECK(h[i] == doctest::Approx(g[i]).epsilon(0.01));
  }
}

TEST_CASE("deceleration-phase derivative bound") {
  CHECK(kd_bound_decel(2.0, 0.2) == doctest::Approx(0.25));
  CHECK(kd_bound_decel(8.0 * 0.7, 0.7) == doctest::Approx(0.0));
  CHECK(kd_bound_decel(0.7, 3.2) == doctest::Approx(-0.973).epsilon(1e-3));
  // Monotone: grows with T_min, shrinks with lag.
  CHECK(kd_bound_decel(3.0, 0.2) > kd_bound_decel(2.0, 0.2));
  CHECK(kd_bound_decel(2.0, 0.4) < kd_bound_decel(2.0, 0.2));
}

TEST_CASE("acceleration-phase overshoot-distance condition") {
  SUBCASE("worked example accepts a 10 ft margin") {
    CHECK(accel_constraint_ok(4.0, 1.0, 1.0, 0.0, 10.0));
    const auto so = overshoot_distance({4.0, 1.0, 1.0}, 0.0);
    REQUIRE(so.has_value());
    CHECK(*so == doctest::Approx(0.168).epsilon(0.01));
  }
  SUBCASE("tight margin rejects the same loop") {
    CHECK(!accel_constraint_ok(4.0, 1.0, 1.0, 0.0, 0.1));
  }
  SUBCASE("overdamped loops satisfy the condition vacuously") {
    CHECK(accel_constraint_ok(0.25, 1.0, 1.0, 0.0, 1e-9));
    CHECK(!overshoot_distance({0.25, 1.0, 1.0}, 0.0).has_value());
  }
}

TEST_CASE("per-step gain tuning") {
  SUBCASE("deceleration clamps kd to 90% of the bound") {
    const tuned_pair t =
        tune_gain_pair(2.0, 1.0, 2.0, 0.2, 0.0, 100.0, drive_phase::decelerating);
    CHECK(t.kd == doctest::Approx(0.225));
    CHECK(t.kp == doctest::Approx(2.0));
    CHECK(!t.floored);
  }
  SUBCASE("kd already below the bound is untouched") {
    const tuned_pair t =
        tune_gain_pair(2.0, 0.1, 2.0, 0.2, 0.0, 100.0, drive_phase::decelerating);
    CHECK(t.kd == doctest::Approx(0.1));
  }
  SUBCASE("negative bound floors kd and flags") {
    const tuned_pair t =
        tune_gain_pair(2.0, 1.0, 0.7, 3.2, 0.0, 100.0, drive_phase::decelerating);
    CHECK(t.kd == 0.0);
    CHECK(t.floored);
  }
  SUBCASE("cruising leaves gains alone") {
    const tuned_pair t =
        tune_gain_pair(2.0, 1.0, 0.7, 3.2, 0.0, 100.0, drive_phase::cruising);
    CHECK(t.kp == 2.0);
    CHECK(t.kd == 1.0);
    CHECK(!t.floored);
  }
  SUBCASE("acceleration backs off until the overshoot condition passes") {
    // kp=4, kd=1, lag=1 starts with a ~0.168 ft overshoot transient; a 0.12 ft
    // margin needs nine 0.8x steps before the transient fits.
    const tuned_pair t =
        tune_gain_pair(4.0, 1.0, 2.0, 1.0, 0.0, 0.12, drive_phase::accelerating);
    CHECK(t.kp == doctest::Approx(4.0 * std::pow(0.8, 9)).epsilon(1e-9));
    CHECK(t.kd == doctest::Approx(std::pow(0.8, 9)).epsilon(1e-9));
    CHECK(accel_constraint_ok(t.kp, t.kd, 1.0, 0.0, 0.12));
    CHECK(!t.floored);
  }
  SUBCASE("acceleration back-off respects the configured sign of kp") {
    const tuned_pair t = tune_gain_pair(-4.0, 1.0, 2.0, 1.0, 0.0, 0.12,
                                        drive_phase::accelerating);
    CHECK(t.kp == doctest::Approx(-4.0 * std::pow(0.8, 9)).epsilon(1e-9));
    CHECK(t.kd == doctest::Approx(std::pow(0.8, 9)).epsilon(1e-9));
  }
  SUBCASE("impossible condition flags after ten back-off steps") {
    const tuned_pair t =
        tune_gain_pair(4.0, 1.0, 2.0, 1.0, 0.0, 0.0, drive_phase::accelerating);
    CHECK(t.floored);
    CHECK(t.kp >= kMinKp);
    CHECK(t.kd >= kMinKd);
  }
  SUBCASE("gains never increase") {
    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
      const double kp = 0.1 + uniform01(rng) * 8.0;
      const double kd = uniform01(rng) * 3.0;
      const double t_min = uniform01(rng) * 4.0;
      const double lag = 0.05 + uniform01(rng) * 4.0;
      const double s_min = uniform01(rng) * 20.0 - 5.0;
      for (drive_phase ph : {drive_phase::accelerating,
                             drive_phase::decelerating, drive_phase::cruising}) {
        const tuned_pair t = tune_gain_pair(kp, kd, t_min, lag, 0.0, s_min, ph);
        CHECK(std::abs(t.kp) <= std::abs(kp) + 1e-12);
        CHECK(t.kd <= kd + 1e-12);
        if (ph == drive_phase::decelerating && !t.floored) {
          // Strict feasibility whenever the bound is positive.
          CHECK(t.kd < kd_bound_decel(t_min, lag) + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("law-aware tuning routes the right gain pair") {
  gain_set g;  // table defaults: kp1=1, kp2=-1, kp3=1, ki1=-1, kd1=1, kd2=1

  SUBCASE("manual never tunes") {
    const gain_set out = tune_gains(g, control_law::manual, 0.7, 3.2, 0.0, 1.0,
                                    drive_phase::decelerating);
    CHECK(out.kd1 == g.kd1);
    CHECK(out.kd2 == g.kd2);
    CHECK(!out.infeasible);
  }
  SUBCASE("gap-following law clamps kd1 while decelerating") {
    const gain_set out = tune_gains(g, control_law::acc, 2.0, 0.2, 0.0, 100.0,
                                    drive_phase::decelerating);
    CHECK(out.kd1 == doctest::Approx(0.225));
    CHECK(out.kd2 == g.kd2);  // cooperative pair untouched
    CHECK(out.ki1 == g.ki1);
  }
  SUBCASE("cooperative law clamps kd2 while decelerating") {
    const gain_set out = tune_gains(g, control_law::cacc, 2.0, 0.2, 0.0, 100.0,
                                    drive_phase::decelerating);
    CHECK(out.kd2 == doctest::Approx(0.225));
    CHECK(out.kd1 == g.kd1);
    CHECK(out.ki1 == g.ki1);  // never tuned
  }
  SUBCASE("cruise law is exempt from the deceleration clamp") {
    const gain_set out = tune_gains(g, control_law::cruise, 0.7, 3.2, 0.0, 1.0,
                                    drive_phase::decelerating);
    CHECK(out.kp1 == g.kp1);
    CHECK(!out.infeasible);
  }
  SUBCASE("cruise law still backs off for the overshoot condition") {
    // Backing kp1 off at unit lag eventually overdamps the loop, which
    // satisfies the overshoot condition vacuously, so this is feasible.
    const gain_set out = tune_gains(g, control_law::cruise, 2.0, 1.0, 0.0, 1e-6,
                                    drive_phase::accelerating);
    CHECK(out.kp1 < g.kp1);
    CHECK(out.kp1 == doctest::Approx(std::pow(0.8, 7)).epsilon(1e-9));
    CHECK(!out.infeasible);
  }
  SUBCASE("cruise law flags when no back-off can fit the transient") {
    // At a 8 s lag the loop stays underdamped all the way down to the ten-step
    // limit, and a zero margin can never admit a positive transient.
    const gain_set out = tune_gains(g, control_law::cruise, 2.0, 8.0, 0.0, 0.0,
                                    drive_phase::accelerating);
    CHECK(out.kp1 == doctest::Approx(std::pow(0.8, 10)).epsilon(1e-9));
    CHECK(out.infeasible);
  }
  SUBCASE("infeasible deceleration bound sets the flag") {
    const gain_set out = tune_gains(g, control_law::acc, 0.7, 3.2, 0.0, 1.0,
                                    drive_phase::decelerating);
    CHECK(out.kd1 == 0.0);
    CHECK(out.infeasible);
  }
}

TEST_SUITE_END();
