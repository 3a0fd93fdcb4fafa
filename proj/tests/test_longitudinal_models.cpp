#include <doctest.h>

#include <cmath>
#include <optional>
#include <stdexcept>

#include "longsim/fleet_catalog.hpp"
#include "longsim/longitudinal_models.hpp"
#include "longsim/units.hpp"

using namespace longsim;

namespace {

const accel_bounds kWideBounds{25.0, 25.0};

}  // namespace

TEST_SUITE_BEGIN("longitudinal_models");

TEST_CASE("human car-following law") {
  const driver_type d5 = builtin_driver(5);

  SUBCASE("gap exactly at the minimum safe gap gives zero accel") {
    CHECK(iidm_accel(d5, 8.0, 22.0, 60.0, 60.0, 50.0, 110.0) ==
          doctest::Approx(0.0));
  }
  SUBCASE("leader at the driver's free-flow speed gives zero accel") {
    const double v_l = d5.speed_mult * 110.0;
    CHECK(iidm_accel(d5, 8.0, 22.0, 1e9, 60.0, v_l, 110.0) ==
          doctest::Approx(0.0).epsilon(1e-6));
  }
  SUBCASE("gap below the minimum safe gap brakes at the driver's fraction") {
    // Driver type 5 brakes at 0.99 of the dynamic limit.
    CHECK(iidm_accel(d5, 8.0, 22.0, 40.0, 60.0, 50.0, 110.0) ==
          doctest::Approx(-21.78));
  }
  SUBCASE("free-driving value matches the hand-expanded product") {
    const double gap = 120.0, s_min = 60.0, v_l = 55.0, ffs = 110.0;
    const double cs = 1.0 - std::pow(s_min / gap, 2.0);
    const double cv = 1.0 - std::pow(v_l / (d5.speed_mult * ffs), 4.0);
    CHECK(iidm_accel(d5, 8.0, 22.0, gap, s_min, v_l, ffs) ==
          doctest::Approx(d5.accel_mult * 8.0 * cs * cv).epsilon(1e-12));
  }
  SUBCASE("non-positive gap is a collision") {
    CHECK_THROWS_WITH_AS(
        (void)iidm_accel(d5, 8.0, 22.0, 0.0, 60.0, 50.0, 110.0),
        "collision: gap is non-positive", std::domain_error);
    CHECK_THROWS_AS((void)iidm_accel(d5, 8.0, 22.0, -4.0, 60.0, 50.0, 110.0),
                    std::domain_error);
  }
  SUBCASE("accel decreases continuously to zero approaching the safe gap") {
    double prev = iidm_accel(d5, 8.0, 22.0, 240.0, 60.0, 50.0, 110.0);
    CHECK(prev > 0.0);
    for (double gap : {120.0, 90.0, 70.0, 62.0, 60.5, 60.05, 60.0005}) {
      const double a = iidm_accel(d5, 8.0, 22.0, gap, 60.0, 50.0, 110.0);
      CHECK(a < prev);
      CHECK(a > 0.0);
      prev = a;
    }
    CHECK(prev < 0.01);  // vanishes at the branch point from above
  }
  SUBCASE("the branch switch is the law's only discontinuity") {
    const double above = iidm_accel(d5, 8.0, 22.0, 60.0, 60.0, 50.0, 110.0);
    const double below =
        iidm_accel(d5, 8.0, 22.0, 60.0 - 1e-9, 60.0, 50.0, 110.0);
    CHECK(above == doctest::Approx(0.0));
    CHECK(below == doctest::Approx(-21.78));
  }
  SUBCASE("the most aggressive driver dominates at equal state") {
    const driver_type d10 = builtin_driver(10);
    for (double gap : {80.0, 150.0, 400.0}) {
      for (double v_l : {20.0, 60.0, 95.0}) {
        CHECK(iidm_accel(d10, 8.0, 22.0, gap, 60.0, v_l, 110.0) >
              iidm_accel(d5, 8.0, 22.0, gap, 60.0, v_l, 110.0));
      }
    }
  }
  SUBCASE("a negative minimum safe gap stays finite and keeps accelerating") {
    const double a = iidm_accel(d5, 8.0, 22.0, 100.0, -30.0, 50.0, 110.0);
    CHECK(std::isfinite(a));
    CHECK(a > 0.0);
    CHECK(a < 8.0);
  }
  SUBCASE("explicit shaping exponents reproduce the defaults") {
    CHECK(iidm_accel(d5, 8.0, 22.0, 120.0, 60.0, 50.0, 110.0) ==
          iidm_accel(d5, 8.0, 22.0, 120.0, 60.0, 50.0, 110.0, 2.0, 4.0));
  }
}

TEST_CASE("cruise law") {
  SUBCASE("at the target speed the command is zero") {
    CHECK(cruise_command(1.0, 110.0, 110.0) == 0.0);
    CHECK(cruise_accel(1.0, 110.0, 110.0, kWideBounds) == 0.0);
  }
  SUBCASE("ten feet per second slow saturates a 7.5 limit") {
    CHECK(cruise_command(1.0, 100.0, 110.0) == doctest::Approx(10.0));
    CHECK(cruise_accel(1.0, 100.0, 110.0, {7.5, 25.0}) == doctest::Approx(7.5));
  }
  SUBCASE("ten feet per second fast stays within a 25 deceleration limit") {
    CHECK(cruise_accel(1.0, 120.0, 110.0, {7.5, 25.0}) == doctest::Approx(-10.0));
  }
}

TEST_CASE("gap-following law") {
  SUBCASE("zero errors command zero") {
    CHECK(gap_follow_command(-1.0, 1.0, 90.0, 90.0, 60.0, 60.0) == 0.0);
    CHECK(acc_accel(-1.0, 1.0, 90.0, 90.0, 60.0, 60.0, kWideBounds) == 0.0);
  }
  SUBCASE("table-gain hand arithmetic") {
    // Ten feet of surplus gap and a 5 ft/s closing speed net +5 ft/s^2.
    CHECK(acc_accel(-1.0, 1.0, 100.0, 90.0, 65.0, 60.0, kWideBounds) ==
          doctest::Approx(5.0));
  }
  SUBCASE("huge gap surplus saturates at the acceleration limit") {
    CHECK(acc_accel(-1.0, 1.0, 5000.0, 90.0, 60.0, 60.0, {7.5, 25.0}) ==
          doctest::Approx(7.5));
    CHECK(acc_accel(-1.0, 1.0, 6.0, 800.0, 60.0, 60.0, {7.5, 25.0}) ==
          doctest::Approx(-25.0));
  }
  SUBCASE("linear in each error before the clamp") {
    for (double lambda : {0.5, 2.0, -3.0}) {
      CHECK(gap_follow_command(-1.0, 1.0, 90.0 + 10.0 * lambda, 90.0, 60.0,
                               60.0) ==
            doctest::Approx(lambda * gap_follow_command(-1.0, 1.0, 100.0, 90.0,
                                                        60.0, 60.0)));
      CHECK(gap_follow_command(-1.0, 1.0, 90.0, 90.0, 60.0,
                               60.0 + 4.0 * lambda) ==
            doctest::Approx(lambda * gap_follow_command(-1.0, 1.0, 90.0, 90.0,
                                                        60.0, 64.0)));
    }
  }
}

TEST_CASE("cooperative law") {
  SUBCASE("with zero errors the leader's acceleration feeds through") {
    CHECK(cacc_accel(1.0, -1.0, 1.0, 90.0, 90.0, 60.0, 60.0, 3.0, kWideBounds) ==
          doctest::Approx(3.0));
  }
  SUBCASE("feedthrough is clamped to the deceleration limit") {
    CHECK(cacc_accel(1.0, -1.0, 1.0, 90.0, 90.0, 60.0, 60.0, -40.0,
                     {7.5, 25.0}) == doctest::Approx(-25.0));
  }
  SUBCASE("table-gain hand arithmetic") {
    // Speed error +2, gap error -4, leader coasting: 1*2 + (-1)*(-4) = 6.
    CHECK(cacc_accel(1.0, -1.0, 1.0, 94.0, 90.0, 58.0, 60.0, 0.0, kWideBounds) ==
          doctest::Approx(6.0));
  }
  SUBCASE("surplus gap accelerates, deficit brakes (sign sanity)") {
    CHECK(coop_follow_command(1.0, -1.0, 1.0, 120.0, 90.0, 60.0, 60.0, 0.0) >
          0.0);
    CHECK(coop_follow_command(1.0, -1.0, 1.0, 60.0, 90.0, 60.0, 60.0, 0.0) <
          0.0);
  }
  SUBCASE("linear in the error inputs before the clamp") {
    const double base =
        coop_follow_command(1.0, -1.0, 1.0, 100.0, 90.0, 58.0, 60.0, 0.0);
    CHECK(coop_follow_command(1.0, -1.0, 1.0, 110.0, 90.0, 56.0, 60.0, 0.0) ==
          doctest::Approx(2.0 * base));
  }
}

TEST_CASE("desired following gap") {
  SUBCASE("configured time gap governs when larger") {
    CHECK(desired_gap(1.1, 0.7, 80.0) == doctest::Approx(88.0));
  }
  SUBCASE("last step's minimum safe time gap governs when larger") {
    CHECK(desired_gap(0.6, 1.9, 80.0) == doctest::Approx(152.0));
  }
  SUBCASE("standstill floor") {
    CHECK(desired_gap(1.1, 0.7, 0.0) == 5.0);
    CHECK(desired_gap(1.1, 0.7, 4.0) == 5.0);  // 4.4 ft floors to 5
  }
}

TEST_CASE("sensor versus V2V gap discrepancy") {
  CHECK(gap_discrepancy(100.0, 89.0));    // 11 > 10
  CHECK(!gap_discrepancy(100.0, 91.0));   // 9 < 10
  CHECK(!gap_discrepancy(100.0, 90.0));   // exactly 10%: not significant
  CHECK(gap_discrepancy(10.0, 13.5));     // 3.5 > 3 ft absolute floor
  CHECK(!gap_discrepancy(10.0, 12.9));    // 2.9 < 3 ft
  CHECK(gap_discrepancy(89.0, 100.0));    // threshold keyed to the ranged gap
  CHECK(!gap_discrepancy(60.0, 60.0));
}

TEST_CASE("control-mode arbitration") {
  const double range = kDefaultDetectionRangeFt;
  CHECK(range == doctest::Approx(984.252).epsilon(1e-6));

  SUBCASE("manual drivers always use the human law") {
    CHECK(select_control_mode(vehicle_mode::manual, vehicle_mode::cooperative,
                              50.0, range, false) == control_law::manual);
    CHECK(select_control_mode(vehicle_mode::manual, std::nullopt, 0.0, range,
                              false) == control_law::manual);
  }
  SUBCASE("no leader in range falls back to speed cruising") {
    CHECK(select_control_mode(vehicle_mode::autonomous, std::nullopt, 0.0,
                              range, false) == control_law::cruise);
    // Leader 400 m ahead, 300 m sensor: out of range.
    CHECK(select_control_mode(vehicle_mode::autonomous,
                              vehicle_mode::autonomous,
                              400.0 * kMetersToFeet, range,
                              false) == control_law::cruise);
    CHECK(select_control_mode(vehicle_mode::cooperative, std::nullopt, 0.0,
                              range, false) == control_law::cruise);
  }
  SUBCASE("cooperative pairs with consistent reports cooperate") {
    CHECK(select_control_mode(vehicle_mode::cooperative,
                              vehicle_mode::cooperative, 50.0, range,
                              false) == control_law::cacc);
  }
  SUBCASE("everything else gap-follows") {
    CHECK(select_control_mode(vehicle_mode::autonomous, vehicle_mode::manual,
                              50.0, range, false) == control_law::acc);
    CHECK(select_control_mode(vehicle_mode::autonomous,
                              vehicle_mode::cooperative, 50.0, range,
                              false) == control_law::acc);
    CHECK(select_control_mode(vehicle_mode::cooperative, vehicle_mode::manual,
                              50.0, range, false) == control_law::acc);
    CHECK(select_control_mode(vehicle_mode::cooperative,
                              vehicle_mode::autonomous, 50.0, range,
                              false) == control_law::acc);
    // Discrepant gap reports break the cooperative pairing.
    CHECK(select_control_mode(vehicle_mode::cooperative,
                              vehicle_mode::cooperative, 50.0, range,
                              true) == control_law::acc);
  }
  SUBCASE("boundary: gap exactly at range still counts as detected") {
    CHECK(select_control_mode(vehicle_mode::autonomous,
                              vehicle_mode::autonomous, range, range,
                              false) == control_law::acc);
  }
}

TEST_CASE("acceleration clamp") {
  CHECK(clamp_accel(5.0, 7.5, 25.0) == 5.0);
  CHECK(clamp_accel(10.0, 7.5, 25.0) == 7.5);
  CHECK(clamp_accel(-40.0, 7.5, 25.0) == -25.0);
  CHECK(clamp_accel(7.5, 7.5, 25.0) == 7.5);
  CHECK(clamp_accel(-25.0, 7.5, 25.0) == -25.0);
}

TEST_CASE("mode names and per-mode defaults") {
  SUBCASE("string round-trips") {
    for (vehicle_mode m : {vehicle_mode::manual, vehicle_mode::autonomous,
                           vehicle_mode::cooperative}) {
      const auto back = vehicle_mode_from_string(to_string(m));
      REQUIRE(back.has_value());
      CHECK(*back == m);
    }
    CHECK(!vehicle_mode_from_string("platooning").has_value());
    CHECK(!vehicle_mode_from_string("").has_value());
  }
  SUBCASE("sensing delays") {
    CHECK(default_tau_s(vehicle_mode::manual) == 1.0);
    CHECK(default_tau_s(vehicle_mode::autonomous) == 0.6);
    CHECK(default_tau_s(vehicle_mode::cooperative) == 0.0);
    CHECK(kDefaultTauC == 0.1);
  }
  SUBCASE("time-gap setpoints") {
    CHECK(!default_t_set(vehicle_mode::manual).has_value());
    CHECK(default_t_set(vehicle_mode::autonomous) == 1.1);
    CHECK(default_t_set(vehicle_mode::cooperative) == 0.6);
  }
  SUBCASE("law-shaping constants") {
    CHECK(kDefaultFreeFlowSpeedFps == 110.0);
    CHECK(kDefaultGapExponent == 2.0);
    CHECK(kDefaultSpeedExponent == 4.0);
    CHECK(kStandstillGapFt == 5.0);
  }
}

TEST_SUITE_END();
