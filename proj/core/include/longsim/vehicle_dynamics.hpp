#pragma once

#include "longsim/fleet_catalog.hpp"
#include "longsim/units.hpp"

namespace longsim {

// Ambient and road conditions shared by every vehicle in a scenario.
struct environment {
  double air_density = kAirDensitySlugFt3;  // slug/ft^3
  double grade = 0.0;                       // rise over run (signed)
  double adhesion = 1.0;                    // tire-road adhesion coefficient (mu)
  double braking_efficiency = 0.95;         // fraction of ideal braking force realized
  double braking_mass_factor = 1.04;        // rotational-inertia factor while braking
};

// Per-step dynamic capability of one vehicle at one speed.
struct dynamics_output {
  int gear = 1;
  double engine_rpm = 0.0;
  double engine_torque_lbft = 0.0;
  double engine_power_hp = 0.0;
  double engine_force_lb = 0.0;      // tractive effort the engine can deliver
  double traction_limit_lb = 0.0;    // tractive effort the tires can transmit
  double braking_force_lb = 0.0;     // maximum usable braking force
  double resistance_lb = 0.0;        // aero + rolling + grade
  double accel_mass_factor = 1.0;    // rotational-inertia factor while driving
  double max_accel_fps2 = 0.0;       // a_max >= 0
  double max_decel_fps2 = 0.0;       // d_max > 0 (magnitude)
  double actuation_lag_s = 0.0;      // v / d_max
};

// Rolling-resistance coefficient; doubles between rest and 147 ft/s.
double rolling_coefficient(double v_fps);

double aerodynamic_resistance(const vehicle_spec& v, const environment& env, double v_fps);
double rolling_resistance(const vehicle_spec& v, double v_fps);
// Small-angle grade force W*G; |grade| must be < 0.25.
double grade_resistance(const vehicle_spec& v, const environment& env);
double total_resistance(const vehicle_spec& v, const environment& env, double v_fps);

// Hysteretic gear selection: upshift above the gear's up_mph, downshift below
// its down_mph, repeated until stable. previous_gear is 1-based.
int select_gear(const vehicle_spec& v, double v_fps, int previous_gear);

// Crankshaft speed implied by road speed in a gear, clamped to [idle, max].
double engine_speed_rpm(const vehicle_spec& v, double v_fps, int gear);

// Power in horsepower from torque (lb-ft) and crank speed (rev/s).
double engine_power_hp(double torque_lbft, double rev_per_s);

// Drive force at the wheels from the engine through the current gear.
double engine_tractive_effort(const vehicle_spec& v, double v_fps, int gear);

// Adhesion-limited tractive effort for the drivetrain layout.
// Throws std::domain_error("degenerate geometry") on a rear-wheel layout with
// wheelbase <= mu * cg height.
double max_tractive_effort(const vehicle_spec& v, const environment& env, double v_fps);

// Adhesion-limited braking force for the drivetrain layout (same geometry
// error as max_tractive_effort on the degenerate rear-wheel case).
double max_braking_force(const vehicle_spec& v, const environment& env, double v_fps);

// Rotational-inertia mass factor while driving, from the overall gear ratio.
double accel_mass_factor(double overall_ratio);

// Full capability snapshot at (v, gear history): gear selection, engine and
// traction limits, resistances, a_max, d_max, and actuation lag v/d_max.
dynamics_output compute_dynamics(const vehicle_spec& v, const environment& env,
                                 double v_fps, int previous_gear);

// Smallest safe bumper gap for a follower: covers sensing + communication
// delay plus the braking-lag gap difference. May be negative; callers clamp.
double min_safe_gap(double v_follower, double tau_s, double tau_c,
                    double lag_follower, double v_leader, double lag_leader);

// Time-gap form of the same bound.
double min_safe_time_gap(double tau_s, double tau_c, double lag_follower,
                         double lag_leader);

}  // namespace longsim
