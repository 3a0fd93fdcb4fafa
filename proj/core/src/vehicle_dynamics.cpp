#include "longsim/vehicle_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace longsim {

double rolling_coefficient(double v_fps) {
  return 0.01 * (1.0 + v_fps / 147.0);
}

double aerodynamic_resistance(const vehicle_spec& v, const environment& env,
                              double v_fps) {
  return env.air_density * v.drag_coeff * v.frontal_area_ft2() * v_fps * v_fps / 2.0;
}

double rolling_resistance(const vehicle_spec& v, double v_fps) {
  return rolling_coefficient(v_fps) * v.weight_lb;
}

double grade_resistance(const vehicle_spec& v, const environment& env) {
  if (!(std::abs(env.grade) < 0.25))
    throw std::domain_error("grade outside small-angle regime");
  return v.weight_lb * env.grade;
}

double total_resistance(const vehicle_spec& v, const environment& env,
                        double v_fps) {
  return aerodynamic_resistance(v, env, v_fps) + rolling_resistance(v, v_fps) +
         grade_resistance(v, env);
}

int select_gear(const vehicle_spec& v, double v_fps, int previous_gear) {
  const auto& gears = v.transmission.gears;
  const int count = static_cast<int>(gears.size());
  if (previous_gear < 1 || previous_gear > count)
    throw std::invalid_argument("previous_gear out of range");
  const double mph = v_fps * kFpsToMph;
  int g = previous_gear;
  while (g < count && mph > gears[g - 1].up_mph) ++g;
  while (g > 1 && mph < gears[g - 1].down_mph) --g;
  return g;
}

double engine_speed_rpm(const vehicle_spec& v, double v_fps, int gear) {
  const gear_spec& g = v.transmission.gears.at(gear - 1);
  const double overall = g.ratio * v.transmission.diff_ratio;
  const double rpm = v_fps * overall * 60.0 /
                     (2.0 * M_PI * v.wheel_radius_ft * (1.0 - v.transmission.slippage));
  return std::clamp(rpm, v.engine.idle_rpm, v.engine.max_rpm);
}

double engine_power_hp(double torque_lbft, double rev_per_s) {
  return 2.0 * M_PI * torque_lbft * rev_per_s / kHpFtLbPerSec;
}

double engine_tractive_effort(const vehicle_spec& v, double v_fps, int gear) {
  const gear_spec& g = v.transmission.gears.at(gear - 1);
  const double overall = g.ratio * v.transmission.diff_ratio;
  const double torque = torque_at(v.engine, engine_speed_rpm(v, v_fps, gear));
  return torque * overall * v.transmission.efficiency / v.wheel_radius_ft;
}

double max_tractive_effort(const vehicle_spec& v, const environment& env,
                           double v_fps) {
  const double mu = env.adhesion;
  const double w = v.weight_lb;
  const double wheelbase = v.wheelbase_ft();
  const double h = v.cg_height_ft();
  const double f = rolling_coefficient(v_fps);
  switch (v.drivetrain) {
    case drivetrain_type::front_wheel:
      return mu * w * (v.rear_axle_to_cg_ft() + h * f) / (wheelbase + mu * h);
    case drivetrain_type::rear_wheel:
      if (wheelbase <= mu * h) throw std::domain_error("degenerate geometry");
      return mu * w * (v.front_axle_to_cg_ft() - h * f) / (wheelbase - mu * h);
    case drivetrain_type::all_wheel:
      return mu * w;
  }
  return mu * w;
}

double max_braking_force(const vehicle_spec& v, const environment& env,
                         double v_fps) {
  const double mu = env.adhesion;
  const double w = v.weight_lb;
  const double wheelbase = v.wheelbase_ft();
  const double h = v.cg_height_ft();
  const double f = rolling_coefficient(v_fps);
  const double eta = env.braking_efficiency;
  double force = 0.0;
  switch (v.drivetrain) {
    case drivetrain_type::front_wheel:
      force = eta * mu * w * (v.rear_axle_to_cg_ft() + h * (mu + f)) / wheelbase;
      break;
    case drivetrain_type::rear_wheel:
      if (wheelbase <= mu * h) throw std::domain_error("degenerate geometry");
      force = eta * mu * w * (v.front_axle_to_cg_ft() - h * (mu + f)) / wheelbase;
      break;
    case drivetrain_type::all_wheel:
      force = eta * mu * w;
      break;
  }
  return std::max(0.0, force);
}

double accel_mass_factor(double overall_ratio) {
  return 1.04 + 0.0025 * overall_ratio * overall_ratio;
}

dynamics_output compute_dynamics(const vehicle_spec& v, const environment& env,
                                 double v_fps, int previous_gear) {
  dynamics_output out;
  out.gear = select_gear(v, v_fps, previous_gear);
  const gear_spec& g = v.transmission.gears[out.gear - 1];
  const double overall = g.ratio * v.transmission.diff_ratio;
  out.engine_rpm = engine_speed_rpm(v, v_fps, out.gear);
  out.engine_torque_lbft = torque_at(v.engine, out.engine_rpm);
  out.engine_power_hp = engine_power_hp(out.engine_torque_lbft, out.engine_rpm / 60.0);
  out.engine_force_lb =
      out.engine_torque_lbft * overall * v.transmission.efficiency / v.wheel_radius_ft;
  out.traction_limit_lb = max_tractive_effort(v, env, v_fps);
  out.resistance_lb = total_resistance(v, env, v_fps);
  out.accel_mass_factor = accel_mass_factor(overall);

  const double mass = v.mass_slug();
  out.max_accel_fps2 = std::max(
      0.0, (std::min(out.traction_limit_lb, out.engine_force_lb) - out.resistance_lb) /
               (mass * out.accel_mass_factor));

  out.braking_force_lb = max_braking_force(v, env, v_fps);
  out.max_decel_fps2 =
      (out.braking_force_lb + out.resistance_lb) / (mass * env.braking_mass_factor);
  out.actuation_lag_s = out.max_decel_fps2 > 0.0 ? v_fps / out.max_decel_fps2 : 0.0;
  return out;
}

double min_safe_gap(double v_follower, double tau_s, double tau_c,
                    double lag_follower, double v_leader, double lag_leader) {
  return (tau_s + tau_c + lag_follower / 2.0) * v_follower -
         lag_leader * v_leader / 2.0;
}

double min_safe_time_gap(double tau_s, double tau_c, double lag_follower,
                         double lag_leader) {
  return tau_s + tau_c + lag_follower - lag_leader;
}

}  // namespace longsim
