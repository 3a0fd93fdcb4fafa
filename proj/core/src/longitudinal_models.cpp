#include "longsim/longitudinal_models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace longsim {

std::string to_string(vehicle_mode m) {
  switch (m) {
    case vehicle_mode::manual: return "manual";
    case vehicle_mode::autonomous: return "autonomous";
    case vehicle_mode::cooperative: return "cooperative";
  }
  return "manual";
}

std::optional<vehicle_mode> vehicle_mode_from_string(const std::string& s) {
  if (s == "manual") return vehicle_mode::manual;
  if (s == "autonomous") return vehicle_mode::autonomous;
  if (s == "cooperative") return vehicle_mode::cooperative;
  return std::nullopt;
}

double default_tau_s(vehicle_mode m) {
  switch (m) {
    case vehicle_mode::manual: return 1.0;
    case vehicle_mode::autonomous: return 0.6;
    case vehicle_mode::cooperative: return 0.0;
  }
  return 1.0;
}

std::optional<double> default_t_set(vehicle_mode m) {
  switch (m) {
    case vehicle_mode::manual: return std::nullopt;
    case vehicle_mode::autonomous: return 1.1;
    case vehicle_mode::cooperative: return 0.6;
  }
  return std::nullopt;
}

namespace {

// (base)^exp with the sign convention of even integral exponents preserved
// when the base is negative (a negative minimum safe gap is legal input).
double signed_pow(double base, double exponent) {
  if (base >= 0.0) return std::pow(base, exponent);
  const double mag = std::pow(-base, exponent);
  const bool odd_integer =
      std::floor(exponent) == exponent && std::fmod(exponent, 2.0) != 0.0;
  return odd_integer ? -mag : mag;
}

}  // namespace

double iidm_accel(const driver_type& d, double a_max, double d_max, double gap,
                  double s_min, double v_leader, double free_flow_speed,
                  double alpha, double beta) {
  if (gap <= 0.0) throw std::domain_error("collision: gap is non-positive");
  if (gap < s_min) return -d.decel_mult * d_max;
  const double gap_factor = 1.0 - signed_pow(s_min / gap, alpha);
  const double speed_factor =
      1.0 - std::pow(v_leader / (d.speed_mult * free_flow_speed), beta);
  return d.accel_mult * a_max * gap_factor * speed_factor;
}

double cruise_command(double kp1, double v, double target_speed) {
  return kp1 * (target_speed - v);
}

double gap_follow_command(double kp2, double kd1, double gap, double desired_gap,
                          double v_self, double v_leader) {
  return kp2 * (desired_gap - gap) + kd1 * (v_leader - v_self);
}

double coop_follow_command(double kp3, double ki1, double kd2, double gap,
                           double desired_gap, double v_self, double v_leader,
                           double leader_accel_prev) {
  return kp3 * (v_leader - v_self) + ki1 * (desired_gap - gap) +
         kd2 * leader_accel_prev;
}

double cruise_accel(double kp1, double v, double target_speed,
                    const accel_bounds& b) {
  return clamp_accel(cruise_command(kp1, v, target_speed), b.a_max, b.d_max);
}

double acc_accel(double kp2, double kd1, double gap, double desired_gap,
                 double v_self, double v_leader, const accel_bounds& b) {
  return clamp_accel(
      gap_follow_command(kp2, kd1, gap, desired_gap, v_self, v_leader),
      b.a_max, b.d_max);
}

double cacc_accel(double kp3, double ki1, double kd2, double gap,
                  double desired_gap, double v_self, double v_leader,
                  double leader_accel_prev, const accel_bounds& b) {
  return clamp_accel(coop_follow_command(kp3, ki1, kd2, gap, desired_gap,
                                         v_self, v_leader, leader_accel_prev),
                     b.a_max, b.d_max);
}

double desired_gap(double t_set, double t_min_prev, double v_prev) {
  return std::max(kStandstillGapFt, std::max(t_set, t_min_prev) * v_prev);
}

bool gap_discrepancy(double sensed_gap, double v2v_gap) {
  return std::abs(sensed_gap - v2v_gap) > std::max(0.1 * sensed_gap, 3.0);
}

control_law select_control_mode(vehicle_mode self,
                                std::optional<vehicle_mode> leader, double gap,
                                double detection_range, bool discrepancy) {
  if (self == vehicle_mode::manual) return control_law::manual;
  if (!leader || gap > detection_range) return control_law::cruise;
  if (self == vehicle_mode::cooperative && *leader == vehicle_mode::cooperative &&
      !discrepancy)
    return control_law::cacc;
  return control_law::acc;
}

double clamp_accel(double command, double a_max, double d_max) {
  return std::clamp(command, -d_max, a_max);
}

}  // namespace longsim
