#pragma once

#include <optional>

#include "longsim/control_design.hpp"
#include "longsim/fleet_catalog.hpp"
#include "longsim/units.hpp"
#include "longsim/vehicle_dynamics.hpp"

namespace longsim {

// Driving automation level of one vehicle in the string.
enum class vehicle_mode { manual, autonomous, cooperative };

std::string to_string(vehicle_mode m);
std::optional<vehicle_mode> vehicle_mode_from_string(const std::string& s);

// Sensor reach of the gap sensor / V2V link.
inline constexpr double kDefaultDetectionRangeFt = 300.0 * kMetersToFeet;

// Free-flow speed and shaping exponents for the human car-following law.
inline constexpr double kDefaultFreeFlowSpeedFps = 110.0;
inline constexpr double kDefaultGapExponent = 2.0;    // alpha
inline constexpr double kDefaultSpeedExponent = 4.0;  // beta

// Floor on the desired following gap at very low speed.
inline constexpr double kStandstillGapFt = 5.0;

// Per-mode response delays and time-gap setpoints.
double default_tau_s(vehicle_mode m);                  // sensing delay, s
inline constexpr double kDefaultTauC = 0.1;            // actuation-command delay, s
std::optional<double> default_t_set(vehicle_mode m);   // time-gap setpoint, s

// Raw control commands (pre-limit). The engine clamps every command into
// [-d_max, a_max] via clamp_accel; the unclamped value also classifies the
// drive phase for gain tuning.

// Human car-following: free-driving acceleration scaled by the gap-closing
// and speed-matching factors when the gap is safe, hard braking otherwise.
// Throws std::domain_error when gap <= 0 (collision; handled upstream).
double iidm_accel(const driver_type& d, double a_max, double d_max, double gap,
                  double s_min, double v_leader, double free_flow_speed,
                  double alpha = kDefaultGapExponent,
                  double beta = kDefaultSpeedExponent);

// Proportional speed tracking toward a target speed.
double cruise_command(double kp1, double v, double target_speed);

// Gap-following PD law: kp2 acts on (desired_gap - gap), kd1 on speed error.
double gap_follow_command(double kp2, double kd1, double gap, double desired_gap,
                          double v_self, double v_leader);

// Cooperative law: speed error, gap error, and feedforward of the leader's
// previous commanded acceleration received over V2V.
double coop_follow_command(double kp3, double ki1, double kd2, double gap,
                           double desired_gap, double v_self, double v_leader,
                           double leader_accel_prev);

// Clamp window for a commanded acceleration: [-d_max, a_max].
struct accel_bounds {
  double a_max = 0.0;
  double d_max = 0.0;
};

// Bounded forms of the three controller laws: the raw command limited to the
// vehicle's current dynamic envelope.
double cruise_accel(double kp1, double v, double target_speed,
                    const accel_bounds& b);
double acc_accel(double kp2, double kd1, double gap, double desired_gap,
                 double v_self, double v_leader, const accel_bounds& b);
double cacc_accel(double kp3, double ki1, double kd2, double gap,
                  double desired_gap, double v_self, double v_leader,
                  double leader_accel_prev, const accel_bounds& b);

// Desired following gap from the configured setpoint, last step's minimum
// safe time gap, and last step's speed, floored at the standstill gap.
double desired_gap(double t_set, double t_min_prev, double v_prev);

// True when the ranged gap and the V2V-reported gap disagree by more than
// max(10% of the ranged gap, 3 ft).
bool gap_discrepancy(double sensed_gap, double v2v_gap);

// Arbitration: manual drivers always follow the human law; without a leader
// in detection range every automated vehicle falls back to speed cruising;
// cooperative pairs with consistent gap reports use the cooperative law;
// everything else uses gap-following.
control_law select_control_mode(vehicle_mode self,
                                std::optional<vehicle_mode> leader, double gap,
                                double detection_range, bool discrepancy);

// Dynamic-limit clamp applied to every command.
double clamp_accel(double command, double a_max, double d_max);

}  // namespace longsim
