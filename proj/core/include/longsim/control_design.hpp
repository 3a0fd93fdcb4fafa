#pragma once

#include <optional>
#include <vector>

namespace longsim {

// Upper-level gap controller viewed as a second-order loop: a PD controller
// (gains kp, kd) driving a first-order actuation plant with lag tau.
struct loop_params {
  double kp = 0.0;   // proportional gain, 1/s; must be > 0 for metrics
  double kd = 0.0;   // derivative gain, dimensionless
  double lag = 0.0;  // actuation lag, s; must be > 0
};

// Closed-form step-response characterization of the loop.
struct step_metrics {
  double omega_n = 0.0;        // undamped natural frequency, rad/s
  double xi = 0.0;             // damping ratio
  double rise_time = 0.0;      // pi / (2 omega_n)
  double settling_time = 0.0;  // 4 / (xi omega_n)
  std::optional<double> overshoot;  // exp(-pi xi / sqrt(1-xi^2)); absent when xi >= 1
  std::optional<double> peak_time;  // pi / (omega_n sqrt(1-xi^2)); absent when xi >= 1
};

step_metrics loop_metrics(const loop_params& p);

// Distance covered by the overshoot transient: (T_c - T_r) * (v_p - v_i).
// Absent for overdamped loops (no overshoot).
std::optional<double> overshoot_distance(const loop_params& p, double v_i);

// Numerical oracles ----------------------------------------------------------

// Unit-step response of G(s) = wn^2 / (s^2 + 2 xi wn s + wn^2), RK4-integrated,
// sampled every dt from t=0 through the horizon. Requires dt <= 0.01*(2pi/wn).
std::vector<double> simulate_step_response(double omega_n, double xi, double dt,
                                           double horizon);

// Unit-step response of the full loop including the controller zero:
// H(s) = (kp + kd s) / (lag s^2 + (kd+1) s + kp).
std::vector<double> simulate_full_loop_step(const loop_params& p, double dt,
                                            double horizon);

// Metrics measured off a sampled trace: 10-90% rise time, +/-10%-band settling
// time, fractional peak overshoot, and peak time. Throws std::runtime_error
// ("horizon too short to settle") when the trace ends outside the band.
struct step_measurements {
  double rise_time = 0.0;
  double settling_time = 0.0;
  double overshoot = 0.0;
  double peak_time = 0.0;
};

step_measurements measure_step_metrics(const std::vector<double>& trace, double dt,
                                       double final_value = 1.0);

// Safety-driven gain constraints ----------------------------------------------

// Strict upper bound on kd while decelerating: T_min / (8 lag) - 1.
// A negative bound means no kd >= 0 is feasible.
double kd_bound_decel(double t_min, double lag);

// Overshoot-distance condition while accelerating: true when the loop's
// overshoot transient covers less than the minimum safe gap (or the loop is
// overdamped, where the condition is vacuous). kp enters by magnitude.
bool accel_constraint_ok(double kp, double kd, double lag, double v_i,
                         double s_min);

// Per-step gain tuning ---------------------------------------------------------

enum class drive_phase { accelerating, decelerating, cruising };

// Which feedback law a vehicle is applying this step.
enum class control_law { manual, cruise, acc, cacc };

// The full controller gain set (cruise, gap-following, cooperative).
struct gain_set {
  double kp1 = 1.0;   // cruise speed-tracking gain, 1/s
  double kp2 = -1.0;  // gap-following gap-error gain
  double kp3 = 1.0;   // cooperative speed-error gain
  double ki1 = -1.0;  // cooperative gap-error gain (never tuned)
  double kd1 = 1.0;   // gap-following speed-error gain
  double kd2 = 1.0;   // cooperative feedforward gain
  bool infeasible = false;
};

inline constexpr double kMinKp = 0.05;  // gain floor, 1/s
inline constexpr double kMinKd = 0.0;

// One (kp, kd) pair adjusted toward the safety constraints. kp keeps its
// configured sign; magnitudes only ever shrink.
struct tuned_pair {
  double kp = 0.0;
  double kd = 0.0;
  bool floored = false;  // a floor or the iteration limit blocked feasibility
};

// Decelerating: kd <- max(kMinKd, min(kd, 0.9 * kd_bound_decel)), flag when the
// bound is not positive. Accelerating: scale (|kp|, kd) by 0.8 (at most ten
// times, floored at kMinKp/kMinKd) until accel_constraint_ok passes; flag when
// it still fails. Cruising: unchanged. lag <= 1e-6 disables tuning.
tuned_pair tune_gain_pair(double kp, double kd, double t_min, double lag,
                          double v_i, double s_min, drive_phase phase);

// Applies tune_gain_pair to the gain pair the active law uses: cruise ->
// (kp1, 0) except no deceleration clamp; acc -> (kp2, kd1); cacc -> (kp3, kd2);
// manual -> unchanged. ki1 is never adjusted.
gain_set tune_gains(const gain_set& current, control_law law, double t_min,
                    double lag, double v_i, double s_min, drive_phase phase);

}  // namespace longsim
