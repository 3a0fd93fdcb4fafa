#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "longsim/control_design.hpp"
#include "longsim/fleet_catalog.hpp"
#include "longsim/longitudinal_models.hpp"
#include "longsim/schedule.hpp"
#include "longsim/vehicle_dynamics.hpp"

namespace longsim {

struct scenario_vehicle {
  vehicle_spec spec;
  driver_type driver;
  vehicle_mode mode = vehicle_mode::manual;
};

// A complete simulation configuration. The first vehicle is the leader and
// tracks the schedule; every later vehicle follows the one before it.
struct scenario {
  schedule sched;
  std::vector<scenario_vehicle> vehicles;
  environment env;
  double dt = 0.1;

  // Placement: by default vehicles start 100 ft apart front-bumper-to-front-
  // bumper (leader at 100*(N-1), last vehicle at 0). An explicit value is a
  // bumper gap instead: x_next = x - gap - leader_length.
  std::optional<double> initial_gap;

  // Per-mode defaults apply unless overridden for the whole string.
  std::optional<double> t_set;  // time-gap setpoint, s
  std::optional<double> tau_s;  // sensing delay, s
  double tau_c = kDefaultTauC;  // actuation-command delay, s

  gain_set gains;  // configured gains; tuning restarts from these every step
  double free_flow_speed = kDefaultFreeFlowSpeedFps;
  double alpha = kDefaultGapExponent;
  double beta = kDefaultSpeedExponent;
  double detection_range_ft = kDefaultDetectionRangeFt;

  bool continue_on_collision = false;
  int threads = 1;

  // Summary windows (documented defaults; configurable).
  double tgap_warmup_s = 30.0;       // ignore T_gap peaks before this time
  double tgap_min_speed_fps = 10.0;  // ignore T_gap peaks below this speed

  unsigned long long seed = 0;  // reserved; the engine is fully deterministic

  double tau_s_for(vehicle_mode m) const {
    return tau_s ? *tau_s : default_tau_s(m);
  }
  double t_set_for(vehicle_mode m) const {
    if (t_set) return *t_set;
    const auto d = default_t_set(m);
    return d ? *d : 0.0;
  }
};

// Empty string when the scenario is valid, else a message naming the field.
std::string validate_scenario(const scenario& sc);

// One vehicle's record at one step. `a` is the acceleration decided at this
// step and applied over the following interval, so
//   x[k+1] - x[k] = v[k] dt + a[k] dt^2 / 2   and   v[k+1] - v[k] = a[k] dt
// hold exactly (up to the v >= 0 floor).
struct vehicle_state {
  double x = 0.0;
  double v = 0.0;
  double a = 0.0;
  int gear = 1;
  dynamics_output dyn;
  std::optional<double> gap;       // bumper gap to the vehicle ahead
  std::optional<double> time_gap;  // gap / v; absent at v = 0
  std::optional<double> s_min;     // minimum safe gap
  std::optional<double> t_min;     // minimum safe time gap
  control_law law = control_law::cruise;
  double kp = 0.0, ki = 0.0, kd = 0.0;  // gains applied this step
  bool gain_flag = false;               // tuning hit a floor/iteration limit
  bool collided = false;                // gap <= 0 at this step
};

struct collision_event {
  int step = 0;
  int vehicle = 0;  // 0-based index into scenario.vehicles
};

struct sim_trace {
  double dt = 0.1;
  std::vector<std::vector<vehicle_state>> steps;  // steps[k][i]
  std::vector<collision_event> collisions;
  bool halted = false;  // stopped early on a collision
};

// Initial records: all at rest in gear 1 with Table-level default gains.
// Throws std::invalid_argument on overlapping placement.
std::vector<vehicle_state> init_string(const scenario& sc);

// Records at step k (k >= 1) from the records at step k-1. Each vehicle's
// update reads only step k-1 state, so vehicles may be computed in parallel.
std::vector<vehicle_state> step_string(const std::vector<vehicle_state>& prev,
                                       const scenario& sc, int k);

sim_trace run(const scenario& sc);

struct vehicle_summary {
  double peak_a_max = 0.0;  // largest available a_max while moving and active
  double peak_d_max = 0.0;  // largest available d_max while moving
  double peak_t_gap = 0.0;  // largest time gap after the warm-up window
  int collision_count = 0;
  double speed_rmse_vs_leader = 0.0;  // leader row: RMSE vs the schedule
};

std::vector<vehicle_summary> summarize(const sim_trace& trace, const scenario& sc);

// Writers. All numeric cells are fixed six-decimal; -0 is normalized.
void write_trace_csv(std::ostream& out, const sim_trace& trace, const scenario& sc);
void write_summary_json(std::ostream& out, const sim_trace& trace, const scenario& sc);
void write_plot_csv(std::ostream& out, const sim_trace& trace, const scenario& sc);

std::string format_fixed(double value);

}  // namespace longsim
