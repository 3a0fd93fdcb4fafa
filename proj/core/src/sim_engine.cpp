#include "longsim/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace longsim {

namespace {

bool gain_magnitudes_ok(const gain_set& g) {
  return std::abs(g.kp1) <= 100.0 && std::abs(g.kp2) <= 100.0 &&
         std::abs(g.kp3) <= 100.0 && std::abs(g.ki1) <= 100.0 &&
         std::abs(g.kd1) <= 100.0 && std::abs(g.kd2) <= 100.0;
}

}  // namespace

std::string validate_scenario(const scenario& sc) {
  if (!(sc.dt > 0.0)) return "dt must be positive";
  if (sc.vehicles.empty()) return "vehicles must not be empty";
  if (sc.sched.samples.empty()) return "schedule must not be empty";
  if (sc.threads < 1) return "threads must be at least 1";
  if (!gain_magnitudes_ok(sc.gains)) return "gain magnitudes must be at most 100";
  if (sc.tau_c < 0.0) return "tau_c must be non-negative";
  if (sc.tau_s && *sc.tau_s < 0.0) return "tau_s must be non-negative";
  if (sc.t_set && !(*sc.t_set > 0.0)) return "t_set must be positive";
  if (sc.initial_gap && !(*sc.initial_gap > 0.0)) return "initial_gap must be positive";
  if (!(sc.free_flow_speed > 0.0)) return "free_flow_speed must be positive";
  if (!(sc.alpha > 0.0)) return "alpha must be positive";
  if (!(sc.beta > 0.0)) return "beta must be positive";
  if (!(sc.detection_range_ft > 0.0)) return "detection_range must be positive";
  if (!(sc.tgap_warmup_s >= 0.0)) return "tgap_warmup must be non-negative";
  if (!(sc.tgap_min_speed_fps >= 0.0)) return "tgap_min_speed must be non-negative";
  if (!(sc.env.air_density > 0.0)) return "air_density must be positive";
  if (!(std::abs(sc.env.grade) < 0.25)) return "grade outside small-angle regime";
  if (!(sc.env.adhesion > 0.0 && sc.env.adhesion <= 2.0))
    return "adhesion must lie in (0, 2]";
  if (!(sc.env.braking_efficiency > 0.0 && sc.env.braking_efficiency <= 1.0))
    return "braking_efficiency must lie in (0, 1]";
  if (!(sc.env.braking_mass_factor >= 1.0))
    return "braking_mass_factor must be at least 1";
  for (const scenario_vehicle& sv : sc.vehicles) {
    if (std::string msg = validate_vehicle(sv.spec); !msg.empty())
      return "vehicle " + std::to_string(sv.spec.id) + ": " + msg;
    if (!(sv.driver.speed_mult > 0.5 && sv.driver.speed_mult < 1.5))
      return "driver speed_mult must lie in (0.5, 1.5)";
    if (!(sv.driver.accel_mult > 0.5 && sv.driver.accel_mult < 1.5))
      return "driver accel_mult must lie in (0.5, 1.5)";
    if (!(sv.driver.decel_mult > 0.5 && sv.driver.decel_mult < 1.5))
      return "driver decel_mult must lie in (0.5, 1.5)";
  }
  return {};
}

namespace {

struct gain_columns {
  double kp = 0.0, ki = 0.0, kd = 0.0;
};

gain_columns columns_for(const gain_set& g, control_law law) {
  switch (law) {
    case control_law::manual: return {0.0, 0.0, 0.0};
    case control_law::cruise: return {g.kp1, 0.0, 0.0};
    case control_law::acc: return {g.kp2, 0.0, g.kd1};
    case control_law::cacc: return {g.kp3, g.ki1, g.kd2};
  }
  return {};
}

double floor_speed(double v, double a, double dt) {
  return (v + a * dt < 0.0) ? -v / dt : a;
}

drive_phase classify_phase(double command) {
  if (command > 0.01) return drive_phase::accelerating;
  if (command < -0.01) return drive_phase::decelerating;
  return drive_phase::cruising;
}

// One vehicle's step-k record from the step-(k-1) records. Reads only prev.
vehicle_state advance_one(const std::vector<vehicle_state>& prev,
                          const scenario& sc, int k, int i) {
  const scenario_vehicle& sv = sc.vehicles[i];
  const double dt = sc.dt;
  const vehicle_state& me = prev[i];

  vehicle_state out;
  out.x = me.x + me.v * dt + me.a * dt * dt / 2.0;
  out.v = me.v + me.a * dt;
  if (out.v < 0.0) out.v = 0.0;  // absorb rounding from the exact-stop floor
  out.dyn = compute_dynamics(sv.spec, sc.env, out.v, me.gear);
  out.gear = out.dyn.gear;

  if (i == 0) {
    // Leader: proportional tracking of the interpolated schedule speed.
    const double t = std::clamp(k * dt, sc.sched.start_time(), sc.sched.end_time());
    const double target = speed_at(sc.sched, t);
    out.law = control_law::cruise;
    double a = clamp_accel(cruise_command(sc.gains.kp1, out.v, target),
                           out.dyn.max_accel_fps2, out.dyn.max_decel_fps2);
    out.a = floor_speed(out.v, a, dt);
    const gain_columns cols = columns_for(sc.gains, out.law);
    out.kp = cols.kp;
    out.ki = cols.ki;
    out.kd = cols.kd;
    return out;
  }

  // Follower: reconstruct the leader's step-k kinematics from its k-1 record.
  const scenario_vehicle& lead_cfg = sc.vehicles[i - 1];
  const vehicle_state& lead_prev = prev[i - 1];
  const double lead_x =
      lead_prev.x + lead_prev.v * dt + lead_prev.a * dt * dt / 2.0;
  double lead_v = lead_prev.v + lead_prev.a * dt;
  if (lead_v < 0.0) lead_v = 0.0;
  const dynamics_output lead_dyn =
      compute_dynamics(lead_cfg.spec, sc.env, lead_v, lead_prev.gear);

  const double gap = lead_x - out.x - lead_cfg.spec.length_ft;
  out.gap = gap;
  if (out.v > 0.0) out.time_gap = gap / out.v;

  const double tau_s = sc.tau_s_for(sv.mode);
  const double s_min = min_safe_gap(out.v, tau_s, sc.tau_c, out.dyn.actuation_lag_s,
                                    lead_v, lead_dyn.actuation_lag_s);
  const double t_min = min_safe_time_gap(tau_s, sc.tau_c, out.dyn.actuation_lag_s,
                                         lead_dyn.actuation_lag_s);
  out.s_min = s_min;
  out.t_min = t_min;

  if (gap <= 0.0) {
    // Collision: full braking, configured gains, event recorded by the caller.
    out.collided = true;
    out.law = sv.mode == vehicle_mode::manual ? control_law::manual
                                              : control_law::acc;
    out.a = floor_speed(out.v, -out.dyn.max_decel_fps2, dt);
    const gain_columns cols = columns_for(sc.gains, out.law);
    out.kp = cols.kp;
    out.ki = cols.ki;
    out.kd = cols.kd;
    return out;
  }

  if (sv.mode == vehicle_mode::manual) {
    out.law = control_law::manual;
    const double raw =
        iidm_accel(sv.driver, out.dyn.max_accel_fps2, out.dyn.max_decel_fps2, gap,
                   s_min, lead_v, sc.free_flow_speed, sc.alpha, sc.beta);
    const double a =
        clamp_accel(raw, out.dyn.max_accel_fps2, out.dyn.max_decel_fps2);
    out.a = floor_speed(out.v, a, dt);
    return out;  // manual records carry zero controller gains
  }

  // Automated follower: desired gap from last step's record, law selection,
  // phase classification at configured gains, per-step tuning, then the law.
  const double t_set = sc.t_set_for(sv.mode);
  const double sdes = desired_gap(t_set, me.t_min ? *me.t_min : tau_s + sc.tau_c,
                                  me.v);
  const bool discrepancy = gap_discrepancy(gap, gap);  // ranging and V2V agree
  out.law = select_control_mode(sv.mode, lead_cfg.mode, gap,
                                sc.detection_range_ft, discrepancy);

  auto command = [&](const gain_set& g) {
    switch (out.law) {
      case control_law::cruise:
        return cruise_command(g.kp1, out.v, sc.free_flow_speed);
      case control_law::acc:
        return gap_follow_command(g.kp2, g.kd1, gap, sdes, out.v, lead_v);
      case control_law::cacc:
        return coop_follow_command(g.kp3, g.ki1, g.kd2, gap, sdes, out.v, lead_v,
                                   lead_prev.a);
      default:
        return 0.0;
    }
  };

  const drive_phase phase = classify_phase(command(sc.gains));
  const gain_set tuned = tune_gains(sc.gains, out.law, t_min,
                                    out.dyn.actuation_lag_s, lead_v, s_min, phase);
  const double a = clamp_accel(command(tuned), out.dyn.max_accel_fps2,
                               out.dyn.max_decel_fps2);
  out.a = floor_speed(out.v, a, dt);
  const gain_columns cols = columns_for(tuned, out.law);
  out.kp = cols.kp;
  out.ki = cols.ki;
  out.kd = cols.kd;
  out.gain_flag = tuned.infeasible;
  return out;
}

}  // namespace

std::vector<vehicle_state> init_string(const scenario& sc) {
  if (std::string msg = validate_scenario(sc); !msg.empty())
    throw std::invalid_argument(msg);
  const int n = static_cast<int>(sc.vehicles.size());
  std::vector<vehicle_state> states(n);
  double x = 100.0 * (n - 1);  // leader anchor; 2-vehicle default: 100 and 0
  for (int i = 0; i < n; ++i) {
    const scenario_vehicle& sv = sc.vehicles[i];
    vehicle_state& st = states[i];
    if (i > 0) {
      const double lead_len = sc.vehicles[i - 1].spec.length_ft;
      x = sc.initial_gap ? x - *sc.initial_gap - lead_len : x - 100.0;
      const double gap = states[i - 1].x - x - lead_len;
      if (gap <= 0.0)
        throw std::invalid_argument(
            "initial placement overlaps at vehicle " + std::to_string(i + 1));
      st.gap = gap;
      const double tau_s = sc.tau_s_for(sv.mode);
      st.s_min = min_safe_gap(0.0, tau_s, sc.tau_c, 0.0, 0.0, 0.0);
      st.t_min = min_safe_time_gap(tau_s, sc.tau_c, 0.0, 0.0);
    }
    st.x = x;
    st.v = 0.0;
    st.a = 0.0;
    st.dyn = compute_dynamics(sv.spec, sc.env, 0.0, 1);
    st.gear = st.dyn.gear;
    st.law = i == 0 ? control_law::cruise
             : select_control_mode(sv.mode, sc.vehicles[i - 1].mode, *st.gap,
                                   sc.detection_range_ft, false);
    const gain_columns cols = columns_for(sc.gains, st.law);
    st.kp = cols.kp;
    st.ki = cols.ki;
    st.kd = cols.kd;
  }
  return states;
}

std::vector<vehicle_state> step_string(const std::vector<vehicle_state>& prev,
                                       const scenario& sc, int k) {
  if (k < 1) throw std::invalid_argument("step index must be at least 1");
  const int n = static_cast<int>(prev.size());
  std::vector<vehicle_state> next(n);
  const int threads = std::min(sc.threads, n);
  if (threads <= 1 || n < 4) {
    for (int i = 0; i < n; ++i) next[i] = advance_one(prev, sc, k, i);
    return next;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) next[i] = advance_one(prev, sc, k, i);
    });
  }
  for (std::thread& th : pool) th.join();
  return next;
}

sim_trace run(const scenario& sc) {
  sim_trace trace;
  trace.dt = sc.dt;
  trace.steps.push_back(init_string(sc));
  const long long nsteps = std::llround(sc.sched.duration() / sc.dt);
  for (long long k = 1; k <= nsteps; ++k) {
    std::vector<vehicle_state> next =
        step_string(trace.steps.back(), sc, static_cast<int>(k));
    bool new_collision = false;
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (next[i].collided && !trace.steps.back()[i].collided) {
        trace.collisions.push_back({static_cast<int>(k), static_cast<int>(i)});
        new_collision = true;
      }
    }
    trace.steps.push_back(std::move(next));
    if (new_collision && !sc.continue_on_collision) {
      trace.halted = true;
      break;
    }
  }
  return trace;
}

std::vector<vehicle_summary> summarize(const sim_trace& trace, const scenario& sc) {
  const std::size_t n = trace.steps.empty() ? 0 : trace.steps[0].size();
  std::vector<vehicle_summary> out(n);
  std::vector<double> sq_err(n, 0.0);
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const double t = static_cast<double>(k) * trace.dt;
    const auto& rec = trace.steps[k];
    for (std::size_t i = 0; i < n; ++i) {
      const vehicle_state& st = rec[i];
      vehicle_summary& s = out[i];
      if (st.v > 0.0 && std::abs(st.a) > 0.01)
        s.peak_a_max = std::max(s.peak_a_max, st.dyn.max_accel_fps2);
      if (st.v > 0.0) s.peak_d_max = std::max(s.peak_d_max, st.dyn.max_decel_fps2);
      if (st.time_gap && t >= sc.tgap_warmup_s && st.v >= sc.tgap_min_speed_fps)
        s.peak_t_gap = std::max(s.peak_t_gap, *st.time_gap);
      if (i == 0) {
        const double target = speed_at(
            sc.sched, std::clamp(t, sc.sched.start_time(), sc.sched.end_time()));
        sq_err[i] += (st.v - target) * (st.v - target);
      } else {
        const double dv = st.v - rec[0].v;
        sq_err[i] += dv * dv;
      }
    }
  }
  for (const collision_event& ev : trace.collisions) ++out[ev.vehicle].collision_count;
  const double steps = static_cast<double>(trace.steps.size());
  for (std::size_t i = 0; i < n; ++i)
    out[i].speed_rmse_vs_leader = std::sqrt(sq_err[i] / steps);
  return out;
}

std::string format_fixed(double value) {
  if (value == 0.0) value = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-')
    s.erase(0, 1);  // tiny negatives rounding to -0.000000
  return s;
}

namespace {

std::string opt_cell(const std::optional<double>& v) {
  return v ? format_fixed(*v) : std::string();
}

}  // namespace

void write_trace_csv(std::ostream& out, const sim_trace& trace, const scenario& sc) {
  out << "t,vehicle_id,mode,x_ft,v_fps,a_fps2,gear,amax_fps2,dmax_fps2,gap_ft,"
         "timegap_s,smin_ft,tmin_s,kp,ki,kd,flag\n";
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const double t = static_cast<double>(k) * trace.dt;
    for (std::size_t i = 0; i < trace.steps[k].size(); ++i) {
      const vehicle_state& st = trace.steps[k][i];
      out << format_fixed(t) << ',' << (i + 1) << ','
          << to_string(sc.vehicles[i].mode) << ',' << format_fixed(st.x) << ','
          << format_fixed(st.v) << ',' << format_fixed(st.a) << ',' << st.gear
          << ',' << format_fixed(st.dyn.max_accel_fps2) << ','
          << format_fixed(st.dyn.max_decel_fps2) << ',' << opt_cell(st.gap)
          << ',' << opt_cell(st.time_gap) << ',' << opt_cell(st.s_min) << ','
          << opt_cell(st.t_min) << ',' << format_fixed(st.kp) << ','
          << format_fixed(st.ki) << ',' << format_fixed(st.kd) << ','
          << (st.gain_flag ? 1 : 0) << '\n';
    }
  }
}

void write_summary_json(std::ostream& out, const sim_trace& trace,
                        const scenario& sc) {
  const std::vector<vehicle_summary> sums = summarize(trace, sc);
  out << "{\n";
  for (std::size_t i = 0; i < sums.size(); ++i) {
    const vehicle_summary& s = sums[i];
    out << "  \"" << (i + 1) << "\": {"
        << "\"catalog_id\": " << sc.vehicles[i].spec.id << ", "
        << "\"name\": \"" << sc.vehicles[i].spec.name << "\", "
        << "\"mode\": \"" << to_string(sc.vehicles[i].mode) << "\", "
        << "\"driver_id\": " << sc.vehicles[i].driver.id << ", "
        << "\"peak_a_max\": " << format_fixed(s.peak_a_max) << ", "
        << "\"peak_d_max\": " << format_fixed(s.peak_d_max) << ", "
        << "\"peak_t_gap\": " << format_fixed(s.peak_t_gap) << ", "
        << "\"collision_count\": " << s.collision_count << ", "
        << "\"speed_rmse_vs_leader\": " << format_fixed(s.speed_rmse_vs_leader)
        << "}" << (i + 1 < sums.size() ? "," : "") << "\n";
  }
  out << "}\n";
}

void write_plot_csv(std::ostream& out, const sim_trace& trace, const scenario& sc) {
  (void)sc;
  out << "t,vehicle_id,v_fps,amax_fps2,dmax_fps2,timegap_s\n";
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const double t = static_cast<double>(k) * trace.dt;
    for (std::size_t i = 0; i < trace.steps[k].size(); ++i) {
      const vehicle_state& st = trace.steps[k][i];
      out << format_fixed(t) << ',' << (i + 1) << ',' << format_fixed(st.v)
          << ',' << format_fixed(st.dyn.max_accel_fps2) << ','
          << format_fixed(st.dyn.max_decel_fps2) << ',' << opt_cell(st.time_gap)
          << '\n';
    }
  }
}

}  // namespace longsim
