#include "longsim/control_design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace longsim {

step_metrics loop_metrics(const loop_params& p) {
  if (!(p.kp > 0.0)) throw std::invalid_argument("kp must be positive");
  if (!(p.lag > 0.0)) throw std::invalid_argument("lag must be positive");
  step_metrics m;
  m.omega_n = std::sqrt(p.kp / p.lag);
  m.xi = (p.kd + 1.0) / (2.0 * std::sqrt(p.kp * p.lag));
  m.rise_time = M_PI / (2.0 * m.omega_n);
  m.settling_time = 4.0 / (m.xi * m.omega_n);
  if (m.xi < 1.0) {
    const double root = std::sqrt(1.0 - m.xi * m.xi);
    m.overshoot = std::exp(-M_PI * m.xi / root);
    m.peak_time = M_PI / (m.omega_n * root);
  }
  return m;
}

std::optional<double> overshoot_distance(const loop_params& p, double v_i) {
  const step_metrics m = loop_metrics(p);
  if (!m.overshoot) return std::nullopt;
  return (*m.peak_time - m.rise_time) * (*m.overshoot - v_i);
}

namespace {

// RK4 over a two-state linear system [y, y'] with constant unit input.
template <typename Deriv>
std::vector<double> integrate(Deriv deriv, double output_c1, double output_c2,
                              double dt, double horizon) {
  const int n = static_cast<int>(std::round(horizon / dt));
  std::vector<double> trace;
  trace.reserve(n + 1);
  double x1 = 0.0, x2 = 0.0;
  trace.push_back(output_c1 * x1 + output_c2 * x2);
  for (int k = 0; k < n; ++k) {
    const auto [a1, a2] = deriv(x1, x2);
    const auto [b1, b2] = deriv(x1 + 0.5 * dt * a1, x2 + 0.5 * dt * a2);
    const auto [c1, c2] = deriv(x1 + 0.5 * dt * b1, x2 + 0.5 * dt * b2);
    const auto [d1, d2] = deriv(x1 + dt * c1, x2 + dt * c2);
    x1 += dt * (a1 + 2.0 * b1 + 2.0 * c1 + d1) / 6.0;
    x2 += dt * (a2 + 2.0 * b2 + 2.0 * c2 + d2) / 6.0;
    trace.push_back(output_c1 * x1 + output_c2 * x2);
  }
  return trace;
}

void check_oracle_dt(double omega_n, double dt) {
  if (!(dt > 0.0) || dt > 0.01 * (2.0 * M_PI / omega_n))
    throw std::invalid_argument("dt too coarse for the step-response oracle");
}

}  // namespace

std::vector<double> simulate_step_response(double omega_n, double xi, double dt,
                                           double horizon) {
  if (!(omega_n > 0.0)) throw std::invalid_argument("omega_n must be positive");
  check_oracle_dt(omega_n, dt);
  auto deriv = [omega_n, xi](double y, double yd) {
    return std::pair{yd, omega_n * omega_n * (1.0 - y) - 2.0 * xi * omega_n * yd};
  };
  return integrate(deriv, 1.0, 0.0, dt, horizon);
}

std::vector<double> simulate_full_loop_step(const loop_params& p, double dt,
                                            double horizon) {
  if (!(p.kp > 0.0)) throw std::invalid_argument("kp must be positive");
  if (!(p.lag > 0.0)) throw std::invalid_argument("lag must be positive");
  check_oracle_dt(std::sqrt(p.kp / p.lag), dt);
  const double kp = p.kp, kd = p.kd, lag = p.lag;
  auto deriv = [kp, kd, lag](double x1, double x2) {
    return std::pair{x2, (1.0 - (kd + 1.0) * x2 - kp * x1) / lag};
  };
  return integrate(deriv, kp, kd, dt, horizon);
}

step_measurements measure_step_metrics(const std::vector<double>& trace,
                                       double dt, double final_value) {
  if (trace.size() < 3) throw std::invalid_argument("trace too short");
  if (!(final_value > 0.0)) throw std::invalid_argument("final value must be positive");
  step_measurements out;

  // Linear interpolation of the first upward crossing of a level.
  auto first_crossing = [&](double level) {
    for (std::size_t i = 1; i < trace.size(); ++i) {
      if (trace[i - 1] < level && trace[i] >= level) {
        const double frac = (level - trace[i - 1]) / (trace[i] - trace[i - 1]);
        return (static_cast<double>(i - 1) + frac) * dt;
      }
    }
    throw std::runtime_error("horizon too short to settle");
  };
  out.rise_time = first_crossing(0.9 * final_value) - first_crossing(0.1 * final_value);

  // Peak: parabolic refinement around the max sample.
  std::size_t pk = 0;
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] > trace[pk]) pk = i;
  double peak_value = trace[pk];
  double peak_t = pk * dt;
  if (pk > 0 && pk + 1 < trace.size()) {
    const double a = trace[pk - 1], b = trace[pk], c = trace[pk + 1];
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) {
      const double shift = 0.5 * (a - c) / denom;
      peak_t = (static_cast<double>(pk) + shift) * dt;
      peak_value = b - 0.25 * (a - c) * shift;
    }
  }
  out.peak_time = peak_t;
  out.overshoot = std::max(0.0, (peak_value - final_value) / final_value);

  // Settling: entry into the +/-10% band after the last excursion.
  const double lo = 0.9 * final_value, hi = 1.1 * final_value;
  auto inside = [&](double y) { return y >= lo && y <= hi; };
  if (!inside(trace.back())) throw std::runtime_error("horizon too short to settle");
  std::size_t last_out = 0;
  bool any_out = false;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!inside(trace[i])) {
      last_out = i;
      any_out = true;
    }
  }
  if (!any_out) {
    out.settling_time = 0.0;
  } else {
    const double prev = trace[last_out];
    const double next = trace[last_out + 1];
    const double level = prev < lo ? lo : hi;
    const double frac = (level - prev) / (next - prev);
    out.settling_time = (static_cast<double>(last_out) + frac) * dt;
  }
  return out;
}

double kd_bound_decel(double t_min, double lag) {
  if (!(lag > 0.0)) throw std::invalid_argument("lag must be positive");
  return t_min / (8.0 * lag) - 1.0;
}

bool accel_constraint_ok(double kp, double kd, double lag, double v_i,
                         double s_min) {
  const double mag = std::abs(kp);
  if (!(mag > 1e-12) || !(lag > 1e-9)) return true;
  const auto so = overshoot_distance({mag, kd, lag}, v_i);
  if (!so) return true;  // overdamped: no overshoot transient
  return *so < s_min;
}

tuned_pair tune_gain_pair(double kp, double kd, double t_min, double lag,
                          double v_i, double s_min, drive_phase phase) {
  tuned_pair out{kp, kd, false};
  if (phase == drive_phase::cruising || lag <= 1e-6) return out;
  if (phase == drive_phase::decelerating) {
    const double bound = kd_bound_decel(t_min, lag);
    out.kd = std::max(kMinKd, std::min(kd, 0.9 * bound));
    out.floored = bound <= 0.0;
    return out;
  }
  // Accelerating: multiplicative back-off until the overshoot transient fits.
  double mag = std::abs(kp);
  double cur_kd = kd;
  bool ok = accel_constraint_ok(mag, cur_kd, lag, v_i, s_min);
  for (int iter = 0; iter < 10 && !ok; ++iter) {
    const double next_mag = std::max(kMinKp, mag * 0.8);
    const double next_kd = std::max(kMinKd, cur_kd * 0.8);
    if (next_mag == mag && next_kd == cur_kd) break;
    mag = next_mag;
    cur_kd = next_kd;
    ok = accel_constraint_ok(mag, cur_kd, lag, v_i, s_min);
  }
  out.kp = std::copysign(mag, kp == 0.0 ? 1.0 : kp);
  out.kd = cur_kd;
  out.floored = !ok;
  return out;
}

gain_set tune_gains(const gain_set& current, control_law law, double t_min,
                    double lag, double v_i, double s_min, drive_phase phase) {
  gain_set out = current;
  out.infeasible = false;
  switch (law) {
    case control_law::manual:
      return out;
    case control_law::cruise: {
      // The cruise law has no derivative term; the deceleration bound on kd
      // does not apply to it.
      if (phase == drive_phase::decelerating) return out;
      const tuned_pair t =
          tune_gain_pair(current.kp1, 0.0, t_min, lag, v_i, s_min, phase);
      out.kp1 = t.kp;
      out.infeasible = t.floored;
      return out;
    }
    case control_law::acc: {
      const tuned_pair t =
          tune_gain_pair(current.kp2, current.kd1, t_min, lag, v_i, s_min, phase);
      out.kp2 = t.kp;
      out.kd1 = t.kd;
      out.infeasible = t.floored;
      return out;
    }
    case control_law::cacc: {
      const tuned_pair t =
          tune_gain_pair(current.kp3, current.kd2, t_min, lag, v_i, s_min, phase);
      out.kp3 = t.kp;
      out.kd2 = t.kd;
      out.infeasible = t.floored;
      return out;
    }
  }
  return out;
}

}  // namespace longsim
