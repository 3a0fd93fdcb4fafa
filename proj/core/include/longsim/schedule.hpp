#pragma once

#include <string>
#include <vector>

namespace longsim {

struct schedule_sample {
  double t = 0.0;      // s
  double speed = 0.0;  // ft/s
};

// A drive schedule: target speed vs time, piecewise linear between samples.
struct schedule {
  std::string name;
  std::vector<schedule_sample> samples;  // strictly increasing t

  double start_time() const { return samples.front().t; }
  double end_time() const { return samples.back().t; }
  double duration() const { return end_time() - start_time(); }
};

enum class speed_units { fps, mph };

// Parses `time_s,speed` CSV text. mph input is converted to ft/s on load.
// Throws std::runtime_error with a line number on malformed rows,
// non-increasing time, or negative speed.
schedule parse_schedule_csv(const std::string& text, speed_units units,
                            std::string name);

// Emits `time_s,speed` CSV text; speeds converted when units is mph.
std::string serialize_schedule_csv(const schedule& s, speed_units units);

// Reads and parses a schedule file; errors name the path.
schedule load_schedule(const std::string& path, speed_units units);

// Linear interpolation at t; throws std::domain_error outside the time range.
double speed_at(const schedule& s, double t);

struct schedule_stats {
  double duration_s = 0.0;
  double distance_mi = 0.0;
  double avg_speed_fps = 0.0;
  double max_speed_fps = 0.0;
  double max_accel_fps2 = 0.0;  // largest sample-to-sample rise rate
  double max_decel_fps2 = 0.0;  // largest sample-to-sample fall rate (magnitude)
};

schedule_stats compute_stats(const schedule& s);

}  // namespace longsim
