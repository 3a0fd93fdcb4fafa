#include "longsim/schedule.hpp"

#include "longsim/fleet_catalog.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "longsim/units.hpp"

namespace longsim {

namespace {

bool parse_number(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

}  // namespace

schedule parse_schedule_csv(const std::string& text, speed_units units,
                            std::string name) {
  schedule s;
  s.name = std::move(name);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      // The header row is optional; a first line that is not numeric data
      // must be the expected header.
      double probe = 0.0;
      const auto c = line.find(',');
      const bool is_data =
          c != std::string::npos && parse_number(line.substr(0, c), probe);
      if (!is_data) {
        if (line != "time_s,speed")
          throw std::runtime_error("line 1: expected header 'time_s,speed'");
        continue;
      }
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 'time,speed'");
    double t = 0.0, v = 0.0;
    if (!parse_number(line.substr(0, comma), t))
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": invalid time value");
    if (!parse_number(line.substr(comma + 1), v))
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": invalid speed value");
    if (v < 0.0)
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": speed must be non-negative");
    if (!s.samples.empty() && !(t > s.samples.back().t))
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": time must strictly increase");
    if (units == speed_units::mph) v *= kMphToFps;
    s.samples.push_back({t, v});
  }
  if (s.samples.empty()) throw std::runtime_error("schedule has no samples");
  return s;
}

std::string serialize_schedule_csv(const schedule& s, speed_units units) {
  std::string out = "time_s,speed\n";
  for (const schedule_sample& sample : s.samples) {
    const double v =
        units == speed_units::mph ? sample.speed * kFpsToMph : sample.speed;
    out += format_double(sample.t);
    out += ',';
    out += format_double(v);
    out += '\n';
  }
  return out;
}

schedule load_schedule(const std::string& path, speed_units units) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open schedule file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string name = path;
  if (const auto slash = name.find_last_of("/\\"); slash != std::string::npos)
    name = name.substr(slash + 1);
  if (const auto dot = name.find_last_of('.'); dot != std::string::npos)
    name = name.substr(0, dot);
  try {
    return parse_schedule_csv(buf.str(), units, name);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

double speed_at(const schedule& s, double t) {
  if (t < s.start_time() || t > s.end_time())
    throw std::domain_error("time outside schedule range");
  const auto it = std::lower_bound(
      s.samples.begin(), s.samples.end(), t,
      [](const schedule_sample& a, double value) { return a.t < value; });
  if (it == s.samples.begin()) return it->speed;
  if (it == s.samples.end()) return s.samples.back().speed;
  const schedule_sample& hi = *it;
  const schedule_sample& lo = *(it - 1);
  if (hi.t == t) return hi.speed;
  return lo.speed + (hi.speed - lo.speed) * (t - lo.t) / (hi.t - lo.t);
}

schedule_stats compute_stats(const schedule& s) {
  schedule_stats out;
  out.duration_s = s.duration();
  double distance_ft = 0.0;
  out.max_speed_fps = s.samples.front().speed;
  for (std::size_t i = 1; i < s.samples.size(); ++i) {
    const schedule_sample& a = s.samples[i - 1];
    const schedule_sample& b = s.samples[i];
    const double dt = b.t - a.t;
    distance_ft += (a.speed + b.speed) / 2.0 * dt;
    const double rate = (b.speed - a.speed) / dt;
    out.max_accel_fps2 = std::max(out.max_accel_fps2, rate);
    out.max_decel_fps2 = std::max(out.max_decel_fps2, -rate);
    out.max_speed_fps = std::max(out.max_speed_fps, b.speed);
  }
  out.distance_mi = distance_ft / kFeetPerMile;
  out.avg_speed_fps = out.duration_s > 0.0 ? distance_ft / out.duration_s : 0.0;
  return out;
}

}  // namespace longsim
