#include "longsim/fleet_catalog.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace longsim {

double torque_at(const engine_spec& engine, double rpm) {
  const auto& map = engine.torque_map;
  if (map.empty()) throw std::invalid_argument("torque_map must not be empty");
  if (rpm <= map.front().rpm) return map.front().torque_lbft;
  if (rpm >= map.back().rpm) return map.back().torque_lbft;
  for (std::size_t i = 1; i < map.size(); ++i) {
    if (rpm <= map[i].rpm) {
      const torque_knot& a = map[i - 1];
      const torque_knot& b = map[i];
      return a.torque_lbft +
             (b.torque_lbft - a.torque_lbft) * (rpm - a.rpm) / (b.rpm - a.rpm);
    }
  }
  return map.back().torque_lbft;
}

double peak_knot_horsepower(const engine_spec& engine) {
  double peak = 0.0;
  for (const torque_knot& k : engine.torque_map) {
    // rpm -> rev/s; power = 2*pi*M*n, reported in horsepower.
    const double hp = 2.0 * M_PI * k.torque_lbft * k.rpm / 33000.0;
    peak = std::max(peak, hp);
  }
  return peak;
}

std::string to_string(drivetrain_type t) {
  switch (t) {
    case drivetrain_type::front_wheel: return "FWD";
    case drivetrain_type::rear_wheel: return "RWD";
    case drivetrain_type::all_wheel: return "AWD";
  }
  return "FWD";
}

std::string to_string(fleet_class f) {
  switch (f) {
    case fleet_class::small_auto: return "small-auto";
    case fleet_class::large_auto: return "large-auto";
    case fleet_class::small_truck: return "small-truck";
    case fleet_class::large_truck: return "large-truck";
  }
  return "small-auto";
}

std::optional<drivetrain_type> drivetrain_from_string(const std::string& s) {
  if (s == "FWD") return drivetrain_type::front_wheel;
  if (s == "RWD") return drivetrain_type::rear_wheel;
  if (s == "AWD") return drivetrain_type::all_wheel;
  return std::nullopt;
}

std::optional<fleet_class> fleet_class_from_string(const std::string& s) {
  if (s == "small-auto") return fleet_class::small_auto;
  if (s == "large-auto") return fleet_class::large_auto;
  if (s == "small-truck") return fleet_class::small_truck;
  if (s == "large-truck") return fleet_class::large_truck;
  return std::nullopt;
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string validate_vehicle(const vehicle_spec& v) {
  if (v.id < 1) return "id must be positive";
  if (v.name.empty()) return "name must not be empty";
  if (v.fhwa_class < 1) return "fhwa_class must be positive";
  if (!(v.length_ft > 0.0)) return "length_ft must be positive";
  if (!(v.width_ft > 0.0)) return "width_ft must be positive";
  if (!(v.height_ft > 0.0)) return "height_ft must be positive";
  if (!(v.weight_lb > 0.0)) return "weight_lb must be positive";
  if (!(v.wheel_radius_ft > 0.0)) return "wheel_radius_ft must be positive";
  if (!(v.drag_coeff > 0.0 && v.drag_coeff < 2.0)) return "drag_coeff must lie in (0, 2)";
  if (!(v.wheelbase_ratio > 0.0 && v.wheelbase_ratio <= 1.0))
    return "wheelbase_ratio must lie in (0, 1]";
  if (!(v.rear_axle_ratio > 0.0 && v.rear_axle_ratio < 1.0))
    return "rear_axle_ratio must lie in (0, 1)";
  if (!(v.cg_height_ft() > 0.0 && v.cg_height_ft() < v.height_ft))
    return "cg_height_ratio must place the cg inside the body height";

  const transmission_spec& t = v.transmission;
  if (!(t.slippage >= 0.0 && t.slippage < 1.0)) return "slippage must lie in [0, 1)";
  if (!(t.efficiency > 0.0 && t.efficiency <= 1.0)) return "efficiency must lie in (0, 1]";
  if (!(t.diff_ratio > 0.0)) return "diff_ratio must be positive";
  if (t.gears.empty()) return "gears must not be empty";
  for (std::size_t i = 0; i < t.gears.size(); ++i) {
    const gear_spec& g = t.gears[i];
    if (!(g.ratio > 0.0)) return "gears: ratio must be positive";
    if (!(g.down_mph < g.up_mph)) return "gears: down_mph must be below up_mph";
    if (i > 0 && !(g.ratio < t.gears[i - 1].ratio))
      return "gears: ratios must strictly decrease";
  }

  const engine_spec& e = v.engine;
  if (e.torque_map.size() < 2) return "torque_map must have at least two knots";
  if (!(e.idle_rpm > 0.0)) return "idle_rpm must be positive";
  if (!(e.max_rpm > e.idle_rpm)) return "max_rpm must exceed idle_rpm";
  if (e.torque_map.front().rpm != e.idle_rpm || e.torque_map.back().rpm != e.max_rpm)
    return "torque_map knots must span [idle_rpm, max_rpm]";
  for (std::size_t i = 0; i < e.torque_map.size(); ++i) {
    if (!(e.torque_map[i].torque_lbft > 0.0)) return "torque_map: torque must be positive";
    if (i > 0 && !(e.torque_map[i].rpm > e.torque_map[i - 1].rpm))
      return "torque_map: rpm must strictly increase";
  }
  return {};
}

namespace {

const char kCatalogHeader[] =
    "id,name,fleet_type,fhwa_class,length_ft,width_ft,height_ft,weight_lb,"
    "wheel_radius_ft,drag_coeff,drivetrain,slippage,efficiency,diff_ratio,gears";
const char kTorqueHeader[] = "engine_id,rpm,torque_lbft";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

bool parse_number(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

bool parse_int(const std::string& s, int& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

}  // namespace

std::string serialize_catalog(const std::vector<vehicle_spec>& fleet) {
  std::ostringstream out;
  out << kCatalogHeader << '\n';
  for (const vehicle_spec& v : fleet) {
    out << v.id << ',' << v.name << ',' << to_string(v.fleet) << ','
        << v.fhwa_class << ',' << format_double(v.length_ft) << ','
        << format_double(v.width_ft) << ',' << format_double(v.height_ft) << ','
        << format_double(v.weight_lb) << ',' << format_double(v.wheel_radius_ft)
        << ',' << format_double(v.drag_coeff) << ',' << to_string(v.drivetrain)
        << ',' << format_double(v.transmission.slippage) << ','
        << format_double(v.transmission.efficiency) << ','
        << format_double(v.transmission.diff_ratio) << ',';
    for (std::size_t i = 0; i < v.transmission.gears.size(); ++i) {
      const gear_spec& g = v.transmission.gears[i];
      if (i) out << ';';
      out << format_double(g.ratio) << '/' << format_double(g.up_mph) << '/'
          << format_double(g.down_mph);
    }
    out << '\n';
  }
  return out.str();
}

std::string serialize_torque_maps(const std::vector<vehicle_spec>& fleet) {
  std::ostringstream out;
  out << kTorqueHeader << '\n';
  for (const vehicle_spec& v : fleet) {
    // The sidecar joins to catalog rows on the vehicle id, so emit one map
    // per vehicle under that key even when engines are shared.
    for (const torque_knot& k : v.engine.torque_map) {
      out << v.id << ',' << format_double(k.rpm) << ','
          << format_double(k.torque_lbft) << '\n';
    }
  }
  return out.str();
}

catalog_parse_result parse_catalog(const std::string& catalog_csv,
                                   const std::string& torque_csv) {
  catalog_parse_result result;
  auto fail = [&result](int row, std::string msg) {
    result.errors.push_back({row, std::move(msg)});
  };

  // Sidecar first: engine_id -> knots in file order. Empty inputs are legal
  // and parse to an empty catalog.
  std::map<int, std::vector<torque_knot>> maps;
  {
    std::vector<std::string> lines = split_lines(torque_csv);
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (!lines.empty() && lines[0] != kTorqueHeader) {
      fail(1, std::string("torque sidecar: expected header '") + kTorqueHeader + "'");
      return result;
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const int row = static_cast<int>(i) + 1;
      std::vector<std::string> f = split(lines[i], ',');
      if (f.size() != 3) {
        fail(row, "torque sidecar: expected 3 fields, got " + std::to_string(f.size()));
        continue;
      }
      int engine_id = 0;
      torque_knot knot;
      if (!parse_int(f[0], engine_id)) {
        fail(row, "torque sidecar: invalid engine_id '" + f[0] + "'");
        continue;
      }
      if (!parse_number(f[1], knot.rpm)) {
        fail(row, "torque sidecar: invalid rpm '" + f[1] + "'");
        continue;
      }
      if (!parse_number(f[2], knot.torque_lbft)) {
        fail(row, "torque sidecar: invalid torque_lbft '" + f[2] + "'");
        continue;
      }
      maps[engine_id].push_back(knot);
    }
  }

  std::vector<std::string> lines = split_lines(catalog_csv);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) return result;
  if (lines[0] != kCatalogHeader) {
    fail(1, std::string("catalog: expected header '") + kCatalogHeader + "'");
    return result;
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const int row = static_cast<int>(i) + 1;
    std::vector<std::string> f = split(lines[i], ',');
    if (f.size() != 15) {
      fail(row, "expected 15 fields, got " + std::to_string(f.size()));
      continue;
    }
    vehicle_spec v;
    bool ok = true;
    auto num = [&](const std::string& cell, const char* field, double& out) {
      if (!parse_number(cell, out)) {
        fail(row, std::string("invalid number in field '") + field + "': '" + cell + "'");
        ok = false;
      }
    };
    if (!parse_int(f[0], v.id)) {
      fail(row, "invalid number in field 'id': '" + f[0] + "'");
      ok = false;
    }
    v.name = f[1];
    if (auto fc = fleet_class_from_string(f[2])) {
      v.fleet = *fc;
    } else {
      fail(row, "unknown fleet_type '" + f[2] + "'");
      ok = false;
    }
    if (!parse_int(f[3], v.fhwa_class)) {
      fail(row, "invalid number in field 'fhwa_class': '" + f[3] + "'");
      ok = false;
    }
    num(f[4], "length_ft", v.length_ft);
    num(f[5], "width_ft", v.width_ft);
    num(f[6], "height_ft", v.height_ft);
    num(f[7], "weight_lb", v.weight_lb);
    num(f[8], "wheel_radius_ft", v.wheel_radius_ft);
    num(f[9], "drag_coeff", v.drag_coeff);
    if (auto dt = drivetrain_from_string(f[10])) {
      v.drivetrain = *dt;
    } else {
      fail(row, "unknown drivetrain '" + f[10] + "'");
      ok = false;
    }
    num(f[11], "slippage", v.transmission.slippage);
    num(f[12], "efficiency", v.transmission.efficiency);
    num(f[13], "diff_ratio", v.transmission.diff_ratio);
    if (!f[14].empty()) {
      for (const std::string& cell : split(f[14], ';')) {
        std::vector<std::string> parts = split(cell, '/');
        if (parts.size() != 3) {
          fail(row, "gears: expected ratio/up_mph/down_mph, got '" + cell + "'");
          ok = false;
          break;
        }
        gear_spec g;
        num(parts[0], "gears.ratio", g.ratio);
        num(parts[1], "gears.up_mph", g.up_mph);
        num(parts[2], "gears.down_mph", g.down_mph);
        v.transmission.gears.push_back(g);
      }
    }
    if (!ok) continue;

    // Parsed specs carry the default geometry ratios (the CSV does not store
    // them). On very long vehicles the default cg height would land above the
    // body; cap it at mid-body so the spec stays physical.
    const double wheelbase = v.wheelbase_ratio * v.length_ft;
    if (wheelbase > 0.0 && v.height_ft > 0.0 &&
        v.cg_height_ratio * wheelbase >= v.height_ft) {
      v.cg_height_ratio = 0.5 * v.height_ft / wheelbase;
    }

    auto it = maps.find(v.id);
    if (it == maps.end() || it->second.empty()) {
      fail(row, "no torque map for engine_id " + std::to_string(v.id));
      continue;
    }
    v.engine.engine_id = v.id;
    v.engine.torque_map = it->second;
    v.engine.idle_rpm = it->second.front().rpm;
    v.engine.max_rpm = it->second.back().rpm;

    if (std::string msg = validate_vehicle(v); !msg.empty()) {
      fail(row, msg);
      continue;
    }
    result.vehicles.push_back(std::move(v));
  }
  return result;
}

}  // namespace longsim
