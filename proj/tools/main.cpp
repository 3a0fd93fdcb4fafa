// Command-line front end: scenario runner, fleet catalog browser, and
// drive-schedule statistics.
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "longsim/fleet_catalog.hpp"
#include "longsim/schedule.hpp"
#include "longsim/sim_engine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCollision = 2;

[[noreturn]] void fail(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  std::exit(kExitError);
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::runtime_error("unknown key \"" + it.key() + "\" in " + where);
    }
  }
}

double number_at(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw std::runtime_error("key \"" + key + "\" must be a number");
  }
  return v.get<double>();
}

int integer_at(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw std::runtime_error("key \"" + key + "\" must be an integer");
  }
  return v.get<int>();
}

std::string string_at(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_string()) {
    throw std::runtime_error("key \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

// Loads a custom fleet catalog: `path` names the vehicle CSV and the torque
// maps live in a sidecar file with the ".csv" suffix replaced by
// ".torque.csv".
std::vector<longsim::vehicle_spec> load_custom_fleet(const fs::path& path) {
  auto read_file = [](const fs::path& p) {
    std::ifstream in(p);
    if (!in) {
      throw std::runtime_error("cannot open fleet file: " + p.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  fs::path torque_path = path;
  if (torque_path.extension() == ".csv") {
    torque_path.replace_extension(".torque.csv");
  } else {
    torque_path += ".torque.csv";
  }
  longsim::catalog_parse_result parsed =
      longsim::parse_catalog(read_file(path), read_file(torque_path));
  if (!parsed.ok()) {
    std::string message = "fleet file " + path.string() + " has errors:";
    for (const auto& err : parsed.errors) {
      message += "\n  row " + std::to_string(err.row) + ": " + err.message;
    }
    throw std::runtime_error(message);
  }
  return parsed.vehicles;
}

// Returns the active fleet: a custom catalog if requested (config key or
// LONGSIM_FLEET_PATH), otherwise the built-in one.
std::vector<longsim::vehicle_spec> active_fleet(
    const std::optional<fs::path>& config_catalog) {
  if (config_catalog) {
    return load_custom_fleet(*config_catalog);
  }
  if (const char* env = std::getenv("LONGSIM_FLEET_PATH"); env && *env) {
    return load_custom_fleet(fs::path(env));
  }
  return longsim::builtin_fleet();
}

const longsim::vehicle_spec& fleet_lookup(
    const std::vector<longsim::vehicle_spec>& fleet, int id) {
  for (const auto& v : fleet) {
    if (v.id == id) {
      return v;
    }
  }
  throw std::runtime_error("no vehicle with id " + std::to_string(id) +
                           " in the active fleet");
}

json defaults_json() {
  longsim::scenario sc;
  json j;
  j["dt"] = sc.dt;
  j["initial_spacing_ft"] = 100.0;
  j["tau_c"] = sc.tau_c;
  j["modes"] = {
      {"manual", {{"tau_s", longsim::default_tau_s(longsim::vehicle_mode::manual)}}},
      {"autonomous",
       {{"tau_s", longsim::default_tau_s(longsim::vehicle_mode::autonomous)},
        {"t_set", *longsim::default_t_set(longsim::vehicle_mode::autonomous)}}},
      {"cooperative",
       {{"tau_s", longsim::default_tau_s(longsim::vehicle_mode::cooperative)},
        {"t_set", *longsim::default_t_set(longsim::vehicle_mode::cooperative)}}}};
  j["gains"] = {{"kp1", sc.gains.kp1}, {"kp2", sc.gains.kp2},
                {"kp3", sc.gains.kp3}, {"ki1", sc.gains.ki1},
                {"kd1", sc.gains.kd1}, {"kd2", sc.gains.kd2}};
  j["environment"] = {{"air_density", sc.env.air_density},
                      {"grade", sc.env.grade},
                      {"adhesion", sc.env.adhesion},
                      {"braking_efficiency", sc.env.braking_efficiency},
                      {"braking_mass_factor", sc.env.braking_mass_factor}};
  j["free_flow_speed"] = sc.free_flow_speed;
  j["alpha"] = sc.alpha;
  j["beta"] = sc.beta;
  j["detection_range_ft"] = sc.detection_range_ft;
  j["tgap_warmup_s"] = sc.tgap_warmup_s;
  j["tgap_min_speed_fps"] = sc.tgap_min_speed_fps;
  j["driver"] = 5;
  return j;
}

struct run_options {
  std::string config_path;
  std::string out_dir_flag;
  bool continue_on_collision = false;
  int threads_flag = 0;
};

int do_run(const run_options& opts) {
  const fs::path config_path(opts.config_path);
  std::ifstream in(config_path);
  if (!in) {
    fail("cannot open config file: " + config_path.string());
  }
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(config_path.string() + ": " + e.what());
  }
  if (!cfg.is_object()) {
    fail(config_path.string() + ": top-level value must be an object");
  }

  const fs::path config_dir = config_path.has_parent_path()
                                  ? config_path.parent_path()
                                  : fs::path(".");
  auto resolve = [&](const std::string& p) {
    fs::path candidate(p);
    return candidate.is_absolute() ? candidate : config_dir / candidate;
  };

  longsim::scenario sc;
  std::string out_dir = ".";
  try {
    reject_unknown_keys(
        cfg, "config",
        {"schedule", "vehicles", "catalog", "dt", "initial_gap", "t_set",
         "tau_s", "tau_c", "gains", "environment", "free_flow_speed", "alpha",
         "beta", "detection_range_ft", "tgap_warmup_s", "tgap_min_speed_fps",
         "seed", "continue_on_collision", "threads", "out_dir"});

    if (!cfg.contains("schedule")) {
      throw std::runtime_error("config requires a \"schedule\" object");
    }
    const json& sched = cfg.at("schedule");
    if (!sched.is_object()) {
      throw std::runtime_error("\"schedule\" must be an object");
    }
    reject_unknown_keys(sched, "schedule", {"path", "units"});
    if (!sched.contains("path")) {
      throw std::runtime_error("schedule requires a \"path\" key");
    }
    longsim::speed_units units = longsim::speed_units::fps;
    if (sched.contains("units")) {
      const std::string u = string_at(sched, "units");
      if (u == "mph") {
        units = longsim::speed_units::mph;
      } else if (u == "fps") {
        units = longsim::speed_units::fps;
      } else {
        throw std::runtime_error("schedule units must be \"mph\" or \"fps\"");
      }
    }
    sc.sched = longsim::load_schedule(
        resolve(string_at(sched, "path")).string(), units);

    std::optional<fs::path> catalog_path;
    if (cfg.contains("catalog")) {
      catalog_path = resolve(string_at(cfg, "catalog"));
    }
    const std::vector<longsim::vehicle_spec> fleet = active_fleet(catalog_path);

    if (!cfg.contains("vehicles")) {
      throw std::runtime_error("config requires a \"vehicles\" array");
    }
    const json& vehicles = cfg.at("vehicles");
    if (!vehicles.is_array() || vehicles.empty()) {
      throw std::runtime_error("\"vehicles\" must be a non-empty array");
    }
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
      const json& entry = vehicles[i];
      const std::string where = "vehicles[" + std::to_string(i) + "]";
      if (!entry.is_object()) {
        throw std::runtime_error(where + " must be an object");
      }
      reject_unknown_keys(entry, where, {"id", "driver", "mode", "catalog"});
      if (!entry.contains("id")) {
        throw std::runtime_error(where + " requires an \"id\" key");
      }
      longsim::scenario_vehicle sv;
      if (entry.contains("catalog")) {
        // Per-vehicle catalog override: look the id up in that file instead
        // of the active fleet.
        const auto own = load_custom_fleet(resolve(string_at(entry, "catalog")));
        sv.spec = fleet_lookup(own, integer_at(entry, "id"));
      } else {
        sv.spec = fleet_lookup(fleet, integer_at(entry, "id"));
      }
      const int driver_id = entry.contains("driver") ? integer_at(entry, "driver") : 5;
      try {
        sv.driver = longsim::builtin_driver(driver_id);
      } catch (const std::out_of_range&) {
        throw std::runtime_error("no driver type " + std::to_string(driver_id));
      }
      if (entry.contains("mode")) {
        const std::string mode_name = string_at(entry, "mode");
        const auto mode = longsim::vehicle_mode_from_string(mode_name);
        if (!mode) {
          throw std::runtime_error(
              "mode must be \"manual\", \"autonomous\", or \"cooperative\", got \"" +
              mode_name + "\"");
        }
        sv.mode = *mode;
      }
      sc.vehicles.push_back(sv);
    }

    if (cfg.contains("dt")) sc.dt = number_at(cfg, "dt");
    if (cfg.contains("initial_gap")) sc.initial_gap = number_at(cfg, "initial_gap");
    if (cfg.contains("t_set")) sc.t_set = number_at(cfg, "t_set");
    if (cfg.contains("tau_s")) sc.tau_s = number_at(cfg, "tau_s");
    if (cfg.contains("tau_c")) sc.tau_c = number_at(cfg, "tau_c");
    if (cfg.contains("gains")) {
      const json& g = cfg.at("gains");
      if (!g.is_object()) {
        throw std::runtime_error("\"gains\" must be an object");
      }
      reject_unknown_keys(g, "gains", {"kp1", "kp2", "kp3", "ki1", "kd1", "kd2"});
      if (g.contains("kp1")) sc.gains.kp1 = number_at(g, "kp1");
      if (g.contains("kp2")) sc.gains.kp2 = number_at(g, "kp2");
      if (g.contains("kp3")) sc.gains.kp3 = number_at(g, "kp3");
      if (g.contains("ki1")) sc.gains.ki1 = number_at(g, "ki1");
      if (g.contains("kd1")) sc.gains.kd1 = number_at(g, "kd1");
      if (g.contains("kd2")) sc.gains.kd2 = number_at(g, "kd2");
    }
    if (cfg.contains("environment")) {
      const json& e = cfg.at("environment");
      if (!e.is_object()) {
        throw std::runtime_error("\"environment\" must be an object");
      }
      reject_unknown_keys(e, "environment",
                          {"air_density", "grade", "adhesion",
                           "braking_efficiency", "braking_mass_factor"});
      if (e.contains("air_density")) sc.env.air_density = number_at(e, "air_density");
      if (e.contains("grade")) sc.env.grade = number_at(e, "grade");
      if (e.contains("adhesion")) sc.env.adhesion = number_at(e, "adhesion");
      if (e.contains("braking_efficiency"))
        sc.env.braking_efficiency = number_at(e, "braking_efficiency");
      if (e.contains("braking_mass_factor"))
        sc.env.braking_mass_factor = number_at(e, "braking_mass_factor");
    }
    if (cfg.contains("free_flow_speed")) sc.free_flow_speed = number_at(cfg, "free_flow_speed");
    if (cfg.contains("alpha")) sc.alpha = number_at(cfg, "alpha");
    if (cfg.contains("beta")) sc.beta = number_at(cfg, "beta");
    if (cfg.contains("detection_range_ft"))
      sc.detection_range_ft = number_at(cfg, "detection_range_ft");
    if (cfg.contains("tgap_warmup_s")) sc.tgap_warmup_s = number_at(cfg, "tgap_warmup_s");
    if (cfg.contains("tgap_min_speed_fps"))
      sc.tgap_min_speed_fps = number_at(cfg, "tgap_min_speed_fps");
    if (cfg.contains("seed")) {
      sc.seed = static_cast<unsigned long long>(integer_at(cfg, "seed"));
    }
    if (cfg.contains("continue_on_collision")) {
      const json& v = cfg.at("continue_on_collision");
      if (!v.is_boolean()) {
        throw std::runtime_error("key \"continue_on_collision\" must be a boolean");
      }
      sc.continue_on_collision = v.get<bool>();
    }
    if (cfg.contains("threads")) sc.threads = integer_at(cfg, "threads");
    if (cfg.contains("out_dir")) out_dir = string_at(cfg, "out_dir");
  } catch (const std::exception& e) {
    fail(e.what());
  }

  if (opts.continue_on_collision) sc.continue_on_collision = true;
  if (opts.threads_flag > 0) sc.threads = opts.threads_flag;
  if (!opts.out_dir_flag.empty()) out_dir = opts.out_dir_flag;

  if (const std::string problem = longsim::validate_scenario(sc); !problem.empty()) {
    fail(problem);
  }

  longsim::sim_trace trace;
  try {
    trace = longsim::run(sc);
  } catch (const std::exception& e) {
    fail(e.what());
  }

  const fs::path out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    fail("cannot create output directory " + out.string() + ": " + ec.message());
  }
  auto write_file = [&](const char* name, auto writer) {
    const fs::path p = out / name;
    std::ofstream f(p);
    if (!f) {
      fail("cannot write " + p.string());
    }
    writer(f, trace, sc);
  };
  write_file("trace.csv", longsim::write_trace_csv);
  write_file("summary.json", longsim::write_summary_json);
  write_file("plots.csv", longsim::write_plot_csv);

  const std::vector<longsim::vehicle_summary> stats = longsim::summarize(trace, sc);
  std::cout << "simulated " << sc.vehicles.size() << " vehicle(s) for "
            << (trace.steps.size() - 1) * sc.dt << " s (" << trace.steps.size()
            << " records each)\n";
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& s = stats[i];
    std::cout << "vehicle " << (i + 1) << " (" << sc.vehicles[i].spec.name
              << ", " << longsim::to_string(sc.vehicles[i].mode)
              << "): peak_a_max=" << s.peak_a_max
              << " peak_d_max=" << s.peak_d_max;
    if (i > 0) {
      std::cout << " peak_t_gap=" << s.peak_t_gap;
    }
    std::cout << " rmse=" << s.speed_rmse_vs_leader << "\n";
  }
  for (const auto& c : trace.collisions) {
    std::cout << "collision: vehicle " << (c.vehicle + 1)
              << " reached a non-positive gap at t=" << c.step * sc.dt << " s\n";
  }
  if (trace.halted) {
    std::cout << "run halted at first collision\n";
  }
  std::cout << "wrote " << (out / "trace.csv").string() << ", "
            << (out / "summary.json").string() << ", "
            << (out / "plots.csv").string() << "\n";
  return trace.collisions.empty() ? kExitOk : kExitCollision;
}

int do_catalog_list() {
  std::cout << "id  name                        class        fhwa  weight_lb\n";
  for (const auto& v : longsim::builtin_fleet()) {
    std::printf("%-3d %-27s %-12s %-5d %.0f\n", v.id, v.name.c_str(),
                longsim::to_string(v.fleet).c_str(), v.fhwa_class, v.weight_lb);
  }
  return kExitOk;
}

int do_catalog_show(int id) {
  longsim::vehicle_spec v;
  try {
    v = longsim::builtin_vehicle(id);
  } catch (const std::out_of_range&) {
    fail("no vehicle with id " + std::to_string(id) + " in the built-in fleet");
  }
  std::cout << "id: " << v.id << "\n"
            << "name: " << v.name << "\n"
            << "class: " << longsim::to_string(v.fleet) << "\n"
            << "fhwa_class: " << v.fhwa_class << "\n"
            << "length_ft: " << longsim::format_double(v.length_ft) << "\n"
            << "width_ft: " << longsim::format_double(v.width_ft) << "\n"
            << "height_ft: " << longsim::format_double(v.height_ft) << "\n"
            << "weight_lb: " << longsim::format_double(v.weight_lb) << "\n"
            << "wheel_radius_ft: " << longsim::format_double(v.wheel_radius_ft) << "\n"
            << "drag_coeff: " << longsim::format_double(v.drag_coeff) << "\n"
            << "frontal_area_ft2: " << longsim::format_double(v.frontal_area_ft2()) << "\n"
            << "drivetrain: " << longsim::to_string(v.drivetrain) << "\n"
            << "slippage: " << longsim::format_double(v.transmission.slippage) << "\n"
            << "efficiency: " << longsim::format_double(v.transmission.efficiency) << "\n"
            << "diff_ratio: " << longsim::format_double(v.transmission.diff_ratio) << "\n";
  std::cout << "gears (ratio, upshift mph, downshift mph):\n";
  for (std::size_t g = 0; g < v.transmission.gears.size(); ++g) {
    const auto& gear = v.transmission.gears[g];
    std::cout << "  " << (g + 1) << ": " << longsim::format_double(gear.ratio)
              << ", " << longsim::format_double(gear.up_mph) << ", "
              << longsim::format_double(gear.down_mph) << "\n";
  }
  const auto& e = v.engine;
  double peak_torque = 0.0;
  for (const auto& knot : e.torque_map) {
    peak_torque = std::max(peak_torque, knot.torque_lbft);
  }
  std::printf("engine: %s (idle %g rpm, max %g rpm, peak torque %.1f lb-ft, ~%lld hp)\n",
              e.name.c_str(), e.idle_rpm, e.max_rpm, peak_torque,
              std::llround(longsim::peak_knot_horsepower(e)));
  return kExitOk;
}

int do_schedule_stats(const std::string& path, const std::string& units_name) {
  longsim::speed_units units = longsim::speed_units::fps;
  if (units_name == "mph") {
    units = longsim::speed_units::mph;
  } else if (units_name != "fps") {
    fail("units must be \"mph\" or \"fps\"");
  }
  longsim::schedule sched;
  try {
    sched = longsim::load_schedule(path, units);
  } catch (const std::exception& e) {
    fail(e.what());
  }
  const longsim::schedule_stats st = longsim::compute_stats(sched);
  json j;
  j["schedule"] = sched.name;
  j["samples"] = sched.samples.size();
  j["duration_s"] = st.duration_s;
  j["distance_mi"] = st.distance_mi;
  j["avg_speed_fps"] = st.avg_speed_fps;
  j["max_speed_fps"] = st.max_speed_fps;
  j["max_accel_fps2"] = st.max_accel_fps2;
  j["max_decel_fps2"] = st.max_decel_fps2;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"longitudinal traffic microsimulation"};
  app.require_subcommand(0, 1);
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults,
               "print the default scenario parameters as JSON and exit");

  run_options ropts;
  CLI::App* run_cmd = app.add_subcommand("run", "run a simulation scenario");
  run_cmd->add_option("config", ropts.config_path, "scenario config (JSON)")
      ->required();
  run_cmd->add_option("--out-dir", ropts.out_dir_flag,
                      "directory for trace.csv, summary.json, plots.csv");
  run_cmd->add_flag("--continue-on-collision", ropts.continue_on_collision,
                    "keep simulating after a collision instead of halting");
  run_cmd->add_option("--threads", ropts.threads_flag,
                      "worker threads for the per-step vehicle update");

  CLI::App* catalog_cmd = app.add_subcommand("catalog", "inspect the vehicle fleet");
  CLI::App* list_cmd = catalog_cmd->add_subcommand("list", "list built-in vehicles");
  int show_id = 0;
  CLI::App* show_cmd = catalog_cmd->add_subcommand("show", "show one vehicle in detail");
  show_cmd->add_option("id", show_id, "vehicle id")->required();
  catalog_cmd->require_subcommand(1);

  std::string sched_path;
  std::string sched_units = "fps";
  CLI::App* stats_cmd =
      app.add_subcommand("schedule-stats", "summarize a drive schedule CSV");
  stats_cmd->add_option("file", sched_path, "schedule CSV (time_s,speed)")
      ->required();
  stats_cmd->add_option("--units", sched_units, "speed column units: fps or mph")
      ->check(CLI::IsMember({"fps", "mph"}));

  CLI11_PARSE(app, argc, argv);

  if (print_defaults) {
    std::cout << defaults_json().dump(2) << "\n";
    return kExitOk;
  }
  try {
    if (*run_cmd) return do_run(ropts);
    if (*list_cmd) return do_catalog_list();
    if (*show_cmd) return do_catalog_show(show_id);
    if (*stats_cmd) return do_schedule_stats(sched_path, sched_units);
  } catch (const std::exception& e) {
    fail(e.what());
  }
  std::cout << app.help();
  return kExitOk;
}
