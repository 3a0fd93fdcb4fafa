#pragma once

#include <optional>
#include <string>
#include <vector>

#include "longsim/units.hpp"

namespace longsim {

// One sample of an engine's steady-state torque curve.
struct torque_knot {
  double rpm = 0.0;
  double torque_lbft = 0.0;
};

// Piecewise-linear torque curve spanning [idle_rpm, max_rpm].
struct engine_spec {
  int engine_id = 0;
  std::string name;            // informational; not serialized
  double displacement_l = 0.0; // informational; not serialized
  double idle_rpm = 0.0;
  double max_rpm = 0.0;
  std::vector<torque_knot> torque_map;  // strictly increasing rpm
};

struct gear_spec {
  double ratio = 0.0;     // gearbox ratio (before the final drive)
  double up_mph = 0.0;    // shift up above this road speed
  double down_mph = 0.0;  // shift down below this road speed
};

struct transmission_spec {
  double slippage = 0.0;          // fractional drive-wheel slip
  double efficiency = 0.0;        // driveline mechanical efficiency
  double diff_ratio = 0.0;        // final-drive (differential) ratio
  std::vector<gear_spec> gears;   // ratios strictly decreasing with gear number
};

enum class drivetrain_type { front_wheel, rear_wheel, all_wheel };

enum class fleet_class { small_auto, large_auto, small_truck, large_truck };

struct vehicle_spec {
  int id = 0;
  std::string name;
  fleet_class fleet = fleet_class::small_auto;
  int fhwa_class = 0;
  double length_ft = 0.0;
  double width_ft = 0.0;
  double height_ft = 0.0;
  double weight_lb = 0.0;
  double wheel_radius_ft = 0.0;
  double drag_coeff = 0.0;
  drivetrain_type drivetrain = drivetrain_type::front_wheel;
  transmission_spec transmission;
  engine_spec engine;

  // Geometry ratios. Wheelbase is a fixed fraction of overall length; the
  // center of gravity sits midway between the axles at a height tuned per
  // vehicle against published braking capability.
  double wheelbase_ratio = 0.55;   // wheelbase / overall length
  double cg_height_ratio = 0.35;   // cg height / wheelbase
  double rear_axle_ratio = 0.5;    // (rear axle -> cg) / wheelbase

  double frontal_area_ft2() const { return width_ft * height_ft; }
  double wheelbase_ft() const { return wheelbase_ratio * length_ft; }
  double cg_height_ft() const { return cg_height_ratio * wheelbase_ft(); }
  double rear_axle_to_cg_ft() const { return rear_axle_ratio * wheelbase_ft(); }
  double front_axle_to_cg_ft() const { return wheelbase_ft() - rear_axle_to_cg_ft(); }
  double mass_slug() const { return weight_lb / kGravityFtS2; }
};

// Driver population entry: multiplicative adjustments on free-flow speed (w),
// acceleration (n), and deceleration (q), plus share of traffic.
struct driver_type {
  int id = 0;
  double speed_mult = 1.0;
  double accel_mult = 1.0;
  double decel_mult = 1.0;
  double traffic_share_pct = 0.0;
};

// Built-in fleet: ten passenger vehicles and four trucks, ids 1..14.
const std::vector<vehicle_spec>& builtin_fleet();
const vehicle_spec& builtin_vehicle(int id);   // throws std::out_of_range on unknown id
const std::vector<driver_type>& builtin_drivers();  // ids 1..10
const driver_type& builtin_driver(int id);     // throws std::out_of_range on unknown id

// Torque at an rpm: linear between knots, clamped to the end knots outside.
double torque_at(const engine_spec& engine, double rpm);

// Largest horsepower over the map's knots (2*pi*M*n / 550, n in rev/s).
double peak_knot_horsepower(const engine_spec& engine);

std::string to_string(drivetrain_type t);
std::string to_string(fleet_class f);
std::optional<drivetrain_type> drivetrain_from_string(const std::string& s);
std::optional<fleet_class> fleet_class_from_string(const std::string& s);

// Catalog CSV round trip ----------------------------------------------------
//
// Catalog header:
//   id,name,fleet_type,fhwa_class,length_ft,width_ft,height_ft,weight_lb,
//   wheel_radius_ft,drag_coeff,drivetrain,slippage,efficiency,diff_ratio,gears
// `gears` is a semicolon-separated list of ratio/up_mph/down_mph.
// Torque maps live in a sidecar CSV with header engine_id,rpm,torque_lbft;
// engine idle/max rpm are the first and last knots.

struct catalog_error_entry {
  int row = 0;  // 1-based line number in the offending file, 0 if global
  std::string message;
};

struct catalog_parse_result {
  std::vector<vehicle_spec> vehicles;
  std::vector<catalog_error_entry> errors;
  bool ok() const { return errors.empty(); }
};

std::string serialize_catalog(const std::vector<vehicle_spec>& fleet);
std::string serialize_torque_maps(const std::vector<vehicle_spec>& fleet);
catalog_parse_result parse_catalog(const std::string& catalog_csv,
                                   const std::string& torque_csv);

// Empty string when the spec is valid, else a message naming the field.
std::string validate_vehicle(const vehicle_spec& v);

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace longsim
