#include <cmath>
#include <stdexcept>
#include <vector>

#include "longsim/fleet_catalog.hpp"

namespace longsim {
namespace {

// Torque curves are concave parabolas M(x) = M_peak - c*(x - x_peak)^2
// sampled at ten knots: five from idle to the peak, five more to max rpm.
std::vector<double> knot_rpms(double idle, double x_peak, double max_rpm) {
  std::vector<double> knots;
  knots.reserve(10);
  for (int i = 0; i < 5; ++i) knots.push_back(idle + (x_peak - idle) * i / 4.0);
  for (int i = 1; i <= 5; ++i) knots.push_back(x_peak + (max_rpm - x_peak) * i / 5.0);
  return knots;
}

std::vector<torque_knot> vertex_map(double m_peak, double x_peak, double c,
                                    double idle, double max_rpm) {
  std::vector<torque_knot> map;
  map.reserve(10);
  for (double x : knot_rpms(idle, x_peak, max_rpm)) {
    map.push_back({x, m_peak - c * (x - x_peak) * (x - x_peak)});
  }
  return map;
}

// Passenger-car curves anchor 75% of peak torque at idle and 85% at max rpm,
// which fixes the vertex location and curvature for a given peak value.
std::vector<torque_knot> car_map(double m_peak, double idle, double max_rpm) {
  const double k = std::sqrt(5.0 / 3.0);
  const double x_peak = (idle + k * max_rpm) / (1.0 + k);
  const double c = 0.25 * m_peak / ((x_peak - idle) * (x_peak - idle));
  return vertex_map(m_peak, x_peak, c, idle, max_rpm);
}

// Truck curvatures are solved offline so the largest knot horsepower equals
// the engine's power rating (300 hp single-unit, 485 hp tractors).
constexpr double kSingleUnitCurvature = 0.00023009860018394186;
constexpr double kTractorCurvature = 0.001021034419330387;

struct vehicle_row {
  int id;
  const char* name;
  fleet_class fleet;
  int fhwa;
  double length, width, height, weight, wheel_radius, drag;
};

constexpr vehicle_row kVehicleRows[] = {
    {1, "2006 Honda Civic Si", fleet_class::small_auto, 2, 14.57, 5.740, 4.460, 3060, 1.03, 0.33},
    {2, "2008 Chevrolet Impala", fleet_class::small_auto, 2, 16.70, 6.100, 4.900, 3756, 1.11, 0.33},
    {3, "1998 Buick Century", fleet_class::small_auto, 2, 16.22, 6.060, 4.720, 3553, 1.10, 0.32},
    {4, "2004 Chevrolet Tahoe", fleet_class::large_auto, 3, 16.40, 6.575, 6.358, 7000, 1.28, 0.43},
    {5, "2002 Chevrolet Silverado", fleet_class::large_auto, 3, 18.98, 6.540, 5.930, 5100, 1.24, 0.52},
    {6, "1998 Chevrolet S10 Blazer", fleet_class::large_auto, 2, 16.94, 6.658, 5.275, 4800, 1.13, 0.42},
    {7, "2011 Ford F150", fleet_class::large_auto, 3, 19.31, 6.575, 6.350, 5200, 1.29, 0.50},
    {8, "2009 Honda Civic", fleet_class::small_auto, 2, 14.78, 5.750, 4.708, 3020, 1.04, 0.32},
    {9, "2005 Mazda 6", fleet_class::small_auto, 2, 15.57, 5.840, 4.725, 3521, 1.06, 0.31},
    {10, "2004 Pontiac Grand Am", fleet_class::small_auto, 2, 15.53, 5.870, 4.592, 3300, 1.04, 0.36},
    {11, "single-unit truck", fleet_class::small_truck, 5, 29.00, 7.000, 10.000, 25000, 1.66, 0.55},
    {12, "intermediate semi-trailer", fleet_class::large_truck, 8, 55.00, 8.000, 10.000, 37000, 1.66, 0.66},
    {13, "interstate semi-trailer", fleet_class::large_truck, 9, 68.50, 8.000, 10.000, 53000, 1.66, 0.66},
    {14, "double semi-trailer", fleet_class::large_truck, 12, 74.60, 8.000, 10.000, 55000, 1.66, 0.66},
};

struct engine_row {
  double displacement, idle, max_rpm;
};

constexpr engine_row kEngineRows[] = {
    {2, 1000, 8000}, {4, 1000, 6400}, {3, 700, 5800},  {5, 1000, 5600},
    {5, 1000, 5650}, {4, 1000, 4800}, {5, 1500, 6000}, {2, 1000, 6800},
    {2, 1000, 6500}, {3, 1000, 6400}, {7, 700, 2600},  {12, 800, 2200},
    {12, 800, 2200}, {12, 800, 2200},
};

const char* kEngineNames[] = {
    "2.0L gasoline", "4.0L gasoline", "3.0L gasoline", "5.0L gasoline",
    "5.0L gasoline", "4.0L gasoline", "5.0L gasoline", "2.0L gasoline",
    "2.0L gasoline", "3.0L gasoline", "PX-7 diesel",   "MX-13 diesel",
    "MX-13 diesel",  "MX-13 diesel",
};

// Peak torque values for the passenger cars, calibrated offline so the
// hysteretic sweep of peak available acceleration lands on each model's
// published figure (trucks carry rated curves instead).
constexpr double kCarPeakTorque[] = {
    129.43271677334843, 198.6545535364432,  175.04284427739782,
    312.48736698013454, 265.6517627001101,  373.1660418757268,
    433.8265544280082,  164.34346712677302, 217.02885261149243,
    211.26150420665033,
};

// Center-of-gravity heights (as a fraction of wheelbase), calibrated offline
// against each model's published peak braking capability.
constexpr double kCgHeightRatio[] = {
    0.3265934606817193,  0.3132938428221129,  0.3106405783732236,
    0.40295376447300485, 0.3309714407047042,  0.3277365129107612,
    0.35702947795687723, 0.33908116152100776, 0.3231860236110666,
    0.31852327689582116, 0.35426288171360515, 0.19234913754657476,
    0.15210994026868843, 0.13913991231506417,
};

struct trans_row {
  double slip, efficiency, diff;
};

constexpr trans_row kTransRows[] = {
    {0.05, 0.92, 4.77},  {0.05, 0.92, 2.86}, {0.05, 0.90, 3.29},
    {0.05, 0.90, 3.23},  {0.05, 0.90, 3.23}, {0.05, 0.90, 3.42},
    {0.05, 0.92, 3.55},  {0.03, 0.94, 4.437}, {0.03, 0.94, 4.147},
    {0.04, 0.93, 3.75},  {0.05, 0.80, 4.40}, {0.05, 0.80, 3.50},
    {0.05, 0.80, 3.50},  {0.05, 0.80, 3.50},
};

// Gear tables: ratio, shift-up mph, shift-down mph.
const std::vector<gear_spec> kGearTables[] = {
    {{3.27, 15, 0}, {2.13, 25, 10}, {1.52, 35, 20}, {1.15, 45, 30}, {0.92, 55, 40}, {0.66, 110, 50}},
    {{2.92, 20, 0}, {1.57, 36, 18}, {1.00, 56, 32}, {0.71, 110, 52}},
    {{2.92, 20, 0}, {1.57, 40, 18}, {1.00, 65, 36}, {0.71, 110, 52}},
    {{3.06, 20, 0}, {1.63, 36, 18}, {1.00, 58, 32}, {0.70, 110, 52}},
    {{3.06, 20, 0}, {1.63, 36, 18}, {1.00, 58, 32}, {0.70, 110, 52}},
    {{3.06, 20, 0}, {1.63, 36, 18}, {1.00, 58, 32}, {0.70, 110, 52}},
    {{4.17, 15, 0}, {2.34, 30, 12}, {1.52, 45, 26}, {1.14, 55, 40}, {0.86, 65, 50}, {0.69, 110, 60}},
    {{2.67, 22, 0}, {1.53, 38, 18}, {1.02, 50, 34}, {0.72, 65, 46}, {0.53, 110, 60}},
    {{2.82, 18, 0}, {1.50, 36, 15}, {1.00, 52, 32}, {0.73, 110, 46}},
    {{2.96, 20, 0}, {1.62, 38, 16}, {1.00, 54, 34}, {0.68, 110, 50}},
    {{7.59, 9, 0}, {5.06, 13, 6}, {3.38, 20, 10}, {2.25, 26, 17}, {1.50, 40, 22}, {1.00, 60, 35}, {0.75, 110, 55}},
    {{11.06, 5, 0}, {8.20, 7, 3}, {6.06, 10, 5}, {4.49, 14, 7}, {3.32, 19, 10}, {2.46, 25, 13}, {1.82, 34, 20}, {1.35, 43, 30}, {1.00, 55, 38}, {0.74, 110, 50}},
    {{11.06, 5, 0}, {8.20, 7, 3}, {6.06, 10, 5}, {4.49, 14, 7}, {3.32, 19, 10}, {2.46, 25, 13}, {1.82, 34, 20}, {1.35, 43, 30}, {1.00, 55, 38}, {0.74, 110, 50}},
    {{11.06, 5, 0}, {8.20, 7, 3}, {6.06, 10, 5}, {4.49, 14, 7}, {3.32, 19, 10}, {2.46, 25, 13}, {1.82, 34, 20}, {1.35, 43, 30}, {1.00, 55, 38}, {0.74, 110, 50}},
};

std::vector<vehicle_spec> make_fleet() {
  std::vector<vehicle_spec> fleet;
  fleet.reserve(14);
  for (int i = 0; i < 14; ++i) {
    const vehicle_row& row = kVehicleRows[i];
    vehicle_spec v;
    v.id = row.id;
    v.name = row.name;
    v.fleet = row.fleet;
    v.fhwa_class = row.fhwa;
    v.length_ft = row.length;
    v.width_ft = row.width;
    v.height_ft = row.height;
    v.weight_lb = row.weight;
    v.wheel_radius_ft = row.wheel_radius;
    v.drag_coeff = row.drag;
    v.drivetrain = drivetrain_type::front_wheel;
    v.transmission.slippage = kTransRows[i].slip;
    v.transmission.efficiency = kTransRows[i].efficiency;
    v.transmission.diff_ratio = kTransRows[i].diff;
    v.transmission.gears = kGearTables[i];
    v.cg_height_ratio = kCgHeightRatio[i];

    engine_spec e;
    e.engine_id = row.id;
    e.name = kEngineNames[i];
    e.displacement_l = kEngineRows[i].displacement;
    e.idle_rpm = kEngineRows[i].idle;
    e.max_rpm = kEngineRows[i].max_rpm;
    if (row.id == 11) {
      e.torque_map = vertex_map(740.0, 1800.0, kSingleUnitCurvature, e.idle_rpm, e.max_rpm);
    } else if (row.id >= 12) {
      e.torque_map = vertex_map(1650.0, 1320.0, kTractorCurvature, e.idle_rpm, e.max_rpm);
    } else {
      e.torque_map = car_map(kCarPeakTorque[i], e.idle_rpm, e.max_rpm);
    }
    v.engine = e;
    fleet.push_back(std::move(v));
  }
  return fleet;
}

std::vector<driver_type> make_drivers() {
  return {
      {1, 0.910, 0.875, 0.95, 5},  {2, 0.930, 0.900, 0.96, 8},
      {3, 0.950, 0.925, 0.97, 10}, {4, 0.970, 0.950, 0.98, 12},
      {5, 1.000, 0.975, 0.99, 15}, {6, 1.025, 1.000, 1.00, 15},
      {7, 1.050, 1.050, 1.01, 12}, {8, 1.075, 1.075, 1.02, 10},
      {9, 1.100, 1.100, 1.03, 8},  {10, 1.120, 1.125, 1.04, 5},
  };
}

}  // namespace

const std::vector<vehicle_spec>& builtin_fleet() {
  static const std::vector<vehicle_spec> fleet = make_fleet();
  return fleet;
}

const vehicle_spec& builtin_vehicle(int id) {
  for (const vehicle_spec& v : builtin_fleet()) {
    if (v.id == id) return v;
  }
  throw std::out_of_range("unknown vehicle id " + std::to_string(id));
}

const std::vector<driver_type>& builtin_drivers() {
  static const std::vector<driver_type> drivers = make_drivers();
  return drivers;
}

const driver_type& builtin_driver(int id) {
  for (const driver_type& d : builtin_drivers()) {
    if (d.id == id) return d;
  }
  throw std::out_of_range("unknown driver id " + std::to_string(id));
}

}  // namespace longsim
