#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "longsim/control_design.hpp"
#include "longsim/fleet_catalog.hpp"
#include "longsim/longitudinal_models.hpp"
#include "longsim/schedule.hpp"
#include "longsim/sim_engine.hpp"
#include "longsim/vehicle_dynamics.hpp"

namespace {

longsim::schedule ramp_schedule() {
  return longsim::parse_schedule_csv("0,5\n30,80\n120,80\n", longsim::speed_units::fps,
                                     "ramp");
}

// Alternating-mode string of n vehicles behind a schedule-tracking lead car.
longsim::scenario string_scenario(int n) {
  longsim::scenario sc;
  sc.sched = ramp_schedule();
  const longsim::vehicle_mode modes[3] = {longsim::vehicle_mode::manual,
                                          longsim::vehicle_mode::autonomous,
                                          longsim::vehicle_mode::cooperative};
  for (int i = 0; i < n; ++i) {
    sc.vehicles.push_back({longsim::builtin_vehicle(1 + i % 14),
                           longsim::builtin_driver(1 + i % 10),
                           i == 0 ? longsim::vehicle_mode::manual : modes[i % 3]});
  }
  return sc;
}

void bm_compute_dynamics(benchmark::State& state) {
  const longsim::vehicle_spec& car = longsim::builtin_vehicle(1);
  const longsim::environment env;
  double v = 0.0;
  int gear = 1;
  for (auto _ : state) {
    const auto dyn = longsim::compute_dynamics(car, env, v, gear);
    benchmark::DoNotOptimize(dyn.max_accel_fps2);
    gear = dyn.gear;
    v += 0.5;
    if (v > 110.0) v = 0.0, gear = 1;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_compute_dynamics);

void bm_tractive_effort(benchmark::State& state) {
  const longsim::vehicle_spec& truck = longsim::builtin_vehicle(14);
  double v = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(longsim::engine_tractive_effort(truck, v, 5));
    v += 0.25;
    if (v > 80.0) v = 0.0;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_tractive_effort);

void bm_loop_metrics(benchmark::State& state) {
  longsim::loop_params p;
  p.kp = 1.0;
  p.kd = 1.0;
  p.lag = 1.3;
  for (auto _ : state) {
    p.kp = p.kp >= 4.0 ? 0.25 : p.kp + 0.01;
    benchmark::DoNotOptimize(longsim::loop_metrics(p).settling_time);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_loop_metrics);

void bm_car_following_law(benchmark::State& state) {
  const longsim::driver_type& driver = longsim::builtin_driver(5);
  double gap = 20.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        longsim::iidm_accel(driver, 8.0, 25.0, gap, 12.0, 45.0, 110.0));
    gap = gap >= 400.0 ? 15.0 : gap + 0.5;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_car_following_law);

void bm_step_response_oracle(benchmark::State& state) {
  for (auto _ : state) {
    const auto trace = longsim::simulate_step_response(2.0, 0.5, 0.005, 8.0);
    benchmark::DoNotOptimize(longsim::measure_step_metrics(trace, 0.005).rise_time);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_step_response_oracle);

void bm_step_string(benchmark::State& state) {
  const longsim::scenario sc = string_scenario(static_cast<int>(state.range(0)));
  std::vector<longsim::vehicle_state> records = longsim::init_string(sc);
  int k = 1;
  for (auto _ : state) {
    records = longsim::step_string(records, sc, k++);
    benchmark::DoNotOptimize(records.back().x);
  }
  state.SetItemsProcessed(state.iterations() * sc.vehicles.size());
}
BENCHMARK(bm_step_string)->Arg(2)->Arg(8)->Arg(32);

void bm_full_run(benchmark::State& state) {
  const longsim::scenario sc = string_scenario(4);
  for (auto _ : state) {
    const longsim::sim_trace trace = longsim::run(sc);
    benchmark::DoNotOptimize(trace.steps.size());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long long>(1200) * sc.vehicles.size());
}
BENCHMARK(bm_full_run)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
