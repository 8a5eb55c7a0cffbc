#pragma once

// Shared synthetic scenarios for the unit tests and the acceptance binary.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tramsim/tramsim.hpp"

namespace tramsim::fixtures {

/// Five-vertex track of about 1 km with a gentle climb and descent.
inline TrackMap demo_track() {
  return TrackMap({{50.000, 14.0000, 0.00},
                   {50.002, 14.0010, 0.01},
                   {50.004, 14.0005, 0.00},
                   {50.006, 14.0020, -0.01},
                   {50.009, 14.0020, 0.00}});
}

/// Standstill, full traction, coast, service brake, traction, light brake.
inline NotchSchedule drive_schedule() {
  return NotchSchedule({{0.0, Notch(0)},
                        {5.0, Notch(7)},
                        {20.0, Notch(0)},
                        {32.0, Notch(-4)},
                        {40.0, Notch(3)},
                        {52.0, Notch(-2)}});
}

struct DriveScenario {
  TrackMap map = demo_track();
  Trajectory truth;
};

inline DriveScenario drive_scenario(double t_end = 60.0) {
  DriveScenario s;
  SimOptions options;
  options.t_end = t_end;
  options.sample_interval = 0.01;
  const TrackMap* map = &s.map;
  s.truth = simulate(DynState{}, drive_schedule(), [map](double x) { return map->slope_at_clamped(x); },
                     TramParams::tatra_t3(), AdhesionParams::dry(), options);
  return s;
}

struct TrackingError {
  double position_rms = 0.0;  // m
  double speed_rms = 0.0;     // m/s
  std::size_t samples = 0;
};

inline TrackingError tracking_error(const EstimatorRun& run, const Trajectory& truth, double warmup) {
  TrackingError e;
  double sx = 0.0;
  double sv = 0.0;
  for (const auto& row : run.rows) {
    if (row.state.t < warmup) continue;
    const TrajectorySample ref = sample_at(truth, row.state.t);
    sx += (row.state.x - ref.state.x) * (row.state.x - ref.state.x);
    sv += (row.state.v - ref.state.v) * (row.state.v - ref.state.v);
    ++e.samples;
  }
  if (e.samples > 0) {
    e.position_rms = std::sqrt(sx / static_cast<double>(e.samples));
    e.speed_rms = std::sqrt(sv / static_cast<double>(e.samples));
  }
  return e;
}

/// Idle-notch decays on level track sampled at 10 Hz, with optional
/// multiplicative speed noise.
inline std::vector<CoastdownSegment> coastdowns(const TramParams& params, double relative_noise = 0.0,
                                                std::uint64_t seed = 1,
                                                std::vector<double> start_speeds = {12.5, 9.0, 6.0},
                                                double duration = 120.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<CoastdownSegment> out;
  for (double v0 : start_speeds) {
    SimOptions options;
    options.t_end = duration;
    options.sample_interval = 0.1;
    options.halt_on_idle_stop = true;
    const Trajectory traj = simulate(DynState::rolling(v0, params), NotchSchedule::constant(Notch::idle()),
                                     0.0, params, AdhesionParams::dry(), options);
    CoastdownSegment seg;
    seg.mass = params.total_mass();
    for (const auto& s : traj.samples) {
      if (s.state.v <= 0.3) break;
      seg.t.push_back(s.t);
      seg.v.push_back(s.state.v * (1.0 + relative_noise * unit(rng)));
    }
    out.push_back(std::move(seg));
  }
  return out;
}

/// Constant-notch acceleration record sampled at 100 Hz from the model.
inline AccelRun notch_run(const TramParams& params, int notch, double v0, double duration) {
  SimOptions options;
  options.t_end = duration;
  options.sample_interval = 0.01;
  options.halt_on_idle_stop = true;
  const Trajectory traj = simulate(DynState::rolling(v0, params), NotchSchedule::constant(Notch(notch)),
                                   0.0, params, AdhesionParams::dry(), options);
  AccelRun run;
  run.notch = notch;
  run.v0 = v0;
  for (const auto& s : traj.samples) {
    run.t.push_back(s.t);
    run.a.push_back(s.accel);
  }
  return run;
}

}  // namespace tramsim::fixtures
