#pragma once

// Synthetic sensor logs sampled from a simulated trajectory: accelerometer,
// GNSS speed and GNSS position with Gaussian noise from a seeded generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "tramsim/dynamics.hpp"
#include "tramsim/telemetry.hpp"
#include "tramsim/track.hpp"

namespace tramsim {

struct SensorConfig {
  double imu_native_rate = 2000.0;  // Hz, rate at which accel noise is drawn
  double imu_rate = 100.0;       // Hz, logged rate after block averaging
  double gnss_rate = 1.0;        // Hz
  double accel_sigma = 0.1;      // m/s^2
  double speed_sigma = std::sqrt(0.05);  // m/s
  double position_sigma = 2.0;   // m per horizontal axis
  double speed_relative_sigma = 0.0;  // multiplicative speed noise (fraction)
  double accel_bias = 0.0;       // m/s^2
  bool gps = true;               // emit gps fixes (needs a track)
  std::uint64_t seed = 1;
};

/// Linear interpolation of a trajectory sample at time t (clamped to its span).
inline TrajectorySample sample_at(const Trajectory& traj, double t) {
  const auto& s = traj.samples;
  if (s.empty()) throw ParameterError("empty trajectory");
  if (t <= s.front().t) return s.front();
  if (t >= s.back().t) return s.back();
  const auto it = std::upper_bound(s.begin(), s.end(), t,
                                   [](double value, const TrajectorySample& e) { return value < e.t; });
  const TrajectorySample& b = *it;
  const TrajectorySample& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  TrajectorySample out = a;
  out.t = t;
  out.state.x = a.state.x + w * (b.state.x - a.state.x);
  out.state.v = a.state.v + w * (b.state.v - a.state.v);
  out.state.omega = a.state.omega + w * (b.state.omega - a.state.omega);
  out.state.torque = a.state.torque + w * (b.state.torque - a.state.torque);
  out.accel = a.accel + w * (b.accel - a.accel);
  return out;
}

/// Builds a time-sorted telemetry log. Chainage x of the trajectory is mapped
/// to geographic fixes through `map` (ignored when gps is off).
inline Telemetry synthesize_telemetry(const Trajectory& traj, const TrackMap* map,
                                      const SensorConfig& cfg) {
  if (cfg.gps && map == nullptr) throw ParameterError("gps synthesis needs a track map");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double t_end = traj.back().t;
  const double t_start = traj.samples.front().t;

  Telemetry log;
  const auto imu_count = static_cast<long>(std::floor((t_end - t_start) * cfg.imu_rate + 1e-9));
  const auto gnss_count = static_cast<long>(std::floor((t_end - t_start) * cfg.gnss_rate + 1e-9));
  const long block = std::max(1L, std::lround(cfg.imu_native_rate / cfg.imu_rate));
  long gnss_k = 0;
  for (long k = 0; k <= imu_count; ++k) {
    const double t = t_start + static_cast<double>(k) / cfg.imu_rate;
    // GNSS epochs that fall before or on this IMU sample.
    while (gnss_k <= gnss_count && t_start + static_cast<double>(gnss_k) / cfg.gnss_rate <= t + 1e-12) {
      const double tg = t_start + static_cast<double>(gnss_k) / cfg.gnss_rate;
      const TrajectorySample s = sample_at(traj, tg);
      const double speed = s.state.v * (1.0 + cfg.speed_relative_sigma * unit(rng)) +
                           cfg.speed_sigma * unit(rng);
      log.add(tg, MeasurementKind::speed, speed);
      if (cfg.gps) {
        const double x = std::clamp(s.state.x, 0.0, map->length());
        const GeoPoint p = map->position_at(x);
        PlanarPoint q = map->to_local(p);
        q.east += cfg.position_sigma * unit(rng);
        q.north += cfg.position_sigma * unit(rng);
        const GeoPoint noisy = map->to_geographic(q);
        log.add(tg, MeasurementKind::gps, noisy.lat, noisy.lon);
      }
      ++gnss_k;
    }
    // Block average of the native-rate samples ending at t.
    double sum = 0.0;
    for (long j = 0; j < block; ++j) {
      const double tn = t - static_cast<double>(block - 1 - j) / cfg.imu_native_rate;
      sum += sample_at(traj, tn).accel + cfg.accel_sigma * unit(rng);
    }
    log.add(t, MeasurementKind::accel, sum / static_cast<double>(block) + cfg.accel_bias);
  }
  return log;
}

}  // namespace tramsim
