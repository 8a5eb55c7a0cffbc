#pragma once

// Kalman filter over a constant-acceleration model of along-track motion.
// State is (distance, speed, acceleration); every measurement observes one
// state component directly, GNSS positions after map matching.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tramsim/csv.hpp"
#include "tramsim/error.hpp"
#include "tramsim/filter.hpp"
#include "tramsim/telemetry.hpp"
#include "tramsim/track.hpp"

namespace tramsim {

using Matrix3 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;

struct EstimatorState {
  double x = 0.0;  // m
  double v = 0.0;  // m/s
  double a = 0.0;  // m/s^2
  Matrix3 P = Matrix3::Identity();
  double t = 0.0;  // s

  Vector3 mean() const { return {x, v, a}; }
  void set_mean(const Vector3& m) {
    x = m[0];
    v = m[1];
    a = m[2];
  }

  double sigma_x() const { return std::sqrt(P(0, 0)); }
  double sigma_v() const { return std::sqrt(P(1, 1)); }
  double sigma_a() const { return std::sqrt(P(2, 2)); }

  /// Diagonal prior. Defaults are wide enough for a tram at an unknown chainage.
  static EstimatorState prior(double t, double x = 0.0, double v = 0.0, double a = 0.0,
                              double sigma_x = 100.0, double sigma_v = 1.0, double sigma_a = 1.0) {
    EstimatorState s;
    s.t = t;
    s.x = x;
    s.v = v;
    s.a = a;
    s.P = Vector3(sigma_x * sigma_x, sigma_v * sigma_v, sigma_a * sigma_a).asDiagonal();
    return s;
  }
};

struct NoiseConfig {
  double jerk_psd = 0.5;            // (m/s^3)^2 / Hz, white-jerk process noise
  double accel_variance = 0.01;     // (m/s^2)^2
  double speed_variance = 0.05;     // (m/s)^2
  double position_variance = 4.0;   // m^2

  void validate() const {
    if (!(jerk_psd > 0.0) || !(accel_variance > 0.0) || !(speed_variance > 0.0) ||
        !(position_variance > 0.0)) {
      throw ParameterError("all noise parameters must be strictly positive");
    }
  }
};

struct Measurement {
  double t = 0.0;
  MeasurementKind kind = MeasurementKind::accel;
  double value = 0.0;    // accel [m/s^2] or speed [m/s]
  GeoPoint position{};   // gps only
  double variance = 1.0;
};

inline Matrix3 transition_matrix(double dt) {
  Matrix3 F;
  F << 1.0, dt, 0.5 * dt * dt,
       0.0, 1.0, dt,
       0.0, 0.0, 1.0;
  return F;
}

/// Discretised white-jerk process noise over dt.
inline Matrix3 process_noise(double dt, double jerk_psd) {
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  Matrix3 Q;
  Q << dt3 * dt2 / 20.0, dt2 * dt2 / 8.0, dt3 / 6.0,
       dt2 * dt2 / 8.0,  dt3 / 3.0,       dt2 / 2.0,
       dt3 / 6.0,        dt2 / 2.0,       dt;
  return jerk_psd * Q;
}

inline EstimatorState kf_predict(const EstimatorState& s, double dt, const NoiseConfig& noise) {
  if (!(dt > 0.0)) throw ParameterError("kf_predict requires dt > 0");
  const Matrix3 F = transition_matrix(dt);
  EstimatorState out = s;
  out.set_mean(F * s.mean());
  out.P = F * s.P * F.transpose() + process_noise(dt, noise.jerk_psd);
  out.P = (0.5 * (out.P + out.P.transpose())).eval();
  out.t = s.t + dt;
  return out;
}

enum class UpdateStatus { applied, off_track, rejected };

struct UpdateResult {
  EstimatorState state;
  UpdateStatus status = UpdateStatus::applied;
  double innovation = 0.0;           // measured minus predicted
  double innovation_variance = 0.0;  // H P H' + R
  std::string reason;                // set when not applied
};

/// Scalar update of state component `index` with a Joseph-form covariance update.
inline EstimatorState kf_update_component(const EstimatorState& s, int index, double value,
                                          double variance, double* innovation = nullptr,
                                          double* innovation_variance = nullptr) {
  const Vector3 m = s.mean();
  const double residual = value - m[index];
  const double S = s.P(index, index) + variance;
  const Vector3 K = s.P.col(index) / S;
  Eigen::RowVector3d H = Eigen::RowVector3d::Zero();
  H[index] = 1.0;
  const Matrix3 A = Matrix3::Identity() - K * H;

  EstimatorState out = s;
  out.set_mean(m + K * residual);
  out.P = A * s.P * A.transpose() + variance * K * K.transpose();
  out.P = (0.5 * (out.P + out.P.transpose())).eval();
  if (innovation) *innovation = residual;
  if (innovation_variance) *innovation_variance = S;
  return out;
}

inline UpdateResult kf_update(const EstimatorState& s, const Measurement& m, const TrackMap& map,
                              double off_track_gate = kDefaultOffTrackGate) {
  if (std::abs(m.t - s.t) > 1e-9) {
    throw ParameterError("measurement at t = " + std::to_string(m.t) +
                         " does not match filter time " + std::to_string(s.t));
  }
  UpdateResult result{s, UpdateStatus::applied, 0.0, 0.0, {}};
  const bool finite = m.kind == MeasurementKind::gps
                          ? std::isfinite(m.position.lat) && std::isfinite(m.position.lon)
                          : std::isfinite(m.value);
  if (!finite || !(m.variance > 0.0) || !std::isfinite(m.variance)) {
    result.status = UpdateStatus::rejected;
    result.reason = "non-finite measurement or variance";
    return result;
  }

  int index = 0;
  double value = m.value;
  switch (m.kind) {
    case MeasurementKind::gps:
      try {
        value = map.project(m.position, off_track_gate).chainage;
      } catch (const OffTrackError& e) {
        result.status = UpdateStatus::off_track;
        result.reason = e.what();
        return result;
      }
      index = 0;
      break;
    case MeasurementKind::speed:
      index = 1;
      break;
    case MeasurementKind::accel:
      index = 2;
      break;
  }
  result.state = kf_update_component(s, index, value, m.variance, &result.innovation,
                                     &result.innovation_variance);
  return result;
}

struct EstimatorOptions {
  double off_track_gate = kDefaultOffTrackGate;  // m
  double bias_window = 2.0;   // s of standstill at the log start used for accel bias; 0 disables
  double accel_cutoff = 0.0;  // Hz, causal low-pass on accel before fusion; 0 disables
};

struct EstimateRow {
  EstimatorState state;
  double theta = 0.0;  // slope at the estimated chainage
  MeasurementKind source = MeasurementKind::accel;
};

struct EstimatorSummary {
  std::size_t applied = 0;
  std::size_t off_track = 0;
  std::size_t rejected = 0;
  double accel_bias = 0.0;

  std::size_t skipped() const noexcept { return off_track + rejected; }
};

struct EstimatorRun {
  std::vector<EstimateRow> rows;
  EstimatorSummary summary;
};

inline Measurement make_measurement(const TelemetryRow& row, const NoiseConfig& noise) {
  Measurement m;
  m.t = row.t;
  m.kind = row.kind;
  switch (row.kind) {
    case MeasurementKind::accel:
      m.value = row.value1;
      m.variance = noise.accel_variance;
      break;
    case MeasurementKind::speed:
      m.value = row.value1;
      m.variance = noise.speed_variance;
      break;
    case MeasurementKind::gps:
      m.position = {row.value1, row.value2};
      m.variance = noise.position_variance;
      break;
  }
  return m;
}

/// Event-driven fusion: predict to each measurement time, update, emit.
inline EstimatorRun run_estimator(const Telemetry& log, const TrackMap& map, const NoiseConfig& noise,
                                  const EstimatorState& initial, const EstimatorOptions& options = {}) {
  noise.validate();
  EstimatorRun run;
  if (log.rows.empty()) return run;

  const double t0 = log.rows.front().t;
  double bias = 0.0;
  if (options.bias_window > 0.0) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : log.rows) {
      if (r.t >= t0 + options.bias_window) break;
      if (r.kind == MeasurementKind::accel && std::isfinite(r.value1)) {
        sum += r.value1;
        ++count;
      }
    }
    if (count > 0) bias = sum / static_cast<double>(count);
  }
  run.summary.accel_bias = bias;

  std::optional<LowPassFilter> prefilter;
  if (options.accel_cutoff > 0.0) {
    const TimeSeries accel = log.series(MeasurementKind::accel);
    if (accel.size() >= 2) prefilter.emplace(estimate_sample_rate(accel.t), options.accel_cutoff);
  }

  EstimatorState state = initial;
  run.rows.reserve(log.rows.size());
  double last_t = -std::numeric_limits<double>::infinity();
  for (const auto& row : log.rows) {
    if (row.t < last_t || row.t < state.t - 1e-9) {
      ++run.summary.rejected;
      continue;
    }
    last_t = row.t;
    Measurement m = make_measurement(row, noise);
    if (m.kind == MeasurementKind::accel && std::isfinite(m.value)) {
      m.value -= bias;
      if (prefilter) m.value = prefilter->process(m.value);
    }
    if (m.t > state.t) {
      state = kf_predict(state, m.t - state.t, noise);
      state.t = m.t;
    }
    UpdateResult r = kf_update(state, m, map, options.off_track_gate);
    switch (r.status) {
      case UpdateStatus::applied:
        ++run.summary.applied;
        state = r.state;
        run.rows.push_back({state, map.slope_at_clamped(state.x), m.kind});
        break;
      case UpdateStatus::off_track:
        ++run.summary.off_track;
        break;
      case UpdateStatus::rejected:
        ++run.summary.rejected;
        break;
    }
  }
  return run;
}

inline constexpr const char* kEstimateHeader = "t,x,v,a,sigma_x,sigma_v,sigma_a,theta";

inline void write_estimates(std::ostream& out, const EstimatorRun& run) {
  out << kEstimateHeader << '\n';
  for (const auto& r : run.rows) {
    const auto& s = r.state;
    csv::write_row(out, {s.t, s.x, s.v, s.a, s.sigma_x(), s.sigma_v(), s.sigma_a(), r.theta});
  }
}

}  // namespace tramsim
