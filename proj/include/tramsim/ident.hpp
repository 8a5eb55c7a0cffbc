#pragma once

// Grey-box identification of the resistance law from coast-down runs and of
// the traction/brake torque gains from full-notch acceleration plateaus.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "tramsim/csv.hpp"
#include "tramsim/dynamics.hpp"
#include "tramsim/error.hpp"
#include "tramsim/filter.hpp"
#include "tramsim/telemetry.hpp"

namespace tramsim {

/// Idle-notch run where only resistance and slope decelerate the tram.
struct CoastdownSegment {
  std::vector<double> t;  // s, strictly increasing
  std::vector<double> v;  // m/s, strictly positive
  double mass = 17000.0;  // kg
  double theta = 0.0;     // rad, constant over the segment

  double duration() const { return t.empty() ? 0.0 : t.back() - t.front(); }

  void validate() const {
    if (t.size() != v.size()) throw ParameterError("coast-down t and v sizes differ");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!(v[i] > 0.0)) throw ParameterError("coast-down speed must stay positive");
      if (i > 0 && !(t[i] > t[i - 1])) throw ParameterError("coast-down times must increase");
    }
    if (!(mass > 0.0)) throw ParameterError("coast-down mass must be positive");
  }
};

struct CoastdownOptions {
  double max_abs_accel = 0.3;  // m/s^2
  double min_duration = 5.0;   // s
  double cutoff = 2.0;         // Hz, smoothing before the acceleration test
};

struct CoastdownExtraction {
  std::vector<CoastdownSegment> segments;
  std::string diagnostic;  // why nothing qualified, when segments is empty
};

namespace detail {

inline double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto i = static_cast<std::size_t>(it - xs.begin());
  const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + w * (ys[i] - ys[i - 1]);
}

/// Zero-phase smoothing when the sample rate allows it, identity otherwise.
inline std::vector<double> smooth(const std::vector<double>& t, const std::vector<double>& x,
                                  double cutoff) {
  if (x.size() < 3 || cutoff <= 0.0) return x;
  const double fs = estimate_sample_rate(t);
  if (!(fs > 2.0 * cutoff)) return x;
  return lowpass(x, fs, cutoff, FilterMode::zero_phase);
}

/// Central differences (one-sided at the ends).
inline std::vector<double> derivative(const std::vector<double>& t, const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d.front() = (x[1] - x[0]) / (t[1] - t[0]);
  d.back() = (x[n - 1] - x[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) / (t[i + 1] - t[i - 1]);
  return d;
}

inline void close_segment(std::vector<CoastdownSegment>& out, CoastdownSegment& current,
                          double min_duration) {
  if (current.t.size() >= 2 && current.duration() >= min_duration) out.push_back(current);
  current.t.clear();
  current.v.clear();
}

}  // namespace detail

/// Finds coast-down segments in a telemetry log. With a notch log the idle
/// intervals are used directly; otherwise samples qualify when the smoothed
/// acceleration is negative with magnitude below `max_abs_accel`.
inline CoastdownExtraction extract_coastdowns(const Telemetry& log, double mass, double theta = 0.0,
                                              const NotchSchedule* notch_log = nullptr,
                                              const CoastdownOptions& options = {}) {
  CoastdownExtraction result;
  const TimeSeries speed = log.series(MeasurementKind::speed);
  if (speed.size() < 3) {
    result.diagnostic = "telemetry has fewer than 3 speed samples";
    return result;
  }
  for (std::size_t i = 1; i < speed.size(); ++i) {
    if (!(speed.t[i] > speed.t[i - 1])) throw ParameterError("speed timestamps must increase");
  }

  std::vector<bool> qualifies(speed.size(), false);
  if (notch_log != nullptr) {
    for (std::size_t i = 0; i < speed.size(); ++i) {
      qualifies[i] = notch_log->notch_at(speed.t[i]).value() == 0 && speed.value[i] > 0.0;
    }
  } else {
    std::vector<double> accel;
    const TimeSeries measured = log.series(MeasurementKind::accel);
    if (measured.size() >= 2) {
      const auto smoothed = detail::smooth(measured.t, measured.value, options.cutoff);
      accel.reserve(speed.size());
      for (double t : speed.t) accel.push_back(detail::interpolate(measured.t, smoothed, t));
    } else {
      accel = detail::derivative(speed.t, detail::smooth(speed.t, speed.value, options.cutoff));
    }
    for (std::size_t i = 0; i < speed.size(); ++i) {
      qualifies[i] = speed.value[i] > 0.0 && accel[i] < 0.0 &&
                     std::abs(accel[i]) < options.max_abs_accel;
    }
  }

  CoastdownSegment current;
  current.mass = mass;
  current.theta = theta;
  for (std::size_t i = 0; i < speed.size(); ++i) {
    // Idle intervals split where the notch log changes, even between idle entries.
    const bool boundary = notch_log != nullptr && !current.t.empty() &&
                          notch_log->notch_at(current.t.back()).value() == 0 &&
                          [&] {
                            for (const auto& e : notch_log->entries()) {
                              if (e.start > current.t.back() && e.start <= speed.t[i]) return true;
                            }
                            return false;
                          }();
    if (!qualifies[i] || boundary) detail::close_segment(result.segments, current, options.min_duration);
    if (qualifies[i]) {
      current.t.push_back(speed.t[i]);
      current.v.push_back(speed.value[i]);
    }
  }
  detail::close_segment(result.segments, current, options.min_duration);
  if (result.segments.empty()) {
    result.diagnostic = "no coast-down of at least " + std::to_string(options.min_duration) +
                        " s with |a| < " + std::to_string(options.max_abs_accel) + " m/s^2 found";
  }
  return result;
}

struct ResistanceFitOptions {
  bool fix_c_zero = true;
  double cutoff = 2.0;     // Hz, smoothing before differentiation
  double min_speed = 0.5;  // m/s
  double max_speed = 12.0; // m/s
  std::size_t min_samples = 50;
  int polish_iterations = 3;  // Gauss-Newton passes on simulated speed; 0 keeps the regression
  double sim_dt = 1e-3;       // s
};

struct FitResult {
  double a0 = 0.0;  // N/kg
  double b = 0.0;   // N s/m
  double c = 0.0;   // N s^2/m^2
  double a0_stderr = 0.0;
  double b_stderr = 0.0;
  double c_stderr = 0.0;
  double residual_rms = 0.0;       // m/s, simulated vs measured speed
  Eigen::MatrixXd covariance;      // of (a0, b[, c])
  std::size_t samples = 0;
  int polish_iterations = 0;

  ResistanceCoeffs coeffs() const {
    if (c == 0.0) return ResistanceCoeffs::identified(a0, b);
    return {a0, b, c, ResistanceForm::quadratic};
  }
};

namespace detail {

/// Coast-down speed of the full model at the requested times (t0 = times.front()).
inline std::vector<double> coast_speed(const std::vector<double>& times, double v0, double mass,
                                       double theta, const ResistanceCoeffs& coeffs,
                                       const TramParams& vehicle, const AdhesionParams& adh,
                                       double dt) {
  TramParams p = vehicle;
  p.curb_mass = mass;
  p.payload_mass = 0.0;
  p.resistance = coeffs;
  std::vector<double> out;
  out.reserve(times.size());
  DynState state = DynState::rolling(v0, p);
  double t = times.front();
  const Notch idle = Notch::idle();
  for (double target : times) {
    while (t + dt <= target + 1e-12) {
      state = step(state, idle, theta, p, adh, dt);
      t += dt;
    }
    if (target > t) {
      const DynState next = step(state, idle, theta, p, adh, dt);
      const double w = (target - t) / dt;
      out.push_back(state.v + w * (next.v - state.v));
    } else {
      out.push_back(state.v);
    }
  }
  return out;
}

struct WorkingSegment {
  std::vector<double> t;
  std::vector<double> v;         // measured
  std::vector<double> smoothed;  // low-passed
  double mass = 0.0;
  double theta = 0.0;
};

inline std::vector<WorkingSegment> prepare_segments(const std::vector<CoastdownSegment>& segments,
                                                    const ResistanceFitOptions& options) {
  std::vector<WorkingSegment> out;
  for (const auto& seg : segments) {
    seg.validate();
    if (seg.t.size() < 3) continue;
    const auto smoothed = smooth(seg.t, seg.v, options.cutoff);
    WorkingSegment w;
    w.mass = seg.mass;
    w.theta = seg.theta;
    for (std::size_t i = 0; i < seg.t.size(); ++i) {
      if (smoothed[i] < options.min_speed || smoothed[i] > options.max_speed) continue;
      w.t.push_back(seg.t[i]);
      w.v.push_back(seg.v[i]);
      w.smoothed.push_back(smoothed[i]);
    }
    if (w.t.size() >= 3) out.push_back(std::move(w));
  }
  return out;
}

inline ResistanceCoeffs coeffs_from(const Eigen::VectorXd& beta, bool with_c) {
  if (with_c) return {beta[0], beta[1], beta[2], ResistanceForm::quadratic};
  return ResistanceCoeffs::identified(beta[0], beta[1]);
}

}  // namespace detail

/// Speed RMS [m/s] of the full model with `coeffs` against the segments, each
/// simulated from its smoothed initial speed.
inline double trajectory_residual_rms(const std::vector<CoastdownSegment>& segments,
                                      const ResistanceCoeffs& coeffs, const TramParams& vehicle,
                                      const AdhesionParams& adh,
                                      const ResistanceFitOptions& options = {}) {
  const auto work = detail::prepare_segments(segments, options);
  double ss = 0.0;
  std::size_t n = 0;
  for (const auto& w : work) {
    const auto sim = detail::coast_speed(w.t, w.smoothed.front(), w.mass, w.theta, coeffs, vehicle,
                                         adh, options.sim_dt);
    for (std::size_t i = 0; i < sim.size(); ++i) {
      ss += (sim[i] - w.v[i]) * (sim[i] - w.v[i]);
      ++n;
    }
  }
  if (n == 0) throw IdentifiabilityError("no coast-down samples inside the speed range");
  return std::sqrt(ss / static_cast<double>(n));
}

/// Least squares on M dv/dt + M g sin(theta) = -(a0 M + b v [+ c v^2]) with
/// dv/dt from central differences of the smoothed speed, then Gauss-Newton
/// passes matching simulated to measured speed (initial speeds are nuisance
/// parameters of that pass).
inline FitResult fit_resistance(const std::vector<CoastdownSegment>& segments,
                                const TramParams& vehicle, const AdhesionParams& adh,
                                const ResistanceFitOptions& options = {}) {
  if (segments.empty()) throw IdentifiabilityError("no coast-down segments to fit");
  const auto work = detail::prepare_segments(segments, options);
  const bool with_c = !options.fix_c_zero;
  const int k = with_c ? 3 : 2;

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  for (const auto& w : work) {
    const auto dv = detail::derivative(w.t, w.smoothed);
    for (std::size_t i = 1; i + 1 < w.t.size(); ++i) {
      const double v = w.smoothed[i];
      Eigen::RowVectorXd row(k);
      row[0] = w.mass;
      row[1] = v;
      if (with_c) row[2] = v * v;
      rows.push_back(row);
      rhs.push_back(-(w.mass * dv[i] + w.mass * vehicle.gravity * std::sin(w.theta)));
    }
  }
  if (rows.size() < options.min_samples) {
    throw IdentifiabilityError("only " + std::to_string(rows.size()) +
                               " usable coast-down samples (need " +
                               std::to_string(options.min_samples) + ")");
  }

  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), k);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = rows[i];
    y[static_cast<Eigen::Index>(i)] = rhs[i];
  }
  const Eigen::VectorXd scale = X.colwise().norm().transpose();
  if ((scale.array() <= 0.0).any()) throw IdentifiabilityError("regressor column is identically zero");
  const Eigen::MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv[k - 1] < 1e-8 * sv[0]) {
    throw IdentifiabilityError(
        "coast-down data cannot separate the resistance terms (regressors are collinear; "
        "segments need a spread of speeds)");
  }
  Eigen::VectorXd beta = svd.solve(y).cwiseQuotient(scale);

  FitResult fit;
  fit.samples = rows.size();
  {
    const Eigen::VectorXd r = y - X * beta;
    const double dof = std::max<double>(1.0, static_cast<double>(rows.size()) - k);
    const double s2 = r.squaredNorm() / dof;  // N^2
    const Eigen::MatrixXd XtX = X.transpose() * X;
    fit.covariance = s2 * XtX.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  }

  // Trajectory matching over (a0, b[, c], v0 per segment).
  const auto nseg = static_cast<Eigen::Index>(work.size());
  Eigen::Index nres = 0;
  for (const auto& w : work) nres += static_cast<Eigen::Index>(w.t.size());
  std::vector<Eigen::Index> offset(work.size() + 1, 0);
  for (std::size_t s = 0; s < work.size(); ++s) {
    offset[s + 1] = offset[s] + static_cast<Eigen::Index>(work[s].t.size());
  }
  auto segment_residuals = [&](const Eigen::VectorXd& theta, Eigen::Index s, Eigen::VectorXd& r) {
    const auto& w = work[static_cast<std::size_t>(s)];
    const auto sim = detail::coast_speed(w.t, theta[k + s], w.mass, w.theta,
                                         detail::coeffs_from(theta.head(k), with_c), vehicle, adh,
                                         options.sim_dt);
    for (std::size_t i = 0; i < sim.size(); ++i) {
      r[offset[static_cast<std::size_t>(s)] + static_cast<Eigen::Index>(i)] = sim[i] - w.v[i];
    }
  };
  auto residuals = [&](const Eigen::VectorXd& theta) {
    Eigen::VectorXd r(nres);
    for (Eigen::Index s = 0; s < nseg; ++s) segment_residuals(theta, s, r);
    return r;
  };

  Eigen::VectorXd theta(k + nseg);
  theta.head(k) = beta;
  for (Eigen::Index s = 0; s < nseg; ++s) theta[k + s] = work[static_cast<std::size_t>(s)].smoothed.front();
  Eigen::VectorXd r = residuals(theta);

  const int passes = work.empty() ? 0 : options.polish_iterations;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nres, k + nseg);
  for (int iter = 0; iter < passes; ++iter) {
    // Forward differences; an initial speed only moves its own segment.
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      const double h = 1e-6 * std::max(std::abs(theta[j]), j == 0 ? 1e-3 : 1.0);
      Eigen::VectorXd shifted = theta;
      shifted[j] += h;
      if (j < k) {
        J.col(j) = (residuals(shifted) - r) / h;
      } else {
        Eigen::VectorXd moved = r;
        segment_residuals(shifted, j - k, moved);
        J.col(j) = (moved - r) / h;
      }
    }
    const Eigen::VectorXd delta = J.colPivHouseholderQr().solve(-r);
    Eigen::VectorXd candidate = theta + delta;
    Eigen::VectorXd r_candidate = residuals(candidate);
    // Halve the step until the speed misfit no longer grows.
    for (int tries = 0; tries < 10 && r_candidate.squaredNorm() > r.squaredNorm(); ++tries) {
      candidate = theta + std::pow(0.5, tries + 1) * delta;
      r_candidate = residuals(candidate);
    }
    if (r_candidate.squaredNorm() > r.squaredNorm()) break;
    const double rel = (candidate - theta).cwiseAbs().cwiseQuotient(
                           theta.cwiseAbs().cwiseMax(1e-12)).maxCoeff();
    theta = candidate;
    r = r_candidate;
    ++fit.polish_iterations;
    if (rel < 1e-8) break;
  }
  if (fit.polish_iterations > 0) {
    const double dof = std::max<double>(1.0, static_cast<double>(nres - theta.size()));
    const double s2 = r.squaredNorm() / dof;
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::MatrixXd full = s2 * JtJ.ldlt().solve(Eigen::MatrixXd::Identity(theta.size(), theta.size()));
    fit.covariance = full.topLeftCorner(k, k);
  }

  fit.a0 = theta[0];
  fit.b = theta[1];
  fit.c = with_c ? theta[2] : 0.0;
  fit.residual_rms = std::sqrt(r.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(1, nres)));
  fit.a0_stderr = std::sqrt(std::max(0.0, fit.covariance(0, 0)));
  fit.b_stderr = std::sqrt(std::max(0.0, fit.covariance(1, 1)));
  if (with_c) fit.c_stderr = std::sqrt(std::max(0.0, fit.covariance(2, 2)));
  return fit;
}

struct FormResidual {
  ResistanceForm form = ResistanceForm::identified;
  double residual_rms = 0.0;  // m/s
};

/// Speed misfit of each literature resistance form on the same coast-downs.
inline std::vector<FormResidual> literature_residuals(const std::vector<CoastdownSegment>& segments,
                                                      const TramParams& vehicle,
                                                      const AdhesionParams& adh,
                                                      const ResistanceFitOptions& options = {}) {
  std::vector<FormResidual> out;
  for (auto form : {ResistanceForm::passenger_bogie, ResistanceForm::electric_locomotive,
                    ResistanceForm::suburban_emu}) {
    out.push_back({form, trajectory_residual_rms(segments, ResistanceCoeffs::literature(form),
                                                 vehicle, adh, options)});
  }
  return out;
}

/// Acceleration record of a constant-notch run starting with zero motor torque.
struct AccelRun {
  std::vector<double> t;  // s, from the notch change
  std::vector<double> a;  // m/s^2
  double v0 = 0.0;        // m/s at t = 0
  int notch = 7;
  double theta = 0.0;
};

struct Plateau {
  std::size_t first = 0;
  std::size_t last = 0;   // inclusive
  double start = 0.0;     // s
  double end = 0.0;       // s
  double mean_accel = 0.0;
};

struct TractionFitOptions {
  double band = 0.03;          // plateau: |a| within this fraction of the peak
  double min_duration = 0.5;   // s
  double smoothing = 0.25;     // s, centred moving average for plateau detection only
  double tolerance = 1e-3;     // m/s^2, required plateau match
  double sim_dt = 1e-3;        // s
};

namespace detail {

/// Centred moving average over +-half samples, shrinking at the ends. Unlike
/// a recursive low-pass it cannot overshoot the step where a run ends.
inline std::vector<double> moving_average(const std::vector<double>& x, std::size_t half) {
  std::vector<double> prefix(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i];
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(x.size(), i + half + 1);
    out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

}  // namespace detail

/// Longest stretch around the peak of the smoothed |a| that stays within the band.
inline Plateau detect_plateau(const AccelRun& run, const TractionFitOptions& options = {}) {
  if (run.t.size() != run.a.size()) throw ParameterError("run t and a sizes differ");
  if (run.t.size() < 3) throw IdentifiabilityError("acceleration run too short to contain a plateau");
  const double fs = estimate_sample_rate(run.t);
  const auto half = static_cast<std::size_t>(std::lround(0.5 * options.smoothing * fs));
  const auto smoothed = detail::moving_average(run.a, half);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < smoothed.size(); ++i) {
    if (std::abs(smoothed[i]) > std::abs(smoothed[peak])) peak = i;
  }
  const double threshold = (1.0 - options.band) * std::abs(smoothed[peak]);
  if (!(threshold > 0.0)) throw IdentifiabilityError("acceleration run has no non-zero plateau");
  std::size_t first = peak;
  std::size_t last = peak;
  while (first > 0 && std::abs(smoothed[first - 1]) >= threshold) --first;
  while (last + 1 < smoothed.size() && std::abs(smoothed[last + 1]) >= threshold) ++last;
  Plateau p{first, last, run.t[first], run.t[last], 0.0};
  if (p.end - p.start < options.min_duration) {
    throw IdentifiabilityError("no acceleration plateau of at least " +
                               std::to_string(options.min_duration) + " s detected");
  }
  double sum = 0.0;
  for (std::size_t i = first; i <= last; ++i) sum += run.a[i];
  p.mean_accel = sum / static_cast<double>(last - first + 1);
  return p;
}

namespace detail {

inline double simulated_plateau(const AccelRun& run, const Plateau& plateau, double gain,
                                const TramParams& params, const AdhesionParams& adh, double dt) {
  TramParams p = params;
  if (run.notch > 0) p.traction_gain_accel = gain;
  else p.traction_gain_brake = gain;
  const Notch notch(run.notch);
  DynState state = DynState::rolling(run.v0, p);
  double t = 0.0;
  double sum = 0.0;
  for (std::size_t i = plateau.first; i <= plateau.last; ++i) {
    while (t + dt <= run.t[i] + 1e-12) {
      state = step(state, notch, run.theta, p, adh, dt);
      t += dt;
    }
    sum += force_balance(state, run.theta, p, adh).v_dot;
  }
  return sum / static_cast<double>(plateau.last - plateau.first + 1);
}

}  // namespace detail

struct GainFit {
  double gain = 0.0;  // N m per notch
  Plateau plateau;
  double simulated_mean = 0.0;
};

/// Bisection on one torque gain so that the simulated plateau matches the measured one.
inline GainFit fit_traction_gain(const AccelRun& run, const TramParams& params,
                                 const AdhesionParams& adh, const TractionFitOptions& options = {}) {
  if (run.notch == 0) throw ParameterError("traction gain fit needs a non-idle notch");
  params.validate();
  const Plateau plateau = detect_plateau(run, options);
  const double target = std::abs(plateau.mean_accel);
  auto excess = [&](double gain) {
    return std::abs(detail::simulated_plateau(run, plateau, gain, params, adh, options.sim_dt)) - target;
  };
  // Rigid-body estimate of the gain. The bracket grows slowly because gains far
  // above it saturate adhesion, where the plateau is no longer monotone in the gain.
  const double r = params.wheel_radius;
  const double mass = params.total_mass() + params.wheel_inertia / (r * r);
  const double guess = target * mass * r / std::abs(run.notch);
  double lo = guess / 1.25;
  double hi = guess * 1.25;
  for (int i = 0; i < 4 && excess(lo) > 0.0; ++i) lo /= 1.25;
  for (int i = 0; i < 4 && excess(hi) < 0.0; ++i) hi *= 1.25;
  if (excess(lo) > 0.0 || excess(hi) < 0.0) {
    throw IdentifiabilityError("could not bracket the torque gain for the measured plateau");
  }
  while (hi - lo > 1e-6 * guess) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  GainFit fit;
  fit.gain = 0.5 * (lo + hi);
  fit.plateau = plateau;
  fit.simulated_mean = detail::simulated_plateau(run, plateau, fit.gain, params, adh, options.sim_dt);
  if (std::abs(std::abs(fit.simulated_mean) - target) > options.tolerance) {
    throw IdentifiabilityError("plateau acceleration cannot be matched within " +
                               std::to_string(options.tolerance) + " m/s^2 (power-limited run?)");
  }
  return fit;
}


/// Acceleration run CSV with a header naming at least the columns `t`, `v`
/// and `accel` (extra columns are ignored, so trajectory files qualify).
/// Times are shifted to start at 0; v0 is the first speed.
inline AccelRun read_accel_run(std::istream& in, const std::string& source, int notch) {
  AccelRun run;
  run.notch = notch;
  std::string raw;
  std::size_t line = 0;
  std::size_t ct = 0;
  std::size_t cv = 0;
  std::size_t ca = 0;
  std::size_t width = 0;
  bool header = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = csv::trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = csv::split(text);
    if (!header) {
      int found = 0;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto name = csv::trim(fields[i]);
        if (name == "t") ct = i, found |= 1;
        if (name == "v") cv = i, found |= 2;
        if (name == "accel") ca = i, found |= 4;
      }
      if (found != 7) {
        throw ParseError(source, line, "header must name the columns t, v and accel");
      }
      width = fields.size();
      header = true;
      continue;
    }
    if (fields.size() != width) {
      throw ParseError(source, line, "expected " + std::to_string(width) + " fields");
    }
    const double t = csv::parse_double(fields[ct], source, line, "time");
    const double v = csv::parse_double(fields[cv], source, line, "speed");
    const double a = csv::parse_double(fields[ca], source, line, "acceleration");
    if (run.t.empty()) run.v0 = v;
    if (!run.t.empty() && !(t > run.t.back())) throw ParseError(source, line, "times must increase");
    run.t.push_back(t);
    run.a.push_back(a);
  }
  if (!header) throw ParseError(source, 0, "acceleration run file is empty");
  if (!run.t.empty()) {
    const double t0 = run.t.front();
    for (double& t : run.t) t -= t0;
  }
  return run;
}

struct TractionFit {
  GainFit accel;
  GainFit brake;
};

inline TractionFit fit_traction_gains(const AccelRun& max_run, const AccelRun& min_run,
                                      const TramParams& params, const AdhesionParams& adh,
                                      const TractionFitOptions& options = {}) {
  if (max_run.notch <= 0) throw ParameterError("max run must use a traction notch");
  if (min_run.notch >= 0) throw ParameterError("min run must use a braking notch");
  return {fit_traction_gain(max_run, params, adh, options),
          fit_traction_gain(min_run, params, adh, options)};
}


/// `key = value` report of a resistance fit, optionally with the literature
/// comparison; the same syntax as the parameter config files.
inline void write_fit_report(std::ostream& out, const FitResult& fit,
                             const std::vector<FormResidual>& literature = {}) {
  auto line = [&](const std::string& key, double value) {
    out << key << " = " << csv::format_number(value) << '\n';
  };
  out << "resistance_form = " << (fit.c == 0.0 ? "identified" : "quadratic") << '\n';
  line("resistance_a0", fit.a0);
  line("resistance_b", fit.b);
  line("resistance_c", fit.c);
  line("resistance_a0_stderr", fit.a0_stderr);
  line("resistance_b_stderr", fit.b_stderr);
  line("resistance_c_stderr", fit.c_stderr);
  line("residual_rms", fit.residual_rms);
  out << "samples = " << fit.samples << '\n';
  out << "polish_iterations = " << fit.polish_iterations << '\n';
  for (const auto& r : literature) line("residual_rms_" + std::string(to_string(r.form)), r.residual_rms);
}

}  // namespace tramsim
