#pragma once

// Quarter model of tram longitudinal dynamics: one lumped wheel coupled to the
// car body through a creep-dependent adhesion law, with notch-commanded motor
// torque, propulsion resistance and track slope.

#include <algorithm>
#include <cmath>
#include <compare>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "tramsim/error.hpp"
#include "tramsim/integrator.hpp"

namespace tramsim {

inline constexpr double kStandardGravity = 9.81;  // m/s^2

/// Throttle lever position: 7 traction notches, 7 braking notches and idle.
class Notch {
 public:
  static constexpr int kMin = -7;
  static constexpr int kMax = 7;

  constexpr explicit Notch(int position) : value_(position) {
    if (position < kMin || position > kMax) {
      throw ParameterError("notch " + std::to_string(position) + " outside [-7, 7]");
    }
  }
  static constexpr Notch idle() { return Notch(0); }

  constexpr int value() const noexcept { return value_; }
  constexpr bool braking() const noexcept { return value_ < 0; }
  constexpr bool traction() const noexcept { return value_ > 0; }

  friend constexpr auto operator<=>(const Notch&, const Notch&) = default;

 private:
  int value_;
};

enum class ResistanceForm {
  identified,           // a0*M + b*v, fitted on T3 coast-downs
  quadratic,            // a0*M + b*v + c*v^2, free quadratic fit
  passenger_bogie,      // 0.0147*M + 2.18e-6*M*v^2
  electric_locomotive,  // 520 + 0.0065*M + 3.6*v + 3.888*v^2
  suburban_emu,         // 1.839*sqrt(M) + 0.0036*M*v + 4.329*v^2
};

inline std::string_view to_string(ResistanceForm form) {
  switch (form) {
    case ResistanceForm::identified: return "identified";
    case ResistanceForm::quadratic: return "quadratic";
    case ResistanceForm::passenger_bogie: return "passenger_bogie";
    case ResistanceForm::electric_locomotive: return "electric_locomotive";
    case ResistanceForm::suburban_emu: return "suburban_emu";
  }
  throw ParameterError("unknown resistance form id " + std::to_string(static_cast<int>(form)));
}

inline ResistanceForm parse_resistance_form(std::string_view name) {
  for (auto form : {ResistanceForm::identified, ResistanceForm::quadratic,
                    ResistanceForm::passenger_bogie, ResistanceForm::electric_locomotive,
                    ResistanceForm::suburban_emu}) {
    if (to_string(form) == name) return form;
  }
  throw ParameterError("unknown resistance form '" + std::string(name) + "'");
}

/// Propulsion resistance F_r(v, M). The literature forms carry fixed
/// coefficients; a0/b/c are only read by `identified` and `quadratic`.
struct ResistanceCoeffs {
  double a0 = 0.0147;  // N per kg of total mass
  double b = 125.83;   // N s/m
  double c = 0.0;      // N s^2/m^2
  ResistanceForm form = ResistanceForm::identified;

  static ResistanceCoeffs identified(double a0, double b) {
    return {a0, b, 0.0, ResistanceForm::identified};
  }
  static ResistanceCoeffs literature(ResistanceForm form) { return {0.0, 0.0, 0.0, form}; }

  void validate() const {
    (void)to_string(form);
    if (!std::isfinite(a0) || !std::isfinite(b) || !std::isfinite(c)) {
      throw ParameterError("resistance coefficients must be finite");
    }
    if (form == ResistanceForm::identified && c != 0.0) {
      throw ParameterError("identified resistance form has no quadratic term (c must be 0)");
    }
  }
};

/// Magnitude of propulsion resistance [N] at speed magnitude `speed` >= 0.
inline double propulsion_resistance(double speed, double mass, const ResistanceCoeffs& coeffs) {
  if (!(speed >= 0.0)) throw ParameterError("propulsion_resistance expects speed >= 0");
  const double v = speed;
  switch (coeffs.form) {
    case ResistanceForm::identified:
      return coeffs.a0 * mass + coeffs.b * v;
    case ResistanceForm::quadratic:
      return coeffs.a0 * mass + coeffs.b * v + coeffs.c * v * v;
    case ResistanceForm::passenger_bogie:
      return 0.0147 * mass + 2.18e-6 * mass * v * v;
    case ResistanceForm::electric_locomotive:
      return 520.0 + 0.0065 * mass + 3.6 * v + 3.8880 * v * v;
    case ResistanceForm::suburban_emu:
      return 1.839 * std::sqrt(mass) + 0.0036 * mass * v + 4.329 * v * v;
  }
  throw ParameterError("unknown resistance form id " +
                       std::to_string(static_cast<int>(coeffs.form)));
}

/// Adhesion law mu(v_s) = c*exp(-a*v_s) - d*exp(-b*v_s) for one rail condition.
struct AdhesionParams {
  double a = 0.54;  // s/m
  double b = 1.2;   // s/m
  double c = 1.0;
  double d = 1.0;
  std::string label = "dry";

  static AdhesionParams dry() { return {0.54, 1.2, 1.0, 1.0, "dry"}; }
  static AdhesionParams wet() { return {0.05, 0.5, 0.08, 0.08, "wet"}; }

  static AdhesionParams from_label(std::string_view label) {
    if (label == "dry") return dry();
    if (label == "wet") return wet();
    throw ParameterError("unknown adhesion condition '" + std::string(label) +
                         "' (expected dry or wet)");
  }

  void validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
      throw ParameterError("adhesion exponents a and b must be positive and finite");
    }
    if (!std::isfinite(c) || !std::isfinite(d)) {
      throw ParameterError("adhesion amplitudes must be finite");
    }
  }
};

/// Evaluated exactly, without clamping, for any creep speed (negative while braking).
inline double adhesion_coefficient(double creep_speed, const AdhesionParams& adh) {
  return adh.c * std::exp(-adh.a * creep_speed) - adh.d * std::exp(-adh.b * creep_speed);
}

/// Static vehicle constants. Defaults describe a Tatra T3 at 17 t.
struct TramParams {
  double curb_mass = 16500.0;     // kg
  double payload_mass = 500.0;    // kg, passengers and crew
  double wheel_radius = 0.325;    // m
  double wheel_mass = 195.0;      // kg
  double wheel_inertia = disk_inertia(195.0, 0.325);  // kg m^2
  double power_limit = 4 * 44.0e3;                    // W
  double traction_gain_accel = 1449.0;                // N m per notch
  double traction_gain_brake = 1176.0;                // N m per notch
  double torque_lag_rate = 3.0;                       // 1/s
  double gravity = kStandardGravity;                  // m/s^2
  ResistanceCoeffs resistance{};

  /// Homogeneous disk: J = m r^2 / 2.
  static constexpr double disk_inertia(double mass, double radius) {
    return 0.5 * mass * radius * radius;
  }

  static TramParams tatra_t3() { return TramParams{}; }

  double total_mass() const noexcept { return curb_mass + payload_mass; }

  /// Same vehicle with the payload adjusted so that total_mass() == mass.
  TramParams with_total_mass(double mass) const {
    if (!(mass >= curb_mass)) {
      throw ParameterError("total mass " + std::to_string(mass) + " kg below curb mass " +
                           std::to_string(curb_mass) + " kg");
    }
    TramParams out = *this;
    out.payload_mass = mass - curb_mass;
    return out;
  }

  void validate() const {
    auto positive = [](double value, const char* name) {
      if (!(value > 0.0) || !std::isfinite(value)) {
        throw ParameterError(std::string(name) + " must be positive and finite");
      }
    };
    positive(curb_mass, "curb_mass");
    positive(wheel_radius, "wheel_radius");
    positive(wheel_mass, "wheel_mass");
    positive(wheel_inertia, "wheel_inertia");
    positive(power_limit, "power_limit");
    positive(traction_gain_accel, "traction_gain_accel");
    positive(traction_gain_brake, "traction_gain_brake");
    positive(torque_lag_rate, "torque_lag_rate");
    positive(gravity, "gravity");
    if (!(payload_mass >= 0.0) || !std::isfinite(payload_mass)) {
      throw ParameterError("payload_mass must be non-negative and finite");
    }
    resistance.validate();
  }
};

/// Continuous simulation state.
struct DynState {
  double omega = 0.0;   // wheel angular speed [rad/s]
  double v = 0.0;       // tram speed [m/s]
  double x = 0.0;       // traveled distance [m]
  double torque = 0.0;  // lagged motor torque at the wheel [N m]

  /// Pure rolling at speed v (no creep), motor torque zero.
  static DynState rolling(double v, const TramParams& params, double x = 0.0) {
    return {v / params.wheel_radius, v, x, 0.0};
  }
};

struct DynRates {
  double omega_dot = 0.0;  // rad/s^2
  double v_dot = 0.0;      // m/s^2
};

/// Steady-state motor torque for a notch. Traction is capped by the power
/// limit, braking is not.
inline double commanded_torque(Notch notch, double omega, const TramParams& params) {
  const int p = notch.value();
  if (p < 0) return params.traction_gain_brake * p;
  const double torque = params.traction_gain_accel * p;
  const double speed = std::abs(omega);
  if (torque * speed >= params.power_limit) return params.power_limit / speed;
  return torque;
}

/// Exact update of the first-order lag dT/dt = rate (T_cmd - T) over dt.
inline double torque_lag_step(double torque, double commanded, double dt, double rate) {
  if (!(dt > 0.0)) throw ParameterError("torque_lag_step requires dt > 0");
  return commanded + (torque - commanded) * std::exp(-rate * dt);
}

inline double slope_force(double theta, double mass, double gravity) {
  return mass * gravity * std::sin(theta);
}

namespace detail {

/// `direction` is the sign of the speed at the start of the step. Holding it
/// over the RK4 stages keeps resistance opposing the motion that step began
/// with, so a stage that overshoots zero cannot reverse it and stall the
/// tram just above standstill.
inline DynRates rates(double omega, double v, double torque, double theta, int direction,
                      const TramParams& params, const AdhesionParams& adh) {
  const double mass = params.total_mass();
  const double normal = mass * params.gravity;
  const double creep = params.wheel_radius * omega - v;
  const double f_adhesion = adhesion_coefficient(creep, adh) * normal;
  const double f_slope = slope_force(theta, mass, params.gravity);

  double f_resist = 0.0;
  if (direction > 0) {
    f_resist = propulsion_resistance(std::abs(v), mass, params.resistance);
  } else if (direction < 0) {
    f_resist = -propulsion_resistance(std::abs(v), mass, params.resistance);
  } else {
    // At rest resistance acts as static friction: it balances the other
    // forces up to its breakaway value and never drives the car backward.
    const double breakaway = propulsion_resistance(0.0, mass, params.resistance);
    const double other = f_adhesion - f_slope;
    f_resist = std::clamp(other, -breakaway, breakaway);
  }

  DynRates out;
  out.omega_dot = (torque - params.wheel_radius * f_adhesion) / params.wheel_inertia;
  out.v_dot = (f_adhesion - f_resist - f_slope) / mass;
  return out;
}

inline void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw NumericalError(std::string("integration diverged: ") + name + " is not finite");
  }
}

}  // namespace detail

/// Right-hand side of the wheel and body equations using the lagged torque in `state`.
inline DynRates force_balance(const DynState& state, double theta, const TramParams& params,
                              const AdhesionParams& adh) {
  const int direction = (state.v > 0.0) - (state.v < 0.0);
  return detail::rates(state.omega, state.v, state.torque, theta, direction, params, adh);
}

inline constexpr double kMaxStep = 0.01;  // s, stiff adhesion coupling

/// One RK4 step of (omega, v, x). The commanded torque is frozen at the step
/// start and the lag is evaluated in closed form at every stage time.
inline DynState step(const DynState& state, Notch notch, double theta, const TramParams& params,
                     const AdhesionParams& adh, double dt) {
  if (!(dt > 0.0) || dt > kMaxStep) {
    throw ParameterError("step size must lie in (0, 0.01] s, got " + std::to_string(dt));
  }
  const double commanded = commanded_torque(notch, state.omega, params);
  const double rate = params.torque_lag_rate;
  auto torque_at = [&](double tau) {
    return commanded + (state.torque - commanded) * std::exp(-rate * tau);
  };
  const int direction = (state.v > 0.0) - (state.v < 0.0);
  auto rhs = [&](double tau, const StateVector<3>& y) {
    const DynRates r = detail::rates(y[0], y[1], torque_at(tau), theta, direction, params, adh);
    return StateVector<3>{r.omega_dot, r.v_dot, y[1]};
  };
  const StateVector<3> next = rk4_step(rhs, 0.0, StateVector<3>{state.omega, state.v, state.x}, dt);

  DynState out{next[0], next[1], next[2], torque_at(dt)};
  detail::require_finite(out.omega, "wheel angular speed");
  detail::require_finite(out.v, "tram speed");
  detail::require_finite(out.x, "position");
  detail::require_finite(out.torque, "motor torque");
  return out;
}

/// Piecewise-constant notch command starting at t = 0.
class NotchSchedule {
 public:
  struct Entry {
    double start = 0.0;  // s
    Notch notch = Notch::idle();
  };

  NotchSchedule() = default;
  explicit NotchSchedule(std::vector<Entry> entries) : entries_(std::move(entries)) {
    validate();
  }
  static NotchSchedule constant(Notch notch) { return NotchSchedule({{0.0, notch}}); }

  void validate() const {
    if (entries_.empty()) throw ParameterError("notch schedule is empty");
    if (entries_.front().start != 0.0) throw ParameterError("notch schedule must start at t = 0");
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      if (!(entries_[i].start > entries_[i - 1].start)) {
        throw ParameterError("notch schedule start times must be strictly increasing");
      }
    }
  }

  Notch notch_at(double t) const {
    Notch current = entries_.front().notch;
    for (const auto& e : entries_) {
      if (e.start > t) break;
      current = e.notch;
    }
    return current;
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::vector<Entry> entries_;
};

/// Track slope [rad] as a function of traveled distance [m].
using SlopeProfile = std::function<double(double)>;

inline SlopeProfile constant_slope(double theta) {
  return [theta](double) { return theta; };
}

struct SimOptions {
  double dt = 1e-3;              // s
  double t_end = 60.0;           // s
  double sample_interval = 0.0;  // s, 0 records every step
  bool halt_on_idle_stop = false;
};

struct TrajectorySample {
  double t = 0.0;
  DynState state{};
  double accel = 0.0;             // dv/dt at the sample [m/s^2]
  double commanded_torque = 0.0;  // steady-state command at the sample [N m]
  int notch = 0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  bool stopped = false;  // ended because the tram came to rest under p <= 0
  double end_time = 0.0;

  const TrajectorySample& back() const { return samples.back(); }
  double distance() const { return samples.empty() ? 0.0 : samples.back().state.x - samples.front().state.x; }
};

/// Integrates the model over a notch schedule. Integration ends at `t_end`,
/// or early when the tram stops while braking (speed clamped to zero).
inline Trajectory simulate(const DynState& initial, const NotchSchedule& schedule,
                           const SlopeProfile& slope, const TramParams& params,
                           const AdhesionParams& adh, const SimOptions& options) {
  params.validate();
  adh.validate();
  schedule.validate();
  if (!(options.t_end > 0.0)) throw ParameterError("t_end must be positive");
  if (!(options.dt > 0.0) || options.dt > kMaxStep) {
    throw ParameterError("step size must lie in (0, 0.01] s");
  }

  const double dt = options.dt;
  const auto steps = static_cast<long>(std::ceil(options.t_end / dt - 1e-9));
  const long stride =
      options.sample_interval > 0.0 ? std::max(1L, std::lround(options.sample_interval / dt)) : 1L;

  Trajectory traj;
  traj.samples.reserve(static_cast<std::size_t>(steps / stride + 2));

  auto record = [&](double t, const DynState& s) {
    const Notch notch = schedule.notch_at(t);
    const double theta = slope(s.x);
    TrajectorySample sample;
    sample.t = t;
    sample.state = s;
    sample.accel = force_balance(s, theta, params, adh).v_dot;
    sample.commanded_torque = commanded_torque(notch, s.omega, params);
    sample.notch = notch.value();
    traj.samples.push_back(sample);
  };

  DynState state = initial;
  record(0.0, state);
  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Notch notch = schedule.notch_at(t);
    if (notch.braking() && state.v <= 0.0) {
      state.v = 0.0;
      state.omega = 0.0;
      traj.stopped = true;
      traj.end_time = t;
      if (traj.samples.back().t != t) record(t, state);
      return traj;
    }

    DynState next = step(state, notch, slope(state.x), params, adh, dt);
    double t_next = static_cast<double>(k + 1) * dt;

    if (notch.value() <= 0 && state.v > 0.0 && next.v <= 0.0) {
      // Locate the stop inside the step assuming constant deceleration.
      const double tau = dt * state.v / (state.v - next.v);
      const double decel = (next.v - state.v) / dt;
      next.x = state.x + state.v * tau + 0.5 * decel * tau * tau;
      next.v = 0.0;
      next.omega = 0.0;
      if (notch.braking() || options.halt_on_idle_stop) {
        state = next;
        traj.stopped = true;
        traj.end_time = t + tau;
        record(t + tau, state);
        return traj;
      }
    }

    state = next;
    if ((k + 1) % stride == 0 || k + 1 == steps) record(t_next, state);
  }
  traj.end_time = static_cast<double>(steps) * dt;
  return traj;
}

inline Trajectory simulate(const DynState& initial, const NotchSchedule& schedule, double theta,
                           const TramParams& params, const AdhesionParams& adh,
                           const SimOptions& options) {
  return simulate(initial, schedule, constant_slope(theta), params, adh, options);
}

}  // namespace tramsim
