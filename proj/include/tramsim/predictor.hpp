#pragma once

// Braking distance by forward simulation of the dynamics model from the
// current speed, and the constant-deceleration baseline d = v^2 / (2 a).

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "tramsim/csv.hpp"
#include "tramsim/dynamics.hpp"
#include "tramsim/error.hpp"
#include "tramsim/track.hpp"

namespace tramsim {

inline constexpr double kDefaultBrakeDeceleration = 1.55;  // m/s^2, empty tram, dry, level
inline constexpr double kDefaultStopGuard = 300.0;         // s

/// Slope from a track map, evaluated along the simulated chainage.
struct TrackSlope {
  const TrackMap* map = nullptr;
  double chainage = 0.0;  // m, where braking starts
};

using SlopeSource = std::variant<double, TrackSlope>;

struct BrakeQuery {
  std::string name;
  double v0 = 0.0;                      // m/s
  Notch notch = Notch(Notch::kMin);     // braking notch, p <= 0
  TramParams params{};                  // includes mass and resistance form
  AdhesionParams adhesion = AdhesionParams::dry();
  SlopeSource slope = 0.0;
  double dt = 1e-3;                     // s
  double t_end = kDefaultStopGuard;     // s
  bool keep_trajectory = false;

  void validate() const {
    if (!(v0 >= 0.0) || !std::isfinite(v0)) throw ParameterError("v0 must be finite and >= 0");
    if (notch.traction()) throw ParameterError("braking prediction needs notch p <= 0");
    if (!(t_end > 0.0)) throw ParameterError("t_end must be positive");
    if (const auto* track = std::get_if<TrackSlope>(&slope); track && track->map == nullptr) {
      throw ParameterError("track slope source without a map");
    }
    params.validate();
    adhesion.validate();
  }
};

struct BrakeResult {
  double braking_distance = 0.0;  // m
  double stop_time = 0.0;         // s
  std::optional<Trajectory> trajectory;
};

inline BrakeResult predict_model(const BrakeQuery& q) {
  q.validate();
  if (q.v0 == 0.0) return {};

  double start = 0.0;
  SlopeProfile profile;
  if (const auto* track = std::get_if<TrackSlope>(&q.slope)) {
    const TrackMap* map = track->map;
    start = track->chainage;
    profile = [map](double x) { return map->slope_at_clamped(x); };
  } else {
    profile = constant_slope(std::get<double>(q.slope));
  }

  SimOptions options;
  options.dt = q.dt;
  options.t_end = q.t_end;
  options.halt_on_idle_stop = true;
  options.sample_interval = q.keep_trajectory ? 0.0 : q.t_end;

  const Trajectory traj = simulate(DynState::rolling(q.v0, q.params, start),
                                   NotchSchedule::constant(q.notch), profile, q.params,
                                   q.adhesion, options);
  if (!traj.stopped) {
    throw NonStoppingError("tram does not stop within " + std::to_string(q.t_end) +
                           " s at notch " + std::to_string(q.notch.value()) +
                           " (speed still " + std::to_string(traj.back().state.v) + " m/s)");
  }
  BrakeResult result;
  result.braking_distance = traj.back().state.x - start;
  result.stop_time = traj.end_time;
  if (q.keep_trajectory) result.trajectory = traj;
  return result;
}

inline double predict_kinematic(double v, double decel) {
  if (!(decel > 0.0)) throw ParameterError("kinematic braking needs a positive deceleration");
  if (!(v >= 0.0)) throw ParameterError("kinematic braking needs v >= 0");
  return 0.5 * v * v / decel;
}

/// Empty and loaded tram, a 0.035 rad descent and wet rails, all at p = -7.
inline std::vector<BrakeQuery> standard_brake_scenarios(const TramParams& base = TramParams::tatra_t3()) {
  auto make = [&](std::string name, double mass, double theta, AdhesionParams adh) {
    BrakeQuery q;
    q.name = std::move(name);
    q.notch = Notch(-7);
    q.params = base.with_total_mass(mass);
    q.adhesion = std::move(adh);
    q.slope = theta;
    return q;
  };
  return {make("empty_dry", 17000.0, 0.0, AdhesionParams::dry()),
          make("loaded_dry", 25000.0, 0.0, AdhesionParams::dry()),
          make("descent_dry", 17000.0, -0.035, AdhesionParams::dry()),
          make("empty_wet", 17000.0, 0.0, AdhesionParams::wet())};
}

struct ComparisonTable {
  std::vector<double> speeds;
  std::vector<double> kinematic;
  std::vector<std::string> scenario_names;
  std::vector<std::vector<double>> model;  // model[scenario][speed]
};

inline ComparisonTable compare_methods(const std::vector<double>& speeds,
                                       const std::vector<BrakeQuery>& scenarios, double decel) {
  if (speeds.empty()) throw ParameterError("speed grid is empty");
  for (std::size_t i = 1; i < speeds.size(); ++i) {
    if (!(speeds[i] > speeds[i - 1])) throw ParameterError("speed grid must be ascending");
  }
  ComparisonTable table;
  table.speeds = speeds;
  for (double v : speeds) table.kinematic.push_back(predict_kinematic(v, decel));
  for (const auto& scenario : scenarios) {
    table.scenario_names.push_back(scenario.name);
    std::vector<double> row;
    row.reserve(speeds.size());
    for (double v : speeds) {
      BrakeQuery q = scenario;
      q.v0 = v;
      q.keep_trajectory = false;
      row.push_back(predict_model(q).braking_distance);
    }
    table.model.push_back(std::move(row));
  }
  return table;
}

/// CSV `v0,kinematic,<scenario names...>` with one row per speed.
inline void write_comparison(std::ostream& out, const ComparisonTable& table) {
  out << "v0,kinematic";
  for (const auto& name : table.scenario_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < table.speeds.size(); ++i) {
    out << csv::format_number(table.speeds[i]) << ',' << csv::format_number(table.kinematic[i]);
    for (const auto& row : table.model) out << ',' << csv::format_number(row[i]);
    out << '\n';
  }
}

}  // namespace tramsim
