#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "tramsim/csv.hpp"
#include "tramsim/dynamics.hpp"

namespace tramsim {

inline constexpr const char* kTrajectoryHeader = "t,x,v,omega,T_mot,accel";

/// Schedule CSV `t,notch`; the first row must start at t = 0.
inline NotchSchedule read_schedule(std::istream& in, const std::string& source) {
  std::vector<NotchSchedule::Entry> entries;
  csv::for_each_row(in, "t", [&](const auto& fields, std::size_t line) {
    if (fields.size() != 2) throw ParseError(source, line, "expected 2 fields 't,notch'");
    const double t = csv::parse_double(fields[0], source, line, "time");
    const int p = csv::parse_int(fields[1], source, line, "notch");
    if (p < Notch::kMin || p > Notch::kMax) {
      throw ParseError(source, line, "notch " + std::to_string(p) + " outside [-7, 7]");
    }
    if (entries.empty() && t != 0.0) throw ParseError(source, line, "schedule must start at t = 0");
    if (!entries.empty() && !(t > entries.back().start)) {
      throw ParseError(source, line, "schedule times must be strictly increasing");
    }
    entries.push_back({t, Notch(p)});
  });
  if (entries.empty()) throw ParseError(source, 0, "schedule is empty");
  return NotchSchedule(std::move(entries));
}

inline NotchSchedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open schedule file");
  return read_schedule(in, path);
}

inline void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << kTrajectoryHeader << '\n';
  for (const auto& s : traj.samples) {
    csv::write_row(out, {s.t, s.state.x, s.state.v, s.state.omega, s.state.torque, s.accel});
  }
}

}  // namespace tramsim
