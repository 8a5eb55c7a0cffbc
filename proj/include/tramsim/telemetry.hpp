#pragma once

// Telemetry log: CSV `t,kind,value1,value2` with kind in {accel, speed, gps}.
// accel [m/s^2] and speed [m/s] use value1; gps rows carry lat/lon [deg] in
// value1/value2. Rows must be sorted by time.

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tramsim/csv.hpp"
#include "tramsim/error.hpp"

namespace tramsim {

enum class MeasurementKind { accel, speed, gps };

inline std::string_view to_string(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::accel: return "accel";
    case MeasurementKind::speed: return "speed";
    case MeasurementKind::gps: return "gps";
  }
  return "?";
}

struct TelemetryRow {
  double t = 0.0;
  MeasurementKind kind = MeasurementKind::accel;
  double value1 = 0.0;
  double value2 = 0.0;
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> value;
  std::size_t size() const noexcept { return t.size(); }
  bool empty() const noexcept { return t.empty(); }
};

struct Telemetry {
  std::vector<TelemetryRow> rows;

  TimeSeries series(MeasurementKind kind) const {
    TimeSeries out;
    for (const auto& r : rows) {
      if (r.kind != kind) continue;
      out.t.push_back(r.t);
      out.value.push_back(r.value1);
    }
    return out;
  }

  void add(double t, MeasurementKind kind, double v1, double v2 = 0.0) {
    rows.push_back({t, kind, v1, v2});
  }

  /// Stable sort by time, keeping the relative order of simultaneous rows.
  void sort_by_time();
};

inline void Telemetry::sort_by_time() {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const TelemetryRow& a, const TelemetryRow& b) { return a.t < b.t; });
}

inline Telemetry read_telemetry(std::istream& in, const std::string& source) {
  Telemetry log;
  csv::for_each_row(in, "t", [&](const auto& fields, std::size_t line) {
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError(source, line, "expected 't,kind,value1,value2'");
    }
    TelemetryRow row;
    row.t = csv::parse_double(fields[0], source, line, "time");
    const std::string_view kind = fields[1];
    if (kind == "accel") {
      row.kind = MeasurementKind::accel;
    } else if (kind == "speed") {
      row.kind = MeasurementKind::speed;
    } else if (kind == "gps") {
      row.kind = MeasurementKind::gps;
    } else {
      throw ParseError(source, line, "unknown measurement kind '" + std::string(kind) + "'");
    }
    row.value1 = csv::parse_double(fields[2], source, line, "value1");
    const bool has_second = fields.size() == 4 && !fields[3].empty();
    if (row.kind == MeasurementKind::gps) {
      if (!has_second) throw ParseError(source, line, "gps row needs lat and lon");
    }
    if (has_second) row.value2 = csv::parse_double(fields[3], source, line, "value2");
    if (!log.rows.empty() && row.t < log.rows.back().t) {
      throw ParseError(source, line, "timestamps must be non-decreasing");
    }
    log.rows.push_back(row);
  });
  return log;
}

inline Telemetry load_telemetry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open telemetry file");
  return read_telemetry(in, path);
}

inline void write_telemetry(std::ostream& out, const Telemetry& log) {
  out << "t,kind,value1,value2\n";
  for (const auto& r : log.rows) {
    out << csv::format_number(r.t) << ',' << to_string(r.kind) << ',' << csv::format_number(r.value1)
        << ',';
    if (r.kind == MeasurementKind::gps) out << csv::format_number(r.value2);
    out << '\n';
  }
}

}  // namespace tramsim
