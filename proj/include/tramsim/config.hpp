#pragma once

// Key/value configuration files:
//
//   # comment
//   mass = 17000          # kg
//   adhesion = dry
//   [scenario loaded_dry]
//   mass = 25000
//
// Keys before the first `[section]` belong to the unnamed global section.
// Every key must be consumed by some reader; leftovers are reported so that
// misspelled keys do not silently fall back to defaults.

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tramsim/csv.hpp"
#include "tramsim/dynamics.hpp"
#include "tramsim/error.hpp"

namespace tramsim {

class ConfigSection {
 public:
  ConfigSection() = default;
  ConfigSection(std::string name, std::string source) : name_(std::move(name)), source_(std::move(source)) {}

  const std::string& name() const noexcept { return name_; }

  void set(const std::string& key, std::string value, std::size_t line) {
    if (values_.count(key)) {
      throw ParseError(source_, line, "duplicate key '" + key + "'");
    }
    values_[key] = {std::move(value), line};
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second.text;
  }

  std::optional<double> get_double(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    double value = 0.0;
    if (!csv::try_parse_double(it->second.text, value)) {
      throw ConfigError(location(it->second.line) + ": key '" + key + "' expects a number, got '" +
                        it->second.text + "'");
    }
    return value;
  }

  std::optional<int> get_int(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    try {
      return csv::parse_int(it->second.text, source_, it->second.line, key);
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
  }

  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) out.push_back(location(value.line) + ": unknown key '" + key + "'");
    }
    return out;
  }

 private:
  struct Value {
    std::string text;
    std::size_t line = 0;
  };

  std::string location(std::size_t line) const { return source_ + ":" + std::to_string(line); }

  std::string name_;
  std::string source_;
  std::map<std::string, Value> values_;
  mutable std::set<std::string> used_;
};

class Config {
 public:
  static Config parse(std::istream& in, const std::string& source) {
    Config cfg;
    cfg.sections_.emplace_back("", source);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string_view line = raw;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = csv::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ParseError(source, line_no, "unterminated section header");
        const auto name = csv::trim(line.substr(1, line.size() - 2));
        if (name.empty()) throw ParseError(source, line_no, "empty section name");
        cfg.sections_.emplace_back(std::string(name), source);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ParseError(source, line_no, "expected 'key = value'");
      }
      const auto key = csv::trim(line.substr(0, eq));
      const auto value = csv::trim(line.substr(eq + 1));
      if (key.empty()) throw ParseError(source, line_no, "missing key before '='");
      cfg.sections_.back().set(std::string(key), std::string(value), line_no);
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open config file");
    return parse(in, path);
  }

  static Config from_string(const std::string& text, const std::string& source = "<string>") {
    std::istringstream in(text);
    return parse(in, source);
  }

  const ConfigSection& global() const { return sections_.front(); }

  /// Named sections whose name starts with `prefix` followed by a space, in file order.
  std::vector<const ConfigSection*> sections_with_prefix(std::string_view prefix) const {
    std::vector<const ConfigSection*> out;
    for (std::size_t i = 1; i < sections_.size(); ++i) {
      const std::string& name = sections_[i].name();
      if (name.size() > prefix.size() && name.compare(0, prefix.size(), prefix) == 0 &&
          name[prefix.size()] == ' ') {
        out.push_back(&sections_[i]);
      }
    }
    return out;
  }

  /// Throws ConfigError listing every key nobody read.
  void require_all_used() const {
    std::string message;
    for (const auto& section : sections_) {
      for (const auto& entry : section.unused_keys()) {
        message += (message.empty() ? "" : "\n") + entry;
      }
    }
    if (!message.empty()) throw ConfigError(message);
  }

 private:
  std::vector<ConfigSection> sections_;
};

/// Reads vehicle keys from `section` on top of `base`.
///
/// Keys (SI units): curb_mass [kg], payload_mass [kg], mass [kg, total; sets
/// the payload], wheel_radius [m], wheel_mass [kg], wheel_inertia [kg m^2,
/// defaults to the homogeneous-disk value], power_limit [W],
/// traction_gain_accel / traction_gain_brake [N m per notch],
/// torque_lag_rate [1/s], gravity [m/s^2], resistance_form, resistance_a0
/// [N/kg], resistance_b [N s/m], resistance_c [N s^2/m^2].
inline TramParams read_tram_params(const ConfigSection& section, TramParams base = {}) {
  TramParams p = base;
  if (auto v = section.get_double("curb_mass")) p.curb_mass = *v;
  if (auto v = section.get_double("payload_mass")) p.payload_mass = *v;
  if (auto v = section.get_double("mass")) {
    if (section.has("payload_mass")) {
      throw ConfigError("section '" + section.name() + "': set either mass or payload_mass, not both");
    }
    try {
      p = p.with_total_mass(*v);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }
  const bool wheel_changed = section.has("wheel_radius") || section.has("wheel_mass");
  if (auto v = section.get_double("wheel_radius")) p.wheel_radius = *v;
  if (auto v = section.get_double("wheel_mass")) p.wheel_mass = *v;
  if (auto v = section.get_double("wheel_inertia")) {
    p.wheel_inertia = *v;
  } else if (wheel_changed) {
    p.wheel_inertia = TramParams::disk_inertia(p.wheel_mass, p.wheel_radius);
  }
  if (auto v = section.get_double("power_limit")) p.power_limit = *v;
  if (auto v = section.get_double("traction_gain_accel")) p.traction_gain_accel = *v;
  if (auto v = section.get_double("traction_gain_brake")) p.traction_gain_brake = *v;
  if (auto v = section.get_double("torque_lag_rate")) p.torque_lag_rate = *v;
  if (auto v = section.get_double("gravity")) p.gravity = *v;
  if (auto v = section.get("resistance_form")) {
    try {
      p.resistance.form = parse_resistance_form(*v);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }
  if (auto v = section.get_double("resistance_a0")) p.resistance.a0 = *v;
  if (auto v = section.get_double("resistance_b")) p.resistance.b = *v;
  if (auto v = section.get_double("resistance_c")) p.resistance.c = *v;
  try {
    p.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("invalid vehicle parameters: ") + e.what());
  }
  return p;
}

/// Keys: adhesion (dry | wet | any label when the four coefficients are
/// given), adhesion_a [s/m], adhesion_b [s/m], adhesion_c, adhesion_d.
inline AdhesionParams read_adhesion(const ConfigSection& section, AdhesionParams base = AdhesionParams::dry()) {
  AdhesionParams adh = base;
  const bool custom = section.has("adhesion_a") || section.has("adhesion_b") ||
                      section.has("adhesion_c") || section.has("adhesion_d");
  if (auto label = section.get("adhesion")) {
    if (*label == "dry" || *label == "wet") {
      adh = AdhesionParams::from_label(*label);
    } else if (!custom) {
      throw ConfigError("unknown adhesion condition '" + *label +
                        "' (use dry, wet, or give adhesion_a..adhesion_d)");
    }
    adh.label = *label;
  } else if (custom) {
    adh.label = "custom";
  }
  if (auto v = section.get_double("adhesion_a")) adh.a = *v;
  if (auto v = section.get_double("adhesion_b")) adh.b = *v;
  if (auto v = section.get_double("adhesion_c")) adh.c = *v;
  if (auto v = section.get_double("adhesion_d")) adh.d = *v;
  try {
    adh.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("invalid adhesion parameters: ") + e.what());
  }
  return adh;
}

}  // namespace tramsim
