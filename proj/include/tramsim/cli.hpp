#pragma once

// Command-line front end. Every subcommand reads an optional key/value config
// file and lets flags override it. Exit codes:
//
//   0  success
//   1  unexpected internal failure
//   2  usage, config, parse or parameter error
//   3  numerical failure (non-finite state)
//   4  braking scenario that never stops
//   5  identification failure (no usable data, unidentifiable fit)

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tramsim/config.hpp"
#include "tramsim/dynamics.hpp"
#include "tramsim/dynamics_io.hpp"
#include "tramsim/error.hpp"
#include "tramsim/estimator.hpp"
#include "tramsim/ident.hpp"
#include "tramsim/predictor.hpp"
#include "tramsim/synthetic.hpp"
#include "tramsim/telemetry.hpp"
#include "tramsim/track.hpp"

namespace tramsim::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitNonStopping = 4,
  kExitIdentification = 5,
};

namespace detail {

inline constexpr double kKmhPerMs = 3.6;

/// Keys any subcommand may read from the global config section.
inline const std::vector<std::string>& command_keys() {
  static const std::vector<std::string> keys = {
      "dt", "t_end", "v0", "notch", "a_dec", "theta", "x0", "schedule", "track", "telemetry",
      "sample_interval", "seed", "speeds", "scenarios", "jerk_psd", "accel_variance",
      "speed_variance", "position_variance", "off_track_gate", "bias_window", "accel_cutoff",
      "min_speed", "max_speed", "max_run", "min_run"};
  return keys;
}

inline std::string fixed(double value, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

/// Flag values and the config file behind them; flags win.
class Settings {
 public:
  void load(const std::string& path) {
    if (path.empty()) return;
    config_ = Config::load(path);
    base_dir_ = std::filesystem::path(path).parent_path();
  }

  const ConfigSection* global() const { return config_ ? &config_->global() : nullptr; }
  const Config* config() const { return config_ ? &*config_ : nullptr; }

  double number(const CLI::Option* flag, double flag_value, const std::string& key, double fallback) const {
    if (flag != nullptr && flag->count() > 0) return flag_value;
    if (auto v = global() ? global()->get_double(key) : std::nullopt) return *v;
    return fallback;
  }

  std::optional<double> number(const CLI::Option* flag, double flag_value, const std::string& key) const {
    if (flag != nullptr && flag->count() > 0) return flag_value;
    if (global()) return global()->get_double(key);
    return std::nullopt;
  }

  int integer(const CLI::Option* flag, int flag_value, const std::string& key, int fallback) const {
    if (flag != nullptr && flag->count() > 0) return flag_value;
    if (auto v = global() ? global()->get_int(key) : std::nullopt) return *v;
    return fallback;
  }

  /// File path from a flag, or from the config relative to the config file.
  std::string path(const CLI::Option* flag, const std::string& flag_value, const std::string& key) const {
    if (flag != nullptr && flag->count() > 0) return flag_value;
    if (auto v = global() ? global()->get(key) : std::nullopt) {
      const std::filesystem::path p(*v);
      return p.is_absolute() ? p.string() : (base_dir_ / p).string();
    }
    return {};
  }

  std::string text(const CLI::Option* flag, const std::string& flag_value, const std::string& key,
                   const std::string& fallback) const {
    if (flag != nullptr && flag->count() > 0) return flag_value;
    if (auto v = global() ? global()->get(key) : std::nullopt) return *v;
    return fallback;
  }

  /// Rejects misspelled keys once the subcommand has read what it needs.
  void finish() const {
    if (!config_) return;
    for (const auto& key : command_keys()) (void)global()->get(key);
    config_->require_all_used();
  }

 private:
  std::optional<Config> config_;
  std::filesystem::path base_dir_;
};

/// Options shared by every subcommand.
struct Common {
  std::string config;
  std::string output;
  double mass = 0.0;
  std::string adhesion;
  double dt = 1e-3;
  bool kmh = false;
  CLI::Option* mass_opt = nullptr;
  CLI::Option* adhesion_opt = nullptr;
  CLI::Option* dt_opt = nullptr;

  void add_to(CLI::App* app) {
    app->add_option("-c,--config", config, "Key/value parameter file")->check(CLI::ExistingFile);
    app->add_option("-o,--output", output, "Output CSV or report file (default: standard output)");
    mass_opt = app->add_option("--mass", mass, "Total tram mass [kg]");
    adhesion_opt = app->add_option("--adhesion", adhesion, "Rail condition: dry or wet");
    dt_opt = app->add_option("--dt", dt, "Integration step [s], at most 0.01");
    app->add_flag("--kmh", kmh, "Speeds given on the command line are in km/h");
  }

  double speed(double value) const { return kmh ? value / kKmhPerMs : value; }
};

struct Vehicle {
  TramParams params;
  AdhesionParams adhesion;
};

inline Vehicle read_vehicle(const Settings& settings, const Common& common) {
  Vehicle out{TramParams::tatra_t3(), AdhesionParams::dry()};
  if (const auto* g = settings.global()) {
    out.params = read_tram_params(*g, out.params);
    out.adhesion = read_adhesion(*g, out.adhesion);
  }
  if (common.mass_opt->count() > 0) out.params = out.params.with_total_mass(common.mass);
  if (common.adhesion_opt->count() > 0) out.adhesion = AdhesionParams::from_label(common.adhesion);
  out.params.validate();
  out.adhesion.validate();
  return out;
}

/// Writes to the --output file, or to `fallback` when none is given.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ConfigError("cannot write " + path);
    stream_ = file_.get();
  }
  std::ostream& stream() { return *stream_; }
  bool to_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

inline std::vector<double> parse_speed_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto field : csv::split(text)) {
    double v = 0.0;
    if (!csv::try_parse_double(field, v)) {
      throw ConfigError(what + ": '" + std::string(field) + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace detail

struct SimulateArgs {
  detail::Common common;
  std::string schedule;
  std::string track;
  std::string telemetry_out;
  double v0 = 0.0;
  double theta = 0.0;
  double x0 = 0.0;
  double t_end = 60.0;
  double sample_interval = 0.01;
  long seed = 1;
  bool stop_at_rest = false;
  bool no_gps = false;
  CLI::Option *schedule_opt, *track_opt, *v0_opt, *theta_opt, *x0_opt, *t_end_opt, *sample_opt,
      *seed_opt;
};

struct PredictArgs {
  detail::Common common;
  std::string track;
  std::string telemetry;
  std::string dump;
  double v0 = 0.0;
  int notch = Notch::kMin;
  double a_dec = kDefaultBrakeDeceleration;
  double theta = 0.0;
  double x0 = 0.0;
  double t_end = kDefaultStopGuard;
  CLI::Option *track_opt, *telemetry_opt, *v0_opt, *notch_opt, *a_dec_opt, *theta_opt, *x0_opt,
      *t_end_opt;
};

struct CompareArgs {
  detail::Common common;
  std::string scenarios;
  std::string speeds;
  double a_dec = kDefaultBrakeDeceleration;
  double t_end = kDefaultStopGuard;
  CLI::Option *scenarios_opt, *speeds_opt, *a_dec_opt, *t_end_opt;
};

struct EstimateArgs {
  detail::Common common;
  std::string telemetry;
  std::string track;
  double jerk_psd = 0.0;
  double accel_variance = 0.0;
  double speed_variance = 0.0;
  double position_variance = 0.0;
  double gate = 0.0;
  double bias_window = 0.0;
  double accel_cutoff = 0.0;
  CLI::Option *telemetry_opt, *track_opt, *jerk_opt, *accel_var_opt, *speed_var_opt, *pos_var_opt,
      *gate_opt, *bias_opt, *cutoff_opt;
};

struct IdentifyArgs {
  detail::Common common;
  std::string telemetry;
  std::string schedule;
  std::string max_run;
  std::string min_run;
  double theta = 0.0;
  double min_speed = 0.0;
  double max_speed = 0.0;
  bool fit_c = false;
  bool literature = false;
  bool no_polish = false;
  CLI::Option *telemetry_opt, *schedule_opt, *max_run_opt, *min_run_opt, *theta_opt, *min_speed_opt,
      *max_speed_opt;
};

inline int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  detail::Settings s;
  s.load(a.common.config);
  const auto vehicle = detail::read_vehicle(s, a.common);
  const std::string schedule_path = s.path(a.schedule_opt, a.schedule, "schedule");
  if (schedule_path.empty()) throw ConfigError("simulate needs a notch schedule (--schedule)");
  const NotchSchedule schedule = load_schedule(schedule_path);
  const std::string track_path = s.path(a.track_opt, a.track, "track");
  std::optional<TrackMap> map;
  if (!track_path.empty()) map = load_track(track_path);

  SimOptions options;
  options.dt = s.number(a.common.dt_opt, a.common.dt, "dt", 1e-3);
  options.t_end = s.number(a.t_end_opt, a.t_end, "t_end", 60.0);
  options.sample_interval = s.number(a.sample_opt, a.sample_interval, "sample_interval", 0.01);
  options.halt_on_idle_stop = a.stop_at_rest;
  const double v0 = a.v0_opt->count() > 0 ? a.common.speed(a.v0) : s.number(nullptr, 0.0, "v0", 0.0);
  const double x0 = s.number(a.x0_opt, a.x0, "x0", 0.0);
  const long seed = s.integer(a.seed_opt, static_cast<int>(a.seed), "seed", 1);
  s.finish();

  Trajectory traj;
  const DynState start = DynState::rolling(v0, vehicle.params, x0);
  if (map) {
    if (a.theta_opt->count() > 0) throw ConfigError("--theta and --track are mutually exclusive");
    const TrackMap* m = &*map;
    traj = simulate(start, schedule, [m](double x) { return m->slope_at_clamped(x); },
                    vehicle.params, vehicle.adhesion, options);
  } else {
    traj = simulate(start, schedule, s.number(a.theta_opt, a.theta, "theta", 0.0), vehicle.params,
                    vehicle.adhesion, options);
  }

  detail::Sink sink(a.common.output, out);
  write_trajectory(sink.stream(), traj);
  if (!a.telemetry_out.empty()) {
    SensorConfig sensors;
    sensors.seed = static_cast<std::uint64_t>(seed);
    sensors.gps = map.has_value() && !a.no_gps;
    auto file = detail::open_output(a.telemetry_out);
    write_telemetry(file, synthesize_telemetry(traj, map ? &*map : nullptr, sensors));
  }
  std::ostream& report = sink.to_file() ? out : err;
  report << "total distance: " << detail::fixed(traj.distance()) << " m over "
         << detail::fixed(traj.end_time) << " s (final speed " << detail::fixed(traj.back().state.v)
         << " m/s)\n";
  return kExitOk;
}

inline int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream& err) {
  detail::Settings s;
  s.load(a.common.config);
  const auto vehicle = detail::read_vehicle(s, a.common);
  const std::string track_path = s.path(a.track_opt, a.track, "track");
  const std::string telemetry_path = s.path(a.telemetry_opt, a.telemetry, "telemetry");
  std::optional<TrackMap> map;
  if (!track_path.empty()) map = load_track(track_path);

  BrakeQuery q;
  q.name = "predict";
  q.params = vehicle.params;
  q.adhesion = vehicle.adhesion;
  q.notch = Notch(s.integer(a.notch_opt, a.notch, "notch", Notch::kMin));
  q.dt = s.number(a.common.dt_opt, a.common.dt, "dt", 1e-3);
  q.t_end = s.number(a.t_end_opt, a.t_end, "t_end", kDefaultStopGuard);
  const double a_dec = s.number(a.a_dec_opt, a.a_dec, "a_dec", kDefaultBrakeDeceleration);
  std::optional<double> v0 = a.v0_opt->count() > 0 ? std::optional(a.common.speed(a.v0))
                                                   : s.number(nullptr, 0.0, "v0");
  std::optional<double> x0 = s.number(a.x0_opt, a.x0, "x0");
  const double theta = s.number(a.theta_opt, a.theta, "theta", 0.0);
  s.finish();

  if (!telemetry_path.empty()) {
    if (!map) throw ConfigError("predicting from telemetry needs a track (--track)");
    const Telemetry log = load_telemetry(telemetry_path);
    const EstimatorRun run = run_estimator(log, *map, NoiseConfig{},
                                           EstimatorState::prior(log.rows.empty() ? 0.0 : log.rows.front().t));
    if (run.rows.empty()) throw ConfigError(telemetry_path + ": no usable measurements for the estimator");
    const auto& last = run.rows.back().state;
    if (!v0) v0 = std::max(0.0, last.v);
    if (!x0) x0 = std::clamp(last.x, 0.0, map->length());
    err << "estimated state at t = " << detail::fixed(last.t) << " s: x = " << detail::fixed(last.x)
        << " m, v = " << detail::fixed(last.v) << " m/s\n";
  }
  if (!v0) throw ConfigError("predict needs --v0 or a telemetry log");
  q.v0 = *v0;
  if (map) {
    if (a.theta_opt->count() > 0) throw ConfigError("--theta and --track are mutually exclusive");
    q.slope = TrackSlope{&*map, x0.value_or(0.0)};
  } else {
    q.slope = theta;
  }
  q.keep_trajectory = !a.dump.empty();

  const BrakeResult result = predict_model(q);
  const double kinematic = predict_kinematic(q.v0, a_dec);
  detail::Sink sink(a.common.output, out);
  auto& o = sink.stream();
  o << "model distance: " << detail::fixed(result.braking_distance) << " m\n";
  o << "kinematic distance: " << detail::fixed(kinematic) << " m\n";
  o << "difference: " << detail::fixed(result.braking_distance - kinematic) << " m\n";
  o << "stop time: " << detail::fixed(result.stop_time) << " s\n";
  if (result.trajectory) {
    auto file = detail::open_output(a.dump);
    write_trajectory(file, *result.trajectory);
  }
  return kExitOk;
}

inline std::vector<BrakeQuery> read_scenarios(const Config& config, const TramParams& base_params,
                                              const AdhesionParams& base_adhesion) {
  std::vector<BrakeQuery> out;
  for (const ConfigSection* section : config.sections_with_prefix("scenario")) {
    BrakeQuery q;
    q.name = std::string(csv::trim(std::string_view(section->name()).substr(9)));
    if (q.name.find_first_of(", \t") != std::string::npos) {
      throw ConfigError("scenario name '" + q.name + "' must not contain commas or spaces");
    }
    q.params = read_tram_params(*section, base_params);
    q.adhesion = read_adhesion(*section, base_adhesion);
    q.notch = Notch(section->get_int("notch").value_or(Notch::kMin));
    q.slope = section->get_double("theta").value_or(0.0);
    out.push_back(std::move(q));
  }
  if (out.empty()) throw ConfigError("no [scenario NAME] sections found");
  return out;
}

inline int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  detail::Settings s;
  s.load(a.common.config);
  const auto vehicle = detail::read_vehicle(s, a.common);
  const std::string scenario_path = s.path(a.scenarios_opt, a.scenarios, "scenarios");
  const double a_dec = s.number(a.a_dec_opt, a.a_dec, "a_dec", kDefaultBrakeDeceleration);
  const double dt = s.number(a.common.dt_opt, a.common.dt, "dt", 1e-3);
  const double t_end = s.number(a.t_end_opt, a.t_end, "t_end", kDefaultStopGuard);
  std::vector<double> speeds;
  if (a.speeds_opt->count() > 0) {
    speeds = detail::parse_speed_list(a.speeds, "--speeds");
    for (double& v : speeds) v = a.common.speed(v);
  } else if (auto text = s.global() ? s.global()->get("speeds") : std::nullopt) {
    speeds = detail::parse_speed_list(*text, "speeds");
  } else {
    for (int v = 1; v <= 20; ++v) speeds.push_back(v);
  }
  s.finish();

  std::vector<BrakeQuery> scenarios;
  if (scenario_path.empty()) {
    scenarios = standard_brake_scenarios(vehicle.params);
  } else {
    const Config file = Config::load(scenario_path);
    const auto base = read_tram_params(file.global(), vehicle.params);
    const auto base_adh = read_adhesion(file.global(), vehicle.adhesion);
    scenarios = read_scenarios(file, base, base_adh);
    file.require_all_used();
  }
  for (auto& q : scenarios) {
    q.dt = dt;
    q.t_end = t_end;
  }

  const ComparisonTable table = compare_methods(speeds, scenarios, a_dec);
  detail::Sink sink(a.common.output, out);
  write_comparison(sink.stream(), table);
  std::ostream& report = sink.to_file() ? out : err;
  report << "compared " << scenarios.size() << " scenarios at " << speeds.size() << " speeds\n";
  return kExitOk;
}

inline int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  detail::Settings s;
  s.load(a.common.config);
  const std::string telemetry_path = s.path(a.telemetry_opt, a.telemetry, "telemetry");
  const std::string track_path = s.path(a.track_opt, a.track, "track");
  if (telemetry_path.empty()) throw ConfigError("estimate needs --telemetry");
  if (track_path.empty()) throw ConfigError("estimate needs --track");
  NoiseConfig noise;
  noise.jerk_psd = s.number(a.jerk_opt, a.jerk_psd, "jerk_psd", noise.jerk_psd);
  noise.accel_variance = s.number(a.accel_var_opt, a.accel_variance, "accel_variance", noise.accel_variance);
  noise.speed_variance = s.number(a.speed_var_opt, a.speed_variance, "speed_variance", noise.speed_variance);
  noise.position_variance =
      s.number(a.pos_var_opt, a.position_variance, "position_variance", noise.position_variance);
  EstimatorOptions options;
  options.off_track_gate = s.number(a.gate_opt, a.gate, "off_track_gate", options.off_track_gate);
  options.bias_window = s.number(a.bias_opt, a.bias_window, "bias_window", options.bias_window);
  options.accel_cutoff = s.number(a.cutoff_opt, a.accel_cutoff, "accel_cutoff", options.accel_cutoff);
  if (const auto* g = s.global()) {
    // Vehicle keys are accepted so one config can serve every subcommand.
    (void)read_tram_params(*g);
    (void)read_adhesion(*g);
  }
  s.finish();
  noise.validate();

  const TrackMap map = load_track(track_path);
  const Telemetry log = load_telemetry(telemetry_path);

  // Prior centred on the first usable fix and speed reading.
  EstimatorState prior = EstimatorState::prior(log.rows.empty() ? 0.0 : log.rows.front().t);
  for (const auto& row : log.rows) {
    if (row.kind != MeasurementKind::gps) continue;
    try {
      prior.x = map.project({row.value1, row.value2}, options.off_track_gate).chainage;
      break;
    } catch (const OffTrackError&) {
    }
  }
  for (const auto& row : log.rows) {
    if (row.kind == MeasurementKind::speed) {
      prior.v = row.value1;
      break;
    }
  }

  const EstimatorRun run = run_estimator(log, map, noise, prior, options);
  detail::Sink sink(a.common.output, out);
  write_estimates(sink.stream(), run);
  std::ostream& report = sink.to_file() ? out : err;
  report << "measurements applied: " << run.summary.applied << ", skipped: " << run.summary.skipped()
         << " (off-track " << run.summary.off_track << ", rejected " << run.summary.rejected
         << "), accel bias " << detail::fixed(run.summary.accel_bias, 4) << " m/s^2\n";
  return kExitOk;
}

inline int cmd_identify(const IdentifyArgs& a, std::ostream& out, std::ostream&) {
  detail::Settings s;
  s.load(a.common.config);
  const auto vehicle = detail::read_vehicle(s, a.common);
  const std::string telemetry_path = s.path(a.telemetry_opt, a.telemetry, "telemetry");
  const std::string schedule_path = s.path(a.schedule_opt, a.schedule, "schedule");
  const std::string max_path = s.path(a.max_run_opt, a.max_run, "max_run");
  const std::string min_path = s.path(a.min_run_opt, a.min_run, "min_run");
  const double theta = s.number(a.theta_opt, a.theta, "theta", 0.0);
  ResistanceFitOptions fit_options;
  fit_options.fix_c_zero = !a.fit_c;
  fit_options.min_speed = s.number(a.min_speed_opt, a.min_speed, "min_speed", fit_options.min_speed);
  fit_options.max_speed = s.number(a.max_speed_opt, a.max_speed, "max_speed", fit_options.max_speed);
  if (a.common.kmh) {
    if (a.min_speed_opt->count() > 0) fit_options.min_speed = a.common.speed(a.min_speed);
    if (a.max_speed_opt->count() > 0) fit_options.max_speed = a.common.speed(a.max_speed);
  }
  fit_options.sim_dt = s.number(a.common.dt_opt, a.common.dt, "dt", 1e-3);
  if (a.no_polish) fit_options.polish_iterations = 0;
  s.finish();

  if (telemetry_path.empty() && max_path.empty() && min_path.empty()) {
    throw ConfigError("identify needs --telemetry and/or --max-run/--min-run");
  }
  if (max_path.empty() != min_path.empty()) {
    throw ConfigError("traction gains need both --max-run and --min-run");
  }

  detail::Sink sink(a.common.output, out);
  auto& o = sink.stream();
  if (!telemetry_path.empty()) {
    const Telemetry log = load_telemetry(telemetry_path);
    std::optional<NotchSchedule> notch_log;
    if (!schedule_path.empty()) notch_log = load_schedule(schedule_path);
    const auto extraction = extract_coastdowns(log, vehicle.params.total_mass(), theta,
                                               notch_log ? &*notch_log : nullptr);
    if (extraction.segments.empty()) {
      throw IdentifiabilityError(telemetry_path + ": " + extraction.diagnostic);
    }
    const FitResult fit = fit_resistance(extraction.segments, vehicle.params, vehicle.adhesion, fit_options);
    std::vector<FormResidual> literature;
    if (a.literature) {
      literature.push_back({fit.coeffs().form,
                            trajectory_residual_rms(extraction.segments, fit.coeffs(), vehicle.params,
                                                    vehicle.adhesion, fit_options)});
      for (const auto& r : literature_residuals(extraction.segments, vehicle.params, vehicle.adhesion,
                                                fit_options)) {
        literature.push_back(r);
      }
    }
    o << "coastdown_segments = " << extraction.segments.size() << '\n';
    write_fit_report(o, fit, literature);
  }
  if (!max_path.empty()) {
    std::ifstream max_in(max_path);
    if (!max_in) throw ParseError(max_path, 0, "cannot open acceleration run");
    std::ifstream min_in(min_path);
    if (!min_in) throw ParseError(min_path, 0, "cannot open acceleration run");
    AccelRun max_run = read_accel_run(max_in, max_path, Notch::kMax);
    AccelRun min_run = read_accel_run(min_in, min_path, Notch::kMin);
    max_run.theta = min_run.theta = theta;
    TractionFitOptions options;
    options.sim_dt = fit_options.sim_dt;
    const TractionFit gains = fit_traction_gains(max_run, min_run, vehicle.params, vehicle.adhesion, options);
    o << "traction_gain_accel = " << csv::format_number(gains.accel.gain) << '\n';
    o << "traction_gain_brake = " << csv::format_number(gains.brake.gain) << '\n';
    o << "accel_plateau_mean = " << csv::format_number(gains.accel.plateau.mean_accel) << '\n';
    o << "brake_plateau_mean = " << csv::format_number(gains.brake.plateau.mean_accel) << '\n';
  }
  return kExitOk;
}

/// Parses `args` (without the program name) and runs one subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tram longitudinal dynamics: simulation, braking prediction, state estimation and "
               "parameter identification"};
  app.name("tramsim");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a notch schedule and write the trajectory CSV");
  sim.common.add_to(simulate_cmd);
  sim.schedule_opt = simulate_cmd->add_option("--schedule", sim.schedule, "Notch schedule CSV 't,notch'");
  sim.track_opt = simulate_cmd->add_option("--track", sim.track, "Track CSV providing the slope");
  sim.v0_opt = simulate_cmd->add_option("--v0", sim.v0, "Initial speed [m/s]");
  sim.theta_opt = simulate_cmd->add_option("--theta", sim.theta, "Constant slope [rad]");
  sim.x0_opt = simulate_cmd->add_option("--x0", sim.x0, "Initial chainage [m]");
  sim.t_end_opt = simulate_cmd->add_option("--t-end", sim.t_end, "Simulated duration [s]");
  sim.sample_opt = simulate_cmd->add_option("--sample-interval", sim.sample_interval,
                                            "Trajectory output interval [s], 0 for every step");
  simulate_cmd->add_flag("--stop-at-rest", sim.stop_at_rest, "End the run when the tram comes to rest");
  simulate_cmd->add_option("--telemetry-out", sim.telemetry_out, "Also write synthetic sensor telemetry");
  sim.seed_opt = simulate_cmd->add_option("--seed", sim.seed, "Seed for synthetic sensor noise");
  simulate_cmd->add_flag("--no-gps", sim.no_gps, "Omit GNSS position fixes from synthetic telemetry");

  PredictArgs pred;
  auto* predict_cmd = app.add_subcommand("predict", "Model-based and kinematic braking distance");
  pred.common.add_to(predict_cmd);
  pred.v0_opt = predict_cmd->add_option("--v0", pred.v0, "Speed when braking starts [m/s]");
  pred.notch_opt = predict_cmd->add_option("--notch", pred.notch, "Braking notch, -7 to 0");
  pred.a_dec_opt = predict_cmd->add_option("--a-dec", pred.a_dec, "Kinematic deceleration [m/s^2]");
  pred.theta_opt = predict_cmd->add_option("--theta", pred.theta, "Constant slope [rad]");
  pred.track_opt = predict_cmd->add_option("--track", pred.track, "Track CSV providing the slope");
  pred.x0_opt = predict_cmd->add_option("--x0", pred.x0, "Chainage where braking starts [m]");
  pred.telemetry_opt = predict_cmd->add_option("--telemetry", pred.telemetry,
                                               "Estimate v0 and x0 from this log (needs --track)");
  pred.t_end_opt = predict_cmd->add_option("--t-end", pred.t_end, "Give up after this long [s]");
  predict_cmd->add_option("--dump", pred.dump, "Write the braking trajectory CSV");

  CompareArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Braking distance table over a speed grid");
  cmp.common.add_to(compare_cmd);
  cmp.scenarios_opt = compare_cmd->add_option("--scenarios", cmp.scenarios,
                                              "Config file with [scenario NAME] sections");
  cmp.speeds_opt = compare_cmd->add_option("--speeds", cmp.speeds, "Comma-separated initial speeds [m/s]");
  cmp.a_dec_opt = compare_cmd->add_option("--a-dec", cmp.a_dec, "Kinematic deceleration [m/s^2]");
  cmp.t_end_opt = compare_cmd->add_option("--t-end", cmp.t_end, "Give up after this long [s]");

  EstimateArgs est;
  auto* estimate_cmd = app.add_subcommand("estimate", "Fuse a telemetry log into along-track estimates");
  est.common.add_to(estimate_cmd);
  est.telemetry_opt = estimate_cmd->add_option("--telemetry", est.telemetry, "Telemetry CSV 't,kind,value1,value2'");
  est.track_opt = estimate_cmd->add_option("--track", est.track, "Track CSV 'lat,lon,slope_rad'");
  est.jerk_opt = estimate_cmd->add_option("--jerk-psd", est.jerk_psd, "Process noise [(m/s^3)^2/Hz]");
  est.accel_var_opt = estimate_cmd->add_option("--accel-var", est.accel_variance, "Accelerometer variance");
  est.speed_var_opt = estimate_cmd->add_option("--speed-var", est.speed_variance, "GNSS speed variance");
  est.pos_var_opt = estimate_cmd->add_option("--pos-var", est.position_variance, "Map-matched position variance");
  est.gate_opt = estimate_cmd->add_option("--gate", est.gate, "Off-track rejection distance [m]");
  est.bias_opt = estimate_cmd->add_option("--bias-window", est.bias_window,
                                          "Standstill seconds at log start used for accel bias");
  est.cutoff_opt = estimate_cmd->add_option("--accel-cutoff", est.accel_cutoff,
                                            "Causal accel low-pass cutoff [Hz], 0 disables");

  IdentifyArgs idf;
  auto* identify_cmd = app.add_subcommand("identify", "Fit resistance coefficients and torque gains");
  idf.common.add_to(identify_cmd);
  idf.telemetry_opt = identify_cmd->add_option("--telemetry", idf.telemetry, "Telemetry CSV with coast-downs");
  idf.schedule_opt = identify_cmd->add_option("--schedule", idf.schedule, "Notch log marking idle intervals");
  idf.max_run_opt = identify_cmd->add_option("--max-run", idf.max_run, "Full-traction run CSV with t,v,accel");
  idf.min_run_opt = identify_cmd->add_option("--min-run", idf.min_run, "Full-brake run CSV with t,v,accel");
  idf.theta_opt = identify_cmd->add_option("--theta", idf.theta, "Slope during the runs [rad]");
  idf.min_speed_opt = identify_cmd->add_option("--min-speed", idf.min_speed, "Lowest speed used [m/s]");
  idf.max_speed_opt = identify_cmd->add_option("--max-speed", idf.max_speed, "Highest speed used [m/s]");
  identify_cmd->add_flag("--fit-c", idf.fit_c, "Also fit the quadratic resistance term");
  identify_cmd->add_flag("--literature", idf.literature, "Compare against the literature resistance forms");
  identify_cmd->add_flag("--no-polish", idf.no_polish, "Skip trajectory matching after the regression");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "tramsim: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(sim, out, err);
    if (*predict_cmd) return cmd_predict(pred, out, err);
    if (*compare_cmd) return cmd_compare(cmp, out, err);
    if (*estimate_cmd) return cmd_estimate(est, out, err);
    if (*identify_cmd) return cmd_identify(idf, out, err);
  } catch (const NonStoppingError& e) {
    err << "tramsim: " << e.what() << '\n';
    return kExitNonStopping;
  } catch (const NumericalError& e) {
    err << "tramsim: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IdentifiabilityError& e) {
    err << "tramsim: identification failed: " << e.what() << '\n';
    return kExitIdentification;
  } catch (const Error& e) {
    err << "tramsim: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "tramsim: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace tramsim::cli
