#include "ventmon/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "ventmon/calibration.hpp"
#include "ventmon/errors.hpp"
#include "ventmon/golden.hpp"
#include "ventmon/replay.hpp"
#include "ventmon/scenario_file.hpp"
#include "ventmon/trace_io.hpp"
#include "ventmon/waveform_sim.hpp"

namespace ventmon::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct MonitorFlags {
  double alpha_attack = kDefaultAlphaAttack;
  double alpha_ref_rate = kReferenceRate;
  double alpha_smooth = kDefaultAlphaSmooth;
  std::optional<double> alpha_release;
};

struct Options {
  std::string golden;
  std::string scenario_file;
  std::string trace_file;
  std::string out_dir;
  std::string manifest;
  double rate = kReferenceRate;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> duration;
  std::vector<double> rates{5.0, 10.0, 20.0, 50.0};
  double peep = 15.0;
  bool muted = false;
  AlarmConfig alarm;
  MonitorFlags monitor;
};

void add_alarm_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--p-max", o.alarm.p_max, "High-pressure threshold (cm H2O)")->capture_default_str();
  cmd->add_option("--p-min", o.alarm.p_min, "Low-pressure threshold (cm H2O)")->capture_default_str();
  cmd->add_option("--rr-max", o.alarm.rr_max, "High-rate threshold (breaths/min)")->capture_default_str();
  cmd->add_option("--rr-min", o.alarm.rr_min, "Low-rate threshold (breaths/min)")->capture_default_str();
  cmd->add_option("--t-max", o.alarm.t_max, "Noncycling time threshold (s)")->capture_default_str();
  cmd->add_option("--r-min", o.alarm.r_min, "Noncycling envelope-ratio threshold")->capture_default_str();
  cmd->add_option("--r-nom", o.alarm.r_nom, "Nominal PIP-to-PEEP ratio of the ventilator")->capture_default_str();
  cmd->add_option("--d-min", o.alarm.d_min, "Noncycling envelope-difference threshold (cm H2O)")
      ->capture_default_str();
  cmd->add_flag("--mute", o.muted, "Suppress alarm events (conditions are still evaluated)");
}

void add_monitor_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--alpha-attack", o.monitor.alpha_attack, "Attack coefficient at --alpha-ref-rate")
      ->capture_default_str();
  cmd->add_option("--alpha-ref-rate", o.monitor.alpha_ref_rate, "Rate at which --alpha-attack is given")
      ->capture_default_str();
  cmd->add_option("--alpha-smooth", o.monitor.alpha_smooth, "Per-breath metric smoothing coefficient")
      ->capture_default_str();
  cmd->add_option("--alpha-release", o.monitor.alpha_release,
                  "Raw release coefficient (default: calibrated from r-min, r-nom, t-max)");
}

void add_source_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--golden", o.golden, "Named golden scenario");
  cmd->add_option("--scenario", o.scenario_file, "Scenario description file");
  cmd->add_option("--seed", o.seed, "Noise generator seed")->capture_default_str();
  cmd->add_option("--duration", o.duration, "Override scenario duration (s)");
}

AlarmConfig resolved_alarm(const Options& o) {
  AlarmConfig a = o.alarm;
  a.enabled = !o.muted;
  a.validate();
  return a;
}

MonitorConfig resolved_monitor(const Options& o, double sample_rate, const AlarmConfig& alarm) {
  MonitorConfig cfg = resolve_monitor_config(sample_rate, alarm, o.monitor.alpha_attack,
                                             o.monitor.alpha_ref_rate, o.monitor.alpha_smooth);
  if (o.monitor.alpha_release) {
    cfg.alpha_release = *o.monitor.alpha_release;
    cfg.validate();
  }
  return cfg;
}

json to_json(const MonitorConfig& m) {
  return {{"sample_rate", m.sample_rate},
          {"alpha_attack", m.alpha_attack},
          {"alpha_release", m.alpha_release},
          {"alpha_smooth", m.alpha_smooth}};
}

json to_json(const AlarmConfig& a) {
  return {{"p_max", a.p_max}, {"p_min", a.p_min}, {"rr_max", a.rr_max}, {"rr_min", a.rr_min},
          {"t_max", a.t_max}, {"r_min", a.r_min}, {"d_min", a.d_min},   {"r_nom", a.r_nom},
          {"enabled", a.enabled}};
}

// Arguments to store in the manifest: input paths made absolute, --out dropped.
std::vector<std::string> manifest_args(const std::vector<std::string>& args) {
  static const std::set<std::string> path_flags{"--trace", "--scenario"};
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    const auto eq = a.find('=');
    const std::string flag = a.substr(0, eq);
    if (flag == "--out") {
      if (eq == std::string::npos) ++i;
      continue;
    }
    if (path_flags.count(flag)) {
      if (eq != std::string::npos) {
        kept.push_back(flag + "=" + fs::absolute(a.substr(eq + 1)).lexically_normal().string());
      } else if (i + 1 < args.size()) {
        kept.push_back(a);
        kept.push_back(fs::absolute(args[++i]).lexically_normal().string());
      } else {
        kept.push_back(a);
      }
      continue;
    }
    kept.push_back(a);
  }
  return kept;
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory '" + p.string() + "': " + ec.message());
  return p;
}

template <typename Writer>
void write_csv(const fs::path& path, Writer&& writer) {
  std::ostringstream ss;
  writer(ss);
  write_file_atomic(path, ss.str());
}

void write_manifest(const fs::path& dir, json manifest, const std::vector<std::string>& args) {
  manifest["args"] = manifest_args(args);
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::pair<Scenario, std::string> load_scenario_source(const Options& o) {
  if (!o.golden.empty() && !o.scenario_file.empty()) {
    throw ConfigError("give either --golden or --scenario, not both");
  }
  Scenario sc;
  std::string label;
  if (!o.golden.empty()) {
    sc = find_golden(o.golden).scenario;
    label = "golden:" + o.golden;
  } else if (!o.scenario_file.empty()) {
    sc = load_scenario(o.scenario_file);
    label = "file:" + fs::absolute(o.scenario_file).lexically_normal().string();
  } else {
    throw ConfigError("a scenario is required: --golden <name> or --scenario <file>");
  }
  if (o.duration) {
    sc.duration = *o.duration;
    // A shortened run drops events that would fall outside it.
    std::erase_if(sc.settings_timeline, [&](const SettingsChange& c) { return c.time > sc.duration && c.time != 0.0; });
    std::erase_if(sc.faults, [&](const Fault& f) { return f.start > sc.duration; });
  }
  return {sc, label};
}

PressureTrace load_trace_file(const std::string& path, double rate) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file '" + path + "'");
  return ingest_csv(in, rate);
}

int cmd_simulate(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  const auto [scenario, label] = load_scenario_source(o);
  const PressureTrace trace = simulate(scenario, o.rate, o.seed);
  const fs::path dir = prepare_out_dir(o.out_dir);
  write_csv(dir / "trace.csv", [&](std::ostream& s) { write_trace_csv(s, trace); });
  write_csv(dir / "annotations.csv", [&](std::ostream& s) { write_annotations_csv(s, trace); });
  write_manifest(dir,
                 {{"subcommand", "simulate"},
                  {"scenario", label},
                  {"scenario_text", format_scenario(scenario)},
                  {"sample_rate", o.rate},
                  {"seed", o.seed},
                  {"outputs", {"trace.csv", "annotations.csv"}}},
                 args);
  out << "simulated " << trace.samples.size() << " samples at " << format_number(o.rate)
      << " samples/sec -> " << dir.string() << "\n";
  return kOk;
}

int cmd_replay(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  if (o.trace_file.empty()) throw ConfigError("replay needs --trace <csv>");
  const AlarmConfig alarm = resolved_alarm(o);
  const PressureTrace trace = load_trace_file(o.trace_file, o.rate);
  const MonitorConfig monitor = resolved_monitor(o, trace.sample_rate, alarm);
  const ReplayResult result = run_monitor_over_trace(trace, monitor, alarm);

  const fs::path dir = prepare_out_dir(o.out_dir);
  write_csv(dir / "metrics.csv", [&](std::ostream& s) { write_metrics_csv(s, result.metrics); });
  write_csv(dir / "envelope.csv", [&](std::ostream& s) { write_envelope_csv(s, result.envelope); });
  write_csv(dir / "alarms.csv",
            [&](std::ostream& s) { write_alarm_csv(s, result.alarms, trace.sample_rate); });
  write_manifest(dir,
                 {{"subcommand", "replay"},
                  {"trace", fs::absolute(o.trace_file).lexically_normal().string()},
                  {"monitor", to_json(monitor)},
                  {"alarm", to_json(alarm)},
                  {"outputs", {"metrics.csv", "envelope.csv", "alarms.csv"}}},
                 args);

  out << "replayed " << trace.samples.size() << " samples: " << result.metrics.records.size()
      << " breaths, " << result.alarms.size() << " alarm events\n";
  if (!result.metrics.records.empty()) {
    const auto& last = result.metrics.records.back();
    out << "final PIP " << format_number(last.pip) << " PEEP " << format_number(last.peep) << " RR "
        << format_number(last.rr) << "\n";
  }
  return kOk;
}

int cmd_calibrate(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  if (!std::isfinite(o.rate) || !(o.rate > 0.0)) throw ConfigError("--rate must be positive");
  if (!std::isfinite(o.alarm.t_max) || !(o.alarm.t_max > 0.0)) throw ConfigError("--t-max must be positive");
  if (!(o.peep > 0.0)) throw ConfigError("--peep must be positive");
  CalibrationInput input;
  input.r_min = o.alarm.r_min;
  input.r_nom = o.alarm.r_nom;
  input.t_max_samples = o.alarm.t_max_samples(o.rate);
  const double alpha_r = release_coefficient(input);

  const auto t_max = input.t_max_samples;
  const auto step = static_cast<std::uint64_t>(std::max<long long>(1, std::llround(o.rate)));
  std::set<std::uint64_t> rows{t_max};
  for (std::uint64_t t = 0; t <= 2 * t_max; t += step) rows.insert(t);

  const double pip = input.r_nom * o.peep;
  std::ostringstream table;
  table << "sample,time_sec,v_high,ratio\n";
  for (const auto t : rows) {
    const double v = decay_prediction(pip, o.peep, alpha_r, static_cast<double>(t));
    table << t << ',' << format_number(static_cast<double>(t) / o.rate) << ',' << format_number(v)
          << ',' << format_number(v / o.peep) << '\n';
  }

  out << "alpha_release=" << format_number(alpha_r) << "\n" << table.str();
  if (!o.out_dir.empty()) {
    const fs::path dir = prepare_out_dir(o.out_dir);
    write_file_atomic(dir / "decay.csv", table.str());
    write_manifest(dir,
                   {{"subcommand", "calibrate"},
                    {"r_min", input.r_min},
                    {"r_nom", input.r_nom},
                    {"t_max_samples", input.t_max_samples},
                    {"sample_rate", o.rate},
                    {"alpha_release", alpha_r},
                    {"outputs", {"decay.csv"}}},
                   args);
  }
  return kOk;
}

int cmd_sweep_rate(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  const AlarmConfig alarm = resolved_alarm(o);
  PressureTrace baseline;
  std::string source;
  if (!o.trace_file.empty()) {
    if (!o.golden.empty() || !o.scenario_file.empty()) {
      throw ConfigError("give either --trace or a scenario, not both");
    }
    baseline = load_trace_file(o.trace_file, o.rate);
    source = "trace:" + fs::absolute(o.trace_file).lexically_normal().string();
  } else {
    const auto [scenario, label] = load_scenario_source(o);
    baseline = simulate(scenario, o.rate, o.seed);
    source = label;
  }
  if (o.rates.empty()) throw ConfigError("--rates must list at least one rate");

  std::vector<int> factors;
  for (const double r : o.rates) {
    const double ratio = o.rate / r;
    const double rounded = std::round(ratio);
    if (!(r > 0.0) || !(r <= o.rate) || std::abs(ratio - rounded) > 1e-9) {
      throw ConfigError("rate " + format_number(r) + " does not divide the baseline rate " +
                        format_number(o.rate) + " (integer decimation only)");
    }
    factors.push_back(static_cast<int>(rounded));
  }

  const MonitorConfig base_cfg = resolved_monitor(o, baseline.sample_rate, alarm);
  const ReplayResult reference = run_monitor_over_trace(baseline, base_cfg, alarm);
  if (reference.metrics.records.empty()) {
    throw DataError(DataError::Reason::Empty, "baseline run produced no complete breaths");
  }

  std::ostringstream table;
  table << "rate,rms_pip,rms_rr\n";
  json resolved = json::array();
  for (std::size_t i = 0; i < o.rates.size(); ++i) {
    const PressureTrace trace = decimate(baseline, factors[i]);
    const MonitorConfig cfg = resolved_monitor(o, trace.sample_rate, alarm);
    const ReplayResult candidate = run_monitor_over_trace(trace, cfg, alarm);
    if (candidate.metrics.records.empty()) {
      throw DataError(DataError::Reason::Empty,
                      "no complete breaths at " + format_number(o.rates[i]) + " samples/sec");
    }
    table << format_number(o.rates[i]) << ','
          << format_number(rms_metric_error(reference.metrics, candidate.metrics, Metric::Pip)) << ','
          << format_number(rms_metric_error(reference.metrics, candidate.metrics, Metric::Rr)) << '\n';
    resolved.push_back(to_json(cfg));
  }

  out << table.str();
  if (!o.out_dir.empty()) {
    const fs::path dir = prepare_out_dir(o.out_dir);
    write_file_atomic(dir / "sweep.csv", table.str());
    write_manifest(dir,
                   {{"subcommand", "sweep-rate"},
                    {"source", source},
                    {"seed", o.seed},
                    {"baseline", to_json(base_cfg)},
                    {"candidates", resolved},
                    {"alarm", to_json(alarm)},
                    {"outputs", {"sweep.csv"}}},
                   args);
  }
  return kOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_rerun(const Options& o, std::ostream& out, std::ostream& err) {
  std::ifstream in(o.manifest);
  if (!in) throw IoError("cannot open manifest '" + o.manifest + "'");
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(DataError::Reason::Malformed, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!manifest.contains("args") || !manifest["args"].is_array()) {
    throw DataError(DataError::Reason::Malformed, "manifest has no 'args' array");
  }
  auto args = manifest["args"].get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "rerun") throw ConfigError("a manifest cannot rerun itself");
  if (!o.out_dir.empty()) {
    args.push_back("--out");
    args.push_back(o.out_dir);
  }
  return dispatch(args, out, err);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pressure-waveform ventilation monitor: simulate, replay, calibrate, sweep-rate"};
  app.name("ventmon");
  app.require_subcommand(1);
  Options o;

  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic pressure trace");
  add_source_flags(simulate_cmd, o);
  simulate_cmd->add_option("--rate", o.rate, "Sample rate (samples/sec)")->capture_default_str();
  simulate_cmd->add_option("--out", o.out_dir, "Output directory");

  auto* replay_cmd = app.add_subcommand("replay", "Run the monitor over a trace CSV");
  replay_cmd->add_option("--trace", o.trace_file, "Trace CSV (time_sec,pressure_cmh2o)")->required();
  replay_cmd->add_option("--rate", o.rate, "Declared sample rate of the trace")->capture_default_str();
  replay_cmd->add_option("--out", o.out_dir, "Output directory");
  add_alarm_flags(replay_cmd, o);
  add_monitor_flags(replay_cmd, o);

  auto* calibrate_cmd = app.add_subcommand("calibrate", "Derive the release coefficient and decay table");
  calibrate_cmd->add_option("--r-min", o.alarm.r_min, "Envelope-ratio threshold")->capture_default_str();
  calibrate_cmd->add_option("--r-nom", o.alarm.r_nom, "Nominal PIP-to-PEEP ratio")->capture_default_str();
  calibrate_cmd->add_option("--t-max", o.alarm.t_max, "Alarm time (s)")->capture_default_str();
  calibrate_cmd->add_option("--rate", o.rate, "Sample rate (samples/sec)")->capture_default_str();
  calibrate_cmd->add_option("--peep", o.peep, "PEEP used for the decay table (cm H2O)")->capture_default_str();
  calibrate_cmd->add_option("--out", o.out_dir, "Also write decay.csv and a manifest here");

  auto* sweep_cmd = app.add_subcommand("sweep-rate", "RMS metric error versus sample rate");
  sweep_cmd->add_option("--trace", o.trace_file, "Baseline trace CSV");
  add_source_flags(sweep_cmd, o);
  sweep_cmd->add_option("--rate", o.rate, "Baseline sample rate")->capture_default_str();
  sweep_cmd->add_option("--rates", o.rates, "Candidate rates (integer divisors of the baseline)")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--out", o.out_dir, "Also write sweep.csv and a manifest here");
  add_alarm_flags(sweep_cmd, o);
  add_monitor_flags(sweep_cmd, o);

  auto* rerun_cmd = app.add_subcommand("rerun", "Reproduce a run from its manifest.json");
  rerun_cmd->add_option("--manifest", o.manifest, "Manifest written by a previous run")->required();
  rerun_cmd->add_option("--out", o.out_dir, "Output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  if (simulate_cmd->parsed()) return cmd_simulate(o, args, out);
  if (replay_cmd->parsed()) return cmd_replay(o, args, out);
  if (calibrate_cmd->parsed()) return cmd_calibrate(o, args, out);
  if (sweep_cmd->parsed()) return cmd_sweep_rate(o, args, out);
  return cmd_rerun(o, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace ventmon::cli
