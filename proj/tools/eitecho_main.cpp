// Copyright 2026 The eitecho Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// eitecho: command-line front end. Exit codes: 0 success, 1 invalid input or
// configuration, 2 numerical failure.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "eitecho/config.hpp"
#include "eitecho/studies.hpp"

#ifndef EITECHO_VERSION
#define EITECHO_VERSION "unknown"
#endif

namespace {

using eitecho::RunConfig;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNumerical = 2;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

/// Collects the files of one run and writes them plus the manifest.
class OutputSet {
 public:
  OutputSet(const RunConfig& cfg, std::string command) : cfg_(cfg), command_(std::move(command)) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw eitecho::ConfigError("cannot create output directory " + cfg.output_dir + ": " + ec.message());
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& fill) {
    const fs::path path = fs::path(cfg_.output_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw eitecho::ConfigError("cannot write " + path.string());
    fill(out);
    if (!out) throw eitecho::ConfigError("failed writing " + path.string());
    files_.push_back(name);
  }

  void write_json(const std::string& name, const json& value) {
    write(name, [&](std::ostream& out) { out << value.dump(2) << "\n"; });
  }

  /// config.json holds the resolved configuration; the manifest names the
  /// command that reproduces every file.
  void finish() {
    json resolved = eitecho::to_json(cfg_);
    write_json("config.json", resolved);
    json manifest;
    manifest["program"] = "eitecho";
    manifest["version"] = EITECHO_VERSION;
    manifest["command"] = command_;
    manifest["seed"] = cfg_.seed;
    manifest["threads"] = cfg_.threads;
    manifest["rerun"] = "eitecho " + command_ + " --config config.json --seed " + std::to_string(cfg_.seed) +
                        " --threads " + std::to_string(cfg_.threads);
    manifest["config"] = resolved;
    manifest["outputs"] = files_;
    manifest["libraries"] = {
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"compiler", __VERSION__},
    };
    const fs::path path = fs::path(cfg_.output_dir) / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    out << manifest.dump(2) << "\n";
    if (!out) throw eitecho::ConfigError("cannot write " + path.string());
  }

 private:
  const RunConfig& cfg_;
  std::string command_;
  std::vector<std::string> files_;
};

RunConfig resolve(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : eitecho::load_config(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  return cfg;
}

int run_simulate(const RunConfig& cfg) {
  const eitecho::EchoPhysics physics = cfg.echo_physics();
  eitecho::SequenceSpec seq = eitecho::make_echo_sequence(cfg.sequence, {cfg.rephase, true});
  seq.wait_sample_step = cfg.wait_sample_step;
  eitecho::EnsembleOptions options;
  options.rho0 = physics.rho0;
  options.threads = cfg.threads;
  const eitecho::Trajectory traj = eitecho::ensemble_average(seq, physics.base, physics.ensemble, options);
  const eitecho::BeatTrace beat = eitecho::synthesize_beat(traj, cfg.sequence.splitting, cfg.detector_gain);
  const eitecho::SegmentSpan* readout = traj.find(eitecho::PulseLabel::kReadout);
  const double proxy = std::abs(traj.observables(readout->begin).rho01);
  const double amplitude = eitecho::beat_amplitude(beat);

  OutputSet out(cfg, "simulate");
  out.write("trajectory.csv", [&](std::ostream& s) { eitecho::write_trajectory_csv(s, traj); });
  out.write("beat_trace.csv", [&](std::ostream& s) { eitecho::write_beat_trace_csv(s, beat); });
  out.write_json("echo.json", {{"tau_s", cfg.sequence.tau},
                               {"beat_amplitude", amplitude},
                               {"coherence_before_readout", proxy},
                               {"members", physics.ensemble.size()}});
  out.finish();
  std::printf("tau %.6g s  beat amplitude %.6g  |rho01| before readout %.6g\n", cfg.sequence.tau, amplitude, proxy);
  return kExitOk;
}

int run_bloch_path(const RunConfig& cfg) {
  const eitecho::EchoPhysics physics = cfg.echo_physics();
  eitecho::SequenceSpec seq = eitecho::make_echo_sequence(cfg.sequence, {cfg.rephase, true});
  seq.wait_sample_step = cfg.wait_sample_step;
  eitecho::EnsembleOptions options;
  options.rho0 = physics.rho0;
  options.threads = cfg.threads;
  const eitecho::Trajectory traj = eitecho::ensemble_average(seq, physics.base, physics.ensemble, options);
  OutputSet out(cfg, "bloch-path");
  out.write("bloch_path.csv", [&](std::ostream& s) { eitecho::write_bloch_path_csv(s, traj); });
  out.finish();
  std::printf("%zu samples written\n", traj.times.size());
  return kExitOk;
}

int run_qst(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const auto cases = eitecho::qst_cases(cfg.sequence, cfg.echo_physics(), cfg.qst, rng);
  OutputSet out(cfg, "qst");
  out.write("qst.csv", [&](std::ostream& s) { eitecho::write_qst_csv(s, cases); });
  out.write_json("qst.json", eitecho::to_json(cases));
  out.finish();
  for (const auto& c : cases) {
    std::printf("%-18s fidelity %.4f  ground-block fidelity %.4f\n", c.name.c_str(), c.result.fidelity_vs_target,
                c.block_fidelity);
  }
  return kExitOk;
}

int run_field_sweep(const RunConfig& cfg) {
  const auto points =
      eitecho::field_sweep(cfg.sweep_fields, cfg.field, cfg.sequence, cfg.echo_physics(), cfg.sweep_taus.values());
  json summary = json::array();
  for (const auto& p : points) {
    json j{{"field_T", p.field}, {"splitting_Hz", p.splitting}, {"curve", eitecho::to_json(p.curve)}};
    j["fit"] = p.fit ? eitecho::to_json(*p.fit) : json(nullptr);
    if (!p.fit_error.empty()) j["fit_error"] = p.fit_error;
    j["beat_minimum_s"] = std::isnan(p.beat_minimum) ? json(nullptr) : json(p.beat_minimum);
    j["expected_minimum_s"] = std::isnan(p.expected_minimum) ? json(nullptr) : json(p.expected_minimum);
    summary.push_back(j);
  }
  OutputSet out(cfg, "field-sweep");
  out.write("field_sweep.csv", [&](std::ostream& s) { eitecho::write_field_sweep_csv(s, points); });
  out.write("field_fits.csv", [&](std::ostream& s) { eitecho::write_field_fit_csv(s, points); });
  out.write_json("field_sweep.json", summary);
  out.finish();
  for (const auto& p : points) {
    std::printf("field %8.3f uT  splitting %8.1f Hz  T2 %s  first minimum %s\n", p.field * 1e6, p.splitting,
                p.fit ? (std::to_string(p.fit->t2 * 1e6) + " us").c_str() : "n/a",
                std::isnan(p.beat_minimum) ? "none" : (std::to_string(p.beat_minimum * 1e6) + " us").c_str());
  }
  return kExitOk;
}

int run_temp_scan(const RunConfig& cfg) {
  const auto points = eitecho::temperature_scan(cfg.temperatures, cfg.temperature, cfg.sequence,
                                                cfg.echo_physics(), cfg.temperature_taus.values());
  OutputSet out(cfg, "temp-scan");
  out.write("temperature.csv", [&](std::ostream& s) { eitecho::write_temperature_csv(s, points); });
  out.finish();
  for (const auto& p : points) {
    std::printf("T %6.2f K  optical T2 %.4g s  relative amplitude %.4g\n", p.temperature, p.optical_t2,
                p.relative_amplitude);
  }
  return kExitOk;
}

int run_scaling(const RunConfig& cfg) {
  const auto points = eitecho::scaling_study(cfg.scaling_t2s, cfg.scaling, cfg.sequence, cfg.echo_physics());
  OutputSet out(cfg, "scaling");
  out.write("scaling.csv", [&](std::ostream& s) { eitecho::write_scaling_csv(s, points); });
  out.finish();
  for (const auto& p : points) {
    std::printf("optical T2 %.3g s  T_pi %.3g s  fidelity %.4f (closed %.4f)\n", p.optical_t2, p.pi_duration,
                p.fidelity, p.closed_fidelity);
  }
  return kExitOk;
}

int run_compensate(const RunConfig& cfg) {
  const auto result = eitecho::compensation_search(cfg.field, cfg.sequence, cfg.echo_physics(), cfg.compensation);
  OutputSet out(cfg, "compensate");
  out.write_json("compensation.json", eitecho::to_json(result));
  out.finish();
  std::printf("compensation (%.3f, %.3f, %.3f) uT  objective %.6g -> %.6g\n", result.compensation.x() * 1e6,
              result.compensation.y() * 1e6, result.compensation.z() * 1e6, result.initial_objective,
              result.objective);
  if (!result.improved) std::fprintf(stderr, "warning: search did not improve the objective\n");
  return kExitOk;
}

int run_validate(const RunConfig& cfg) {
  std::printf("configuration valid: %zu ensemble members, tau %.6g s\n", cfg.ensemble.size(), cfg.sequence.tau);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for EIT spin echoes in a driven three-level ensemble.", "eitecho"};
  app.require_subcommand(1);
  app.footer(eitecho::config_reference());
  app.set_version_flag("--version", EITECHO_VERSION);

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const Command commands[] = {
      {"simulate", "Single echo: trajectory.csv, beat_trace.csv, echo.json.", run_simulate},
      {"bloch-path", "Ground-state Bloch path through the echo: bloch_path.csv.", run_bloch_path},
      {"qst", "Tomography of init, phase-shifted init and rephased states: qst.csv, qst.json.", run_qst},
      {"field-sweep", "Decay curves vs vertical field: field_sweep.csv, field_fits.csv.", run_field_sweep},
      {"temp-scan", "Echo amplitude and fitted T2 vs temperature: temperature.csv.", run_temp_scan},
      {"scaling", "End fidelity vs optical T2 at constant intensity: scaling.csv.", run_scaling},
      {"compensate", "Search the compensation field that removes the beating: compensation.json.",
       run_compensate},
      {"validate", "Check the configuration only.", run_validate},
  };

  Options options;
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", options.config, "JSON configuration file; defaults apply without one.")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", options.out, "Output directory (overrides output_dir).");
    sub->add_option("--seed", options.seed, "Random seed (overrides seed).");
    sub->add_option("--threads", options.threads, "Worker threads, 0 = all cores (overrides threads).");
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    const RunConfig cfg = resolve(options);
    for (const auto& [sub, command] : subs) {
      if (sub->parsed()) return command->run(cfg);
    }
  } catch (const eitecho::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const eitecho::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected failure: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitInvalid;
}
