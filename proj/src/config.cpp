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

#include "eitecho/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

namespace eitecho {

namespace {

using nlohmann::json;

struct Unit {
  std::string_view suffix;
  double scale;
};

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Unit> units_of(Dimension dim) {
  switch (dim) {
    case Dimension::kTime:
      return {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"µs", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}};
    case Dimension::kFrequency:
      return {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    case Dimension::kAngularFrequency:
      return {{"rad/s", 1.0},      {"krad/s", 1e3},     {"Mrad/s", 1e6},     {"Grad/s", 1e9},
              {"Hz", kTwoPi},      {"kHz", kTwoPi * 1e3}, {"MHz", kTwoPi * 1e6}, {"GHz", kTwoPi * 1e9}};
    case Dimension::kRate:
      return {{"/s", 1.0}, {"1/s", 1.0}, {"/ms", 1e3}, {"1/ms", 1e3}, {"/us", 1e6}, {"1/us", 1e6}};
    case Dimension::kField:
      return {{"T", 1.0}, {"mT", 1e-3}, {"uT", 1e-6}, {"µT", 1e-6}, {"nT", 1e-9}, {"G", 1e-4}, {"mG", 1e-7}};
    case Dimension::kAngle:
      return {{"rad", 1.0}, {"mrad", 1e-3}, {"deg", std::numbers::pi / 180.0}};
    case Dimension::kTemperature:
      return {{"K", 1.0}, {"mK", 1e-3}};
    case Dimension::kIntensity:
      return {{"W/m2", 1.0}, {"W/cm2", 1e4}, {"kW/cm2", 1e7}};
    case Dimension::kGyromagnetic:
      return {{"Hz/T", 1.0}, {"kHz/T", 1e3}, {"MHz/T", 1e6}, {"kHz/mT", 1e6}, {"Hz/uT", 1e6}, {"kHz/uT", 1e9}};
  }
  return {};
}

std::string_view dimension_name(Dimension dim) {
  switch (dim) {
    case Dimension::kTime: return "time";
    case Dimension::kFrequency: return "frequency";
    case Dimension::kAngularFrequency: return "angular frequency";
    case Dimension::kRate: return "rate";
    case Dimension::kField: return "field";
    case Dimension::kAngle: return "angle";
    case Dimension::kTemperature: return "temperature";
    case Dimension::kIntensity: return "intensity";
    case Dimension::kGyromagnetic: return "g-factor";
  }
  return "quantity";
}

std::string accepted_units(Dimension dim) {
  std::string out;
  for (const Unit& u : units_of(dim)) {
    if (!out.empty()) out += ", ";
    out += u.suffix;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

/// Thrown by key setters; the parser prefixes the key path.
struct KeyError {
  std::string message;
};

enum class Bound { kAny, kPositive, kNonNegative };

void check_bound(double v, Bound bound) {
  if (bound == Bound::kPositive && !(v > 0.0)) throw KeyError{"must be > 0"};
  if (bound == Bound::kNonNegative && !(v >= 0.0)) throw KeyError{"must be >= 0"};
}

double quantity_from(const json& j, Dimension dim, Bound bound) {
  if (!j.is_string()) {
    throw KeyError{"expected a string with a " + std::string(dimension_name(dim)) + " unit (" +
                   accepted_units(dim) + ")"};
  }
  double v = 0.0;
  try {
    v = parse_quantity(j.get<std::string>(), dim);
  } catch (const ValidationError& e) {
    throw KeyError{e.what()};
  }
  check_bound(v, bound);
  return v;
}

struct KeySpec {
  std::string path;
  std::string type;
  std::string help;
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
};

template <typename Access>
KeySpec quantity(std::string path, Dimension dim, Bound bound, std::string help, Access access) {
  return {std::move(path), std::string(dimension_name(dim)), std::move(help),
          [=](RunConfig& c, const json& j) { access(c) = quantity_from(j, dim, bound); },
          [=](const RunConfig& c) { return json(format_quantity(access(c), dim)); }};
}

template <typename Access>
KeySpec quantity_list(std::string path, Dimension dim, Bound bound, bool allow_empty, std::string help,
                      Access access) {
  return {std::move(path), "list of " + std::string(dimension_name(dim)), std::move(help),
          [=](RunConfig& c, const json& j) {
            if (!j.is_array()) throw KeyError{"expected an array"};
            if (j.empty() && !allow_empty) throw KeyError{"must not be empty"};
            std::vector<double> values;
            for (const json& item : j) values.push_back(quantity_from(item, dim, bound));
            access(c) = std::move(values);
          },
          [=](const RunConfig& c) {
            json out = json::array();
            for (double v : access(c)) out.push_back(format_quantity(v, dim));
            return out;
          }};
}

template <typename Access>
KeySpec vector3(std::string path, Dimension dim, std::string help, Access access) {
  return {std::move(path), "3 x " + std::string(dimension_name(dim)), std::move(help),
          [=](RunConfig& c, const json& j) {
            if (!j.is_array() || j.size() != 3) throw KeyError{"expected an array of 3 values"};
            for (int i = 0; i < 3; ++i) access(c)(i) = quantity_from(j[i], dim, Bound::kAny);
          },
          [=](const RunConfig& c) {
            json out = json::array();
            for (int i = 0; i < 3; ++i) out.push_back(format_quantity(access(c)(i), dim));
            return out;
          }};
}

template <typename Access>
KeySpec number(std::string path, Bound bound, std::string help, Access access) {
  return {std::move(path), "number", std::move(help),
          [=](RunConfig& c, const json& j) {
            if (!j.is_number()) throw KeyError{"expected a number"};
            const double v = j.get<double>();
            if (!std::isfinite(v)) throw KeyError{"must be finite"};
            check_bound(v, bound);
            access(c) = v;
          },
          [=](const RunConfig& c) { return json(access(c)); }};
}

template <typename Access>
KeySpec integer(std::string path, std::int64_t min, std::string help, Access access) {
  return {std::move(path), "integer", std::move(help),
          [=](RunConfig& c, const json& j) {
            if (!j.is_number_integer()) throw KeyError{"expected an integer"};
            if (j.is_number_unsigned()) {
              const auto v = j.get<std::uint64_t>();
              using T = std::remove_reference_t<decltype(access(c))>;
              if (min > 0 && v < static_cast<std::uint64_t>(min)) throw KeyError{"must be >= " + std::to_string(min)};
              if (v > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) throw KeyError{"out of range"};
              access(c) = static_cast<T>(v);
            } else {
              const auto v = j.get<std::int64_t>();
              if (v < min) throw KeyError{"must be >= " + std::to_string(min)};
              access(c) = static_cast<std::remove_reference_t<decltype(access(c))>>(v);
            }
          },
          [=](const RunConfig& c) { return json(access(c)); }};
}

template <typename E, typename Access>
KeySpec choice(std::string path, std::vector<std::pair<std::string, E>> options, std::string help,
               Access access) {
  std::string type;
  for (const auto& o : options) type += (type.empty() ? "" : "|") + o.first;
  return {std::move(path), type, std::move(help),
          [=](RunConfig& c, const json& j) {
            if (j.is_string()) {
              for (const auto& o : options) {
                if (o.first == j.get<std::string>()) {
                  access(c) = o.second;
                  return;
                }
              }
            }
            throw KeyError{"expected one of " + type};
          },
          [=](const RunConfig& c) {
            for (const auto& o : options) {
              if (o.second == access(c)) return json(o.first);
            }
            return json();
          }};
}

template <typename Access>
KeySpec boolean(std::string path, std::string help, Access access) {
  return {std::move(path), "bool", std::move(help),
          [=](RunConfig& c, const json& j) {
            if (!j.is_boolean()) throw KeyError{"expected true or false"};
            access(c) = j.get<bool>();
          },
          [=](const RunConfig& c) { return json(access(c)); }};
}

template <typename Access>
KeySpec text(std::string path, std::string help, Access access) {
  return {std::move(path), "string", std::move(help),
          [=](RunConfig& c, const json& j) {
            if (!j.is_string() || j.get<std::string>().empty()) throw KeyError{"expected a non-empty string"};
            access(c) = j.get<std::string>();
          },
          [=](const RunConfig& c) { return json(access(c)); }};
}

KeySpec zeeman_branch_list() {
  return {"ensemble.zeeman_branches", "list of {offset: frequency, weight: number}",
          "Discrete spin-detuning branches; empty means one unshifted branch.",
          [](RunConfig& c, const json& j) {
            if (!j.is_array()) throw KeyError{"expected an array"};
            std::vector<ZeemanBranch> branches;
            for (const json& item : j) {
              if (!item.is_object() || item.size() != 2 || !item.contains("offset") || !item.contains("weight")) {
                throw KeyError{"every branch needs exactly the keys offset and weight"};
              }
              if (!item["weight"].is_number()) throw KeyError{"weight must be a number"};
              branches.push_back({quantity_from(item["offset"], Dimension::kFrequency, Bound::kAny),
                                  item["weight"].get<double>()});
            }
            c.ensemble.zeeman_branches = std::move(branches);
          },
          [](const RunConfig& c) {
            json out = json::array();
            for (const auto& b : c.ensemble.zeeman_branches) {
              out.push_back({{"offset", format_quantity(b.offset, Dimension::kFrequency)}, {"weight", b.weight}});
            }
            return out;
          }};
}

template <typename Access>
void add_chain(std::vector<KeySpec>& keys, const std::string& prefix, const std::string& what, Access access) {
  keys.push_back(quantity(prefix + ".first", Dimension::kTime, Bound::kPositive, "First " + what + ".",
                          [=](auto& c) -> auto& { return access(c).first; }));
  keys.push_back(quantity(prefix + ".last", Dimension::kTime, Bound::kPositive, "Last " + what + ".",
                          [=](auto& c) -> auto& { return access(c).last; }));
  keys.push_back(integer(prefix + ".count", 3, "Number of evenly spaced points.",
                         [=](auto& c) -> auto& { return access(c).count; }));
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> keys = [] {
    using D = Dimension;
    std::vector<KeySpec> k;
    k.push_back(text("output_dir", "Directory for output files; --out overrides.",
                     [](auto& c) -> auto& { return c.output_dir; }));
    k.push_back(integer("seed", 0, "Seed for measurement noise; --seed overrides.",
                        [](auto& c) -> auto& { return c.seed; }));
    k.push_back(integer("threads", 0, "Worker threads, 0 = all cores; --threads overrides.",
                        [](auto& c) -> auto& { return c.threads; }));

    k.push_back(quantity("physics.optical_t1", D::kTime, Bound::kPositive,
                         "Excited-state lifetime; \"inf\" disables decay.",
                         [](auto& c) -> auto& { return c.physics.optical_t1; }));
    k.push_back(quantity("physics.optical_t2", D::kTime, Bound::kNonNegative,
                         "Optical coherence time, at most 2 optical_t1; 0s means 2 optical_t1.",
                         [](auto& c) -> auto& { return c.physics.optical_t2; }));
    k.push_back(quantity("physics.spin_t2", D::kTime, Bound::kPositive,
                         "Ground-coherence dephasing time; \"inf\" disables it.",
                         [](auto& c) -> auto& { return c.physics.spin_t2; }));
    k.push_back(quantity("physics.excitation_dephasing", D::kRate, Bound::kNonNegative,
                         "Extra spin dephasing rate attributed to optical excitation.",
                         [](auto& c) -> auto& { return c.physics.excitation_dephasing; }));
    k.push_back(number("physics.branch0", Bound::kNonNegative, "Fraction of excited decay into |0>.",
                       [](auto& c) -> auto& { return c.physics.branch0; }));
    k.push_back(quantity("physics.delta_opt", D::kAngularFrequency, Bound::kAny,
                         "Optical detuning of every member.",
                         [](auto& c) -> auto& { return c.physics.delta_opt; }));
    k.push_back(quantity("physics.delta_spin", D::kAngularFrequency, Bound::kAny,
                         "Static two-photon detuning of every member.",
                         [](auto& c) -> auto& { return c.physics.delta_spin; }));

    k.push_back(quantity("ensemble.optical_fwhm", D::kFrequency, Bound::kNonNegative,
                         "Gaussian FWHM of the optical detunings.",
                         [](auto& c) -> auto& { return c.ensemble.optical_fwhm; }));
    k.push_back(quantity("ensemble.spin_fwhm", D::kFrequency, Bound::kNonNegative,
                         "Gaussian FWHM of the spin detunings; required when the block is present.",
                         [](auto& c) -> auto& { return c.ensemble.spin_fwhm; }));
    k.push_back(integer("ensemble.n_optical", 1, "Odd number of optical grid points.",
                        [](auto& c) -> auto& { return c.ensemble.n_optical; }));
    k.push_back(integer("ensemble.n_spin", 1, "Odd number of spin grid points.",
                        [](auto& c) -> auto& { return c.ensemble.n_spin; }));
    k.push_back(zeeman_branch_list());

    k.push_back(quantity("sequence.tau", D::kTime, Bound::kPositive, "Storage time: readout starts at tau.",
                         [](auto& c) -> auto& { return c.sequence.tau; }));
    k.push_back(quantity("sequence.rabi", D::kAngularFrequency, Bound::kPositive,
                         "Single-color Rabi frequency of the readout pulse.",
                         [](auto& c) -> auto& { return c.sequence.rabi; }));
    k.push_back(quantity("sequence.init_duration", D::kTime, Bound::kPositive, "Init pulse length.",
                         [](auto& c) -> auto& { return c.sequence.init_duration; }));
    k.push_back(quantity("sequence.rephase_duration", D::kTime, Bound::kPositive, "Rephasing pulse length.",
                         [](auto& c) -> auto& { return c.sequence.rephase_duration; }));
    k.push_back(quantity("sequence.readout_duration", D::kTime, Bound::kPositive, "Readout pulse length.",
                         [](auto& c) -> auto& { return c.sequence.readout_duration; }));
    k.push_back(quantity("sequence.splitting", D::kFrequency, Bound::kPositive,
                         "Ground hyperfine splitting, the Raman beat frequency.",
                         [](auto& c) -> auto& { return c.sequence.splitting; }));
    k.push_back(quantity("sequence.init_phase_offset", D::kAngle, Bound::kAny,
                         "Relative phase of the init pulse.",
                         [](auto& c) -> auto& { return c.sequence.init_phase_offset; }));
    k.push_back(quantity("sequence.rephase_phase_shift", D::kAngle, Bound::kAny,
                         "Relative phase of the rephasing pulse minus that of the init pulse.",
                         [](auto& c) -> auto& { return c.sequence.rephase_phase_shift; }));
    k.push_back(quantity("sequence.init_area", D::kAngle, Bound::kPositive, "Init pulse area.",
                         [](auto& c) -> auto& { return c.sequence.init_area; }));
    k.push_back(quantity("sequence.rephase_area", D::kAngle, Bound::kPositive, "Rephasing pulse area.",
                         [](auto& c) -> auto& { return c.sequence.rephase_area; }));
    k.push_back(choice<AreaCalibration>("sequence.calibration",
                                        {{"bright", AreaCalibration::kBright}, {"bare", AreaCalibration::kBare}},
                                        "Coupling the pulse areas refer to.",
                                        [](auto& c) -> auto& { return c.sequence.calibration; }));
    k.push_back(quantity("sequence.step", D::kTime, Bound::kPositive, "Integration step inside pulses.",
                         [](auto& c) -> auto& { return c.sequence.step; }));
    k.push_back(quantity("sequence.sample_step", D::kTime, Bound::kNonNegative,
                         "Output and beat sampling spacing inside pulses; 0s records every integration step.",
                         [](auto& c) -> auto& { return c.sequence.sample_step; }));
    k.push_back(choice<InitialState>("sequence.initial_state",
                                     {{"mixed", InitialState::kMixed},
                                      {"dark", InitialState::kDark},
                                      {"bright", InitialState::kBright},
                                      {"ground0", InitialState::kGround0},
                                      {"ground1", InitialState::kGround1}},
                                     "State before the init pulse; dark and bright follow init_phase_offset.",
                                     [](auto& c) -> auto& { return c.initial_state; }));
    k.push_back(boolean("sequence.rephase", "Include the rephasing pulse.",
                        [](auto& c) -> auto& { return c.rephase; }));
    k.push_back(quantity("sequence.wait_sample_step", D::kTime, Bound::kNonNegative,
                         "Output spacing inside waits for trajectory files; 0s records wait ends only.",
                         [](auto& c) -> auto& { return c.wait_sample_step; }));

    k.push_back(choice<ReadoutMode>("readout.mode", {{"beat", ReadoutMode::kBeat}, {"proxy", ReadoutMode::kProxy}},
                                    "Echo signal: Raman beat amplitude or |rho_01| before readout.",
                                    [](auto& c) -> auto& { return c.readout; }));
    k.push_back(number("readout.detector_gain", Bound::kPositive, "Scale of the synthesized beat.",
                       [](auto& c) -> auto& { return c.detector_gain; }));

    k.push_back(number("qst.noise_rms", Bound::kNonNegative, "Gaussian noise on every measured population.",
                       [](auto& c) -> auto& { return c.qst.noise_rms; }));
    k.push_back(quantity("qst.gap", D::kTime, Bound::kNonNegative,
                         "Wait between init and rephasing pulse in the third case.",
                         [](auto& c) -> auto& { return c.qst.gap; }));

    k.push_back(quantity("field.g_factor", D::kGyromagnetic, Bound::kPositive, "Splitting per unit field.",
                         [](auto& c) -> auto& { return c.field.g_factor; }));
    k.push_back(vector3("field.ambient", D::kField, "Ambient field (x, y, z).",
                        [](auto& c) -> auto& { return c.field.field; }));
    k.push_back(vector3("field.compensation", D::kField, "Applied compensation field (x, y, z).",
                        [](auto& c) -> auto& { return c.field.compensation; }));

    k.push_back(quantity_list("field_sweep.fields", D::kField, Bound::kAny, false,
                              "Vertical compensation values of the sweep.",
                              [](auto& c) -> auto& { return c.sweep_fields; }));
    add_chain(k, "field_sweep.taus", "storage time of every decay curve",
              [](auto& c) -> auto& { return c.sweep_taus; });

    k.push_back(quantity("temperature.t2_opt_ref", D::kTime, Bound::kPositive,
                         "Optical T2 at the reference temperature.",
                         [](auto& c) -> auto& { return c.temperature.t2_opt_ref; }));
    k.push_back(quantity("temperature.temperature_ref", D::kTemperature, Bound::kPositive,
                         "Reference temperature.",
                         [](auto& c) -> auto& { return c.temperature.temperature_ref; }));
    k.push_back(number("temperature.exponent", Bound::kAny, "Power law of the optical dephasing rate.",
                       [](auto& c) -> auto& { return c.temperature.exponent; }));
    k.push_back(quantity_list("temperature.temperatures", D::kTemperature, Bound::kPositive, false,
                              "Scanned temperatures.", [](auto& c) -> auto& { return c.temperatures; }));
    add_chain(k, "temperature.taus", "storage time of every decay curve",
              [](auto& c) -> auto& { return c.temperature_taus; });

    k.push_back(quantity("scaling.intensity_budget", D::kIntensity, Bound::kPositive, "Available intensity.",
                         [](auto& c) -> auto& { return c.scaling.intensity_budget; }));
    k.push_back(quantity("scaling.reference_intensity", D::kIntensity, Bound::kPositive,
                         "Intensity of the reference pulse.",
                         [](auto& c) -> auto& { return c.scaling.reference_intensity; }));
    k.push_back(quantity("scaling.t_pi_ref", D::kTime, Bound::kPositive, "Reference pi-pulse duration.",
                         [](auto& c) -> auto& { return c.scaling.t_pi_ref; }));
    k.push_back(quantity("scaling.t2_ref", D::kTime, Bound::kPositive, "Optical T2 of the reference pulse.",
                         [](auto& c) -> auto& { return c.scaling.t2_ref; }));
    k.push_back(quantity_list("scaling.optical_t2s", D::kTime, Bound::kPositive, false, "Scanned optical T2.",
                              [](auto& c) -> auto& { return c.scaling_t2s; }));

    k.push_back(quantity("compensation.range", D::kField, Bound::kPositive, "Search half-width per axis.",
                         [](auto& c) -> auto& { return c.compensation.range; }));
    k.push_back(quantity("compensation.coarse_step", D::kField, Bound::kPositive, "Coarse scan spacing.",
                         [](auto& c) -> auto& { return c.compensation.coarse_step; }));
    k.push_back(quantity("compensation.tolerance", D::kField, Bound::kPositive, "Line-search resolution.",
                         [](auto& c) -> auto& { return c.compensation.tolerance; }));
    k.push_back(integer("compensation.max_sweeps", 1, "Maximum number of axis moves.",
                        [](auto& c) -> auto& { return c.compensation.max_sweeps; }));
    k.push_back(quantity("compensation.move_threshold", D::kField, Bound::kPositive,
                         "Stop once the best move is shorter.",
                         [](auto& c) -> auto& { return c.compensation.move_threshold; }));
    k.push_back(quantity_list("compensation.taus", D::kTime, Bound::kPositive, true,
                              "Storage times of the objective; empty selects 8-20 us.",
                              [](auto& c) -> auto& { return c.compensation.taus; }));
    return k;
  }();
  return keys;
}

const KeySpec* find_key(std::string_view path) {
  for (const auto& k : key_table()) {
    if (k.path == path) return &k;
  }
  return nullptr;
}

bool is_block(std::string_view path) {
  const std::string prefix = std::string(path) + ".";
  for (const auto& k : key_table()) {
    if (k.path.starts_with(prefix)) return true;
  }
  return false;
}

void apply(RunConfig& cfg, const json& node, const std::string& prefix, std::vector<ConfigIssue>& issues) {
  for (const auto& [name, value] : node.items()) {
    const std::string path = prefix.empty() ? name : prefix + "." + name;
    if (const KeySpec* key = find_key(path)) {
      try {
        key->set(cfg, value);
      } catch (const KeyError& e) {
        issues.push_back({path, e.message});
      }
    } else if (is_block(path)) {
      if (value.is_object()) {
        apply(cfg, value, path, issues);
      } else {
        issues.push_back({path, "expected an object"});
      }
    } else {
      issues.push_back({path, "unknown key"});
    }
  }
}

template <typename Fn>
void check(std::vector<ConfigIssue>& issues, const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    issues.push_back({path, e.what()});
  }
}

void check_chain(std::vector<ConfigIssue>& issues, const std::string& path, const TauChain& chain) {
  if (!(chain.last > chain.first)) issues.push_back({path, "last must exceed first"});
}

void validate_config(const RunConfig& cfg, std::vector<ConfigIssue>& issues) {
  if (std::isfinite(cfg.physics.optical_t1) && cfg.physics.optical_t2 > 2.0 * cfg.physics.optical_t1) {
    issues.push_back({"physics.optical_t2", "must not exceed 2 optical_t1"});
  }
  if (cfg.physics.branch0 > 1.0) issues.push_back({"physics.branch0", "must be <= 1"});
  check(issues, "physics", [&] { cfg.physics.lambda_params().validate(); });
  check(issues, "ensemble", [&] { cfg.ensemble.validate(); });
  check(issues, "sequence", [&] { make_echo_sequence(cfg.sequence); });
  check(issues, "field", [&] { cfg.field.validate(); });
  check(issues, "temperature", [&] { cfg.temperature.validate(); });
  check(issues, "temperature.t2_opt_ref",
        [&] { cfg.temperature.pure_dephasing(cfg.temperature.temperature_ref, 1.0 / cfg.physics.optical_t1); });
  check(issues, "scaling", [&] { cfg.scaling.validate(); });
  check_chain(issues, "field_sweep.taus", cfg.sweep_taus);
  check_chain(issues, "temperature.taus", cfg.temperature_taus);
  if (cfg.compensation.coarse_step > cfg.compensation.range) {
    issues.push_back({"compensation.coarse_step", "must not exceed compensation.range"});
  }
}

std::string issues_text(const std::vector<ConfigIssue>& issues) {
  std::string out = "invalid configuration:";
  for (const auto& i : issues) out += "\n  " + (i.path.empty() ? std::string("<root>") : i.path) + ": " + i.message;
  return out;
}

}  // namespace

double parse_quantity(std::string_view text, Dimension dim) {
  const std::string_view s = trim(text);
  if (s == "inf" && dim == Dimension::kTime) return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || !std::isfinite(value)) {
    throw ValidationError("cannot read a number from \"" + std::string(text) + "\"");
  }
  const std::string_view suffix = trim(std::string_view(end, s.data() + s.size() - end));
  for (const Unit& u : units_of(dim)) {
    if (u.suffix == suffix) return value * u.scale;
  }
  throw ValidationError("\"" + std::string(text) + "\" needs a " + std::string(dimension_name(dim)) +
                        " unit: " + accepted_units(dim));
}

std::string format_quantity(double value, Dimension dim) {
  if (std::isinf(value) && value > 0.0 && dim == Dimension::kTime) return "inf";
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, end) + std::string(units_of(dim).front().suffix);
}

LambdaParams PhysicsBlock::lambda_params() const {
  LambdaParams p;
  p.gamma_opt_decay = 1.0 / optical_t1;
  const double t2 = optical_t2 > 0.0 ? optical_t2 : 2.0 * optical_t1;
  p.gamma_opt_deph = std::max(0.0, 1.0 / t2 - 0.5 * p.gamma_opt_decay);
  p.gamma_spin_deph = 1.0 / spin_t2;
  p.gamma_excitation_deph = excitation_dephasing;
  p.branch0 = branch0;
  p.delta_opt = delta_opt;
  p.delta_spin = delta_spin;
  return p;
}

RunConfig::RunConfig() {
  field.field = Eigen::Vector3d(0.0, 0.0, 50e-6);
  for (int i = 0; i < 20; ++i) sweep_fields.push_back(-50e-6 + 5e-6 * i);
  for (int t = 4; t <= 11; ++t) temperatures.push_back(t);
  for (double decade : {1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5}) {
    scaling_t2s.push_back(decade);
    scaling_t2s.push_back(3.0 * decade);
  }
  scaling_t2s.push_back(1e-4);
}

DensityMatrix3 RunConfig::initial_density() const {
  switch (initial_state) {
    case InitialState::kMixed: return mixed_ground_state();
    case InitialState::kDark: return DensityMatrix3::pure(embed(dark_ket(sequence.init_phase_offset)));
    case InitialState::kBright: return DensityMatrix3::pure(embed(bright_ket(sequence.init_phase_offset)));
    case InitialState::kGround0: return DensityMatrix3::pure(embed(ground_ket(kLevel0)));
    case InitialState::kGround1: return DensityMatrix3::pure(embed(ground_ket(kLevel1)));
  }
  return mixed_ground_state();
}

EchoPhysics RunConfig::echo_physics() const {
  EchoPhysics p;
  p.base = physics.lambda_params();
  p.ensemble = ensemble;
  p.mode = readout;
  p.rho0 = initial_density();
  p.threads = threads;
  p.detector_gain = detector_gain;
  p.rephase = rephase;
  return p;
}

ConfigParseError::ConfigParseError(std::vector<ConfigIssue> issues)
    : ValidationError(issues_text(issues)), issues_(std::move(issues)) {}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(std::vector<ConfigIssue>{{"", std::string("malformed JSON: ") + e.what()}});
  }
  if (!root.is_object()) throw ConfigParseError(std::vector<ConfigIssue>{{"", "top level must be an object"}});

  RunConfig cfg;
  std::vector<ConfigIssue> issues;
  apply(cfg, root, "", issues);
  if (root.contains("ensemble") && root["ensemble"].is_object() && !root["ensemble"].contains("spin_fwhm")) {
    issues.push_back({"ensemble.spin_fwhm", "required when an ensemble block is given"});
  }
  // Block checks on top of broken keys would mostly repeat them.
  if (issues.empty()) validate_config(cfg, issues);
  if (!issues.empty()) throw ConfigParseError(std::move(issues));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigParseError(std::vector<ConfigIssue>{{"", "cannot open " + path}});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

nlohmann::json to_json(const RunConfig& cfg) {
  json out = json::object();
  for (const auto& k : key_table()) {
    std::string pointer = "/" + k.path;
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    out[json::json_pointer(pointer)] = k.get(cfg);
  }
  return out;
}

std::string config_reference() {
  const RunConfig defaults;
  std::ostringstream out;
  out << "Configuration keys (JSON; quantities are strings with a unit suffix):\n";
  std::string block;
  for (const auto& k : key_table()) {
    const auto dot = k.path.find('.');
    const std::string this_block = dot == std::string::npos ? "" : k.path.substr(0, dot);
    if (this_block != block) {
      block = this_block;
      out << "\n";
    }
    std::string shown = k.get(defaults).dump();
    if (shown.size() > 48) shown = shown.substr(0, 45) + "...";
    out << "  " << k.path << " <" << k.type << "> default " << shown << "\n      " << k.help << "\n";
  }
  out << "\nUnits:\n";
  for (Dimension d : {Dimension::kTime, Dimension::kFrequency, Dimension::kAngularFrequency, Dimension::kRate,
                      Dimension::kField, Dimension::kAngle, Dimension::kTemperature, Dimension::kIntensity,
                      Dimension::kGyromagnetic}) {
    out << "  " << dimension_name(d) << ": " << accepted_units(d) << "\n";
  }
  return out.str();
}

}  // namespace eitecho
