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

// Run configuration: a JSON tree whose physical quantities are strings with
// an explicit unit suffix ("2us", "170kHz", "50uT"). Every key is listed by
// config_reference().

#ifndef EITECHO_CONFIG_HPP
#define EITECHO_CONFIG_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eitecho/error.hpp"
#include "eitecho/studies.hpp"

namespace eitecho {

enum class Dimension {
  kTime,
  /// Cyclic frequency, Hz.
  kFrequency,
  /// Angular frequency, rad/s; Hz-based suffixes are multiplied by 2 pi.
  kAngularFrequency,
  /// Decay rate, 1/s.
  kRate,
  kField,
  kAngle,
  kTemperature,
  kIntensity,
  /// Hz per tesla.
  kGyromagnetic,
};

/// Parses "<number><unit>" into SI. Throws ValidationError naming the
/// accepted suffixes when the unit does not belong to `dim`.
double parse_quantity(std::string_view text, Dimension dim);

/// Shortest SI string that parses back to exactly `value`.
std::string format_quantity(double value, Dimension dim);

/// `count` evenly spaced storage times.
struct TauChain {
  double first = 10e-6;
  double last = 300e-6;
  std::size_t count = 30;

  std::vector<double> values() const { return linear_taus(first, last, count); }
};

enum class InitialState { kMixed, kDark, kBright, kGround0, kGround1 };

/// Material constants, stored as the lifetimes a user quotes.
struct PhysicsBlock {
  double optical_t1 = 200e-6;
  /// Total optical coherence time; 0 selects the radiative limit 2 optical_t1.
  double optical_t2 = 0.0;
  double spin_t2 = 500e-6;
  double excitation_dephasing = 0.0;
  double branch0 = 0.5;
  /// rad/s.
  double delta_opt = 0.0;
  double delta_spin = 0.0;

  LambdaParams lambda_params() const;
};

struct RunConfig {
  PhysicsBlock physics;
  EnsembleSpec ensemble;
  EchoConfig sequence;
  InitialState initial_state = InitialState::kMixed;
  bool rephase = true;
  /// Output spacing inside waits for trajectory files.
  double wait_sample_step = 1e-6;
  ReadoutMode readout = ReadoutMode::kBeat;
  double detector_gain = 1.0;

  QstOptions qst;
  FieldModel field;
  std::vector<double> sweep_fields;
  TauChain sweep_taus;
  TemperatureModel temperature;
  std::vector<double> temperatures;
  TauChain temperature_taus{20e-6, 200e-6, 10};
  ScalingModel scaling;
  std::vector<double> scaling_t2s;
  CompensationOptions compensation;

  std::string output_dir = "eitecho_out";
  std::uint64_t seed = 1;
  /// 0 uses every available core.
  unsigned threads = 0;

  RunConfig();

  EchoPhysics echo_physics() const;
  DensityMatrix3 initial_density() const;
};

struct ConfigIssue {
  /// Dotted key path, e.g. "physics.optical_t1".
  std::string path;
  std::string message;
};

/// Every problem found in a configuration, not just the first.
class ConfigParseError : public ValidationError {
 public:
  explicit ConfigParseError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Parses and validates. Absent keys take their defaults, except that an
/// "ensemble" block must name spin_fwhm. Unknown keys are errors.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Full configuration in the input format; parse_config(dump) reproduces it.
nlohmann::json to_json(const RunConfig& cfg);

/// One line per key: path, type, default and meaning.
std::string config_reference();

}  // namespace eitecho

#endif  // EITECHO_CONFIG_HPP
