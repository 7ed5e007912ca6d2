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

// Builders for the EIT spin-echo pulses.
//
// The bichromatic relative phase (component 0 minus component 1) selects the
// dark state and therefore the axis of the created ground coherence:
// relative phase phi leaves 1/2 |D(phi)><D(phi)| with Bloch vector
// -1/2 (cos phi, sin phi, 0).

#ifndef EITECHO_SEQUENCES_HPP
#define EITECHO_SEQUENCES_HPP

#include <numbers>

#include "eitecho/dynamics.hpp"

namespace eitecho {

/// Which coupling a bichromatic pulse area refers to.
enum class AreaCalibration {
  /// Area measured on the bright transition, sqrt(2) * rabi * t.
  kBright,
  /// Area measured on a bare single-color transition, rabi * t.
  kBare,
};

/// Single-color Rabi frequency of a 2 us pulse with area pi on the bright
/// transition.
inline constexpr double kDefaultRabi = std::numbers::pi / (std::numbers::sqrt2 * 2e-6);

struct EchoConfig {
  /// Storage time: init starts at 0, readout starts at tau.
  double tau = 200e-6;
  /// Single-color Rabi frequency of the readout pulse, rad/s.
  double rabi = kDefaultRabi;
  double init_duration = 2e-6;
  double rephase_duration = 2e-6;
  double readout_duration = 2e-6;
  /// Ground hyperfine splitting, Hz; sets the Raman beat frequency.
  double splitting = 10.2e6;
  double init_phase_offset = 0.0;
  /// Extra relative phase of the rephasing pulse with respect to the init
  /// pulse. 0 rotates the stored state about its own axis.
  double rephase_phase_shift = 0.0;
  double init_area = std::numbers::pi;
  double rephase_area = 2.0 * std::numbers::pi;
  AreaCalibration calibration = AreaCalibration::kBright;
  /// Integration step inside pulses.
  double step = 10e-9;
  /// Output spacing inside pulses; also the beat sampling interval. 0 records
  /// every integration step.
  double sample_step = 10e-9;

  void validate() const;
};

struct EchoLayout {
  bool rephase = true;
  bool readout = true;
};

/// Per-component Rabi frequency that gives `area` in `duration`.
double bichromatic_rabi(double area, double duration, AreaCalibration calibration);

PulseSpec make_init_pulse(const EchoConfig& cfg);
PulseSpec make_rephase_pulse(const EchoConfig& cfg);
PulseSpec make_readout_pulse(const EchoConfig& cfg);

/// [init, wait, rephase, wait, readout] with the rephasing pulse centred on
/// tau/2 and the readout starting at tau. Throws ConfigError when tau cannot
/// hold the pulses.
SequenceSpec make_echo_sequence(const EchoConfig& cfg, EchoLayout layout = {});

/// Ground ket the ideal echo sequence leaves behind, weight 1/2 in the
/// closed system.
Vector2c ideal_echo_target(const EchoConfig& cfg);

}  // namespace eitecho

#endif  // EITECHO_SEQUENCES_HPP
