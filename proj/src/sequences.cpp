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

#include "eitecho/sequences.hpp"

#include <cmath>
#include <numbers>

#include "eitecho/csv.hpp"
#include "eitecho/error.hpp"

namespace eitecho {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string("EchoConfig.") + name + " must be > 0");
  }
}

PulseSpec bichromatic(double area, double duration, AreaCalibration calibration,
                      double relative_phase, PulseLabel label) {
  const double rabi = bichromatic_rabi(area, duration, calibration);
  return PulseSpec{duration, rabi, rabi, relative_phase, 0.0, label};
}

}  // namespace

void EchoConfig::validate() const {
  require_positive(tau, "tau");
  require_positive(rabi, "rabi");
  require_positive(init_duration, "init_duration");
  require_positive(rephase_duration, "rephase_duration");
  require_positive(readout_duration, "readout_duration");
  require_positive(splitting, "splitting");
  require_positive(init_area, "init_area");
  require_positive(rephase_area, "rephase_area");
  require_positive(step, "step");
  if (!std::isfinite(init_phase_offset) || !std::isfinite(rephase_phase_shift)) {
    throw ValidationError("EchoConfig phases must be finite");
  }
  if (!(sample_step >= 0.0) || !std::isfinite(sample_step)) {
    throw ValidationError("EchoConfig.sample_step must be >= 0");
  }
  const double spacing = sample_step > 0.0 ? sample_step : step;
  if (spacing > 0.25 / splitting) {
    throw ValidationError("EchoConfig output spacing " + format_number(spacing) +
                          " s samples the beat below 4x its frequency");
  }
}

double bichromatic_rabi(double area, double duration, AreaCalibration calibration) {
  const double bare = area / duration;
  return calibration == AreaCalibration::kBright ? bare / std::numbers::sqrt2 : bare;
}

PulseSpec make_init_pulse(const EchoConfig& cfg) {
  cfg.validate();
  return bichromatic(cfg.init_area, cfg.init_duration, cfg.calibration, cfg.init_phase_offset,
                     PulseLabel::kInitPiHalf);
}

PulseSpec make_rephase_pulse(const EchoConfig& cfg) {
  cfg.validate();
  return bichromatic(cfg.rephase_area, cfg.rephase_duration, cfg.calibration,
                     cfg.init_phase_offset + cfg.rephase_phase_shift, PulseLabel::kRephasePi);
}

PulseSpec make_readout_pulse(const EchoConfig& cfg) {
  cfg.validate();
  return PulseSpec{cfg.readout_duration, cfg.rabi, 0.0, 0.0, 0.0, PulseLabel::kReadout};
}

SequenceSpec make_echo_sequence(const EchoConfig& cfg, EchoLayout layout) {
  cfg.validate();
  SequenceSpec seq;
  seq.step = cfg.step;
  seq.sample_step = cfg.sample_step;
  const double pulses = cfg.init_duration + cfg.rephase_duration + cfg.readout_duration;
  if (cfg.tau <= pulses) {
    throw ConfigError("echo sequence: tau " + format_number(cfg.tau) +
                      " s must exceed the summed pulse durations " + format_number(pulses) + " s");
  }
  seq.segments.push_back(make_init_pulse(cfg));
  if (layout.rephase) {
    const double first_wait = 0.5 * (cfg.tau - cfg.rephase_duration) - cfg.init_duration;
    if (first_wait < 0.0) {
      throw ConfigError("echo sequence: tau " + format_number(cfg.tau) +
                        " s too short to centre the rephasing pulse after the init pulse");
    }
    seq.segments.push_back(Wait{first_wait});
    seq.segments.push_back(make_rephase_pulse(cfg));
    seq.segments.push_back(Wait{0.5 * (cfg.tau - cfg.rephase_duration)});
  } else {
    seq.segments.push_back(Wait{cfg.tau - cfg.init_duration});
  }
  if (layout.readout) seq.segments.push_back(make_readout_pulse(cfg));
  return seq;
}

Vector2c ideal_echo_target(const EchoConfig& cfg) {
  return dark_ket(cfg.init_phase_offset + 2.0 * cfg.rephase_phase_shift);
}

}  // namespace eitecho
