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

// Time propagation of one ensemble member through pulses and waits.

#ifndef EITECHO_DYNAMICS_HPP
#define EITECHO_DYNAMICS_HPP

#include <cstddef>
#include <ostream>
#include <string_view>
#include <variant>
#include <vector>

#include "eitecho/lambda_model.hpp"
#include "eitecho/qstate.hpp"

namespace eitecho {

enum class PulseLabel { kInitPiHalf, kRephasePi, kReadout, kCustom, kWait };

std::string_view to_string(PulseLabel label);

/// Rectangular pulse. Its drive fields replace those of the member's
/// LambdaParams for the pulse duration.
struct PulseSpec {
  double duration = 0.0;
  double rabi0 = 0.0;
  double rabi1 = 0.0;
  double phase0 = 0.0;
  double phase1 = 0.0;
  PulseLabel label = PulseLabel::kCustom;

  void validate() const;
};

/// Free evolution with both drive fields off.
struct Wait {
  double duration = 0.0;
};

using Segment = std::variant<PulseSpec, Wait>;

struct SequenceSpec {
  std::vector<Segment> segments;
  /// Integration step inside pulses, seconds. run_sequence refines it further
  /// when a member's rates demand it; it never coarsens it.
  double step = 10e-9;
  /// Output spacing inside pulses; 0 records every integration step. A fixed
  /// grid keeps sample times independent of the integration step.
  double sample_step = 0.0;
  /// Output spacing inside waits; 0 records only the end of each wait.
  double wait_sample_step = 0.0;

  double total_duration() const;
  void validate() const;
};

/// Index range [begin, end] of one segment inside a trajectory.
struct SegmentSpan {
  PulseLabel label = PulseLabel::kCustom;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Observables {
  double p0 = 0.0;
  double p1 = 0.0;
  double pe = 0.0;
  Complex rho01;
  Complex rho0e;
  Complex rho1e;
};

Observables observables_of(const DensityMatrix3& rho);

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix3> states;
  std::vector<SegmentSpan> segments;

  Observables observables(std::size_t i) const { return observables_of(states[i]); }
  const DensityMatrix3& final_state() const { return states.back(); }
  /// First segment with the given label, or nullptr.
  const SegmentSpan* find(PulseLabel label) const;
  /// Checks time ordering and every state's invariants.
  void validate() const;
};

enum class WaitMethod {
  /// Closed-form solution of the undriven master equation.
  kExact,
  /// Same RK4 integrator as the pulses.
  kRungeKutta,
};

/// Member parameters with the pulse's drive fields substituted.
LambdaParams with_pulse(const LambdaParams& p, const PulseSpec& pulse);

/// Largest step propagate() accepts for this member and pulse:
/// min(duration / 20, 0.05 / max_rate).
double stable_step(const LambdaParams& p, const PulseSpec& pulse);

/// Classical fourth-order Runge-Kutta through one pulse. The step is shrunk
/// to divide the duration evenly. States are recorded every `sample_step`
/// (rounded to divide the duration), or every step when it is 0. Throws
/// ConfigError when `dt` exceeds stable_step(p, pulse). Times in the result
/// start at 0.
Trajectory propagate(const DensityMatrix3& rho0, const LambdaParams& p, const PulseSpec& pulse,
                     double dt, double sample_step = 0.0);

/// Undriven evolution over `duration`, solved in closed form.
DensityMatrix3 free_evolve(const DensityMatrix3& rho, const LambdaParams& p, double duration);

/// Runs all segments back to back. The sign of p.delta_zeeman flips at the
/// centre of every kRephasePi pulse.
Trajectory run_sequence(const DensityMatrix3& rho0, const LambdaParams& p, const SequenceSpec& seq,
                        WaitMethod waits = WaitMethod::kExact);

/// Spectral width 1 / (pi * duration) of a rectangular pulse, Hz.
double bandwidth(const PulseSpec& pulse);

/// time, populations, Re/Im of rho01, rho0e, rho1e.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// time, segment, Bloch x, y, z of the ground block.
void write_bloch_path_csv(std::ostream& out, const Trajectory& traj);

}  // namespace eitecho

#endif  // EITECHO_DYNAMICS_HPP
