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

#include "eitecho/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "eitecho/csv.hpp"
#include "eitecho/error.hpp"

namespace eitecho {

namespace {

constexpr double kStepSlack = 1e-12;

std::size_t step_count(double duration, double dt) {
  const double n = std::ceil(duration / dt * (1.0 - kStepSlack));
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

Matrix3c rk4_step(const LindbladGenerator& f, const Matrix3c& y, double h) {
  const Matrix3c k1 = f(y);
  const Matrix3c k2 = f(y + (0.5 * h) * k1);
  const Matrix3c k3 = f(y + (0.5 * h) * k2);
  const Matrix3c k4 = f(y + h * k3);
  Matrix3c next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return 0.5 * (next + next.adjoint());
}

double segment_duration(const Segment& s) {
  return std::visit([](const auto& seg) { return seg.duration; }, s);
}

void append(Trajectory& out, const Trajectory& part, double t0) {
  const std::size_t offset = out.states.empty() ? 0 : out.states.size() - 1;
  const std::size_t first = out.states.empty() ? 0 : 1;
  for (std::size_t i = first; i < part.states.size(); ++i) {
    out.times.push_back(t0 + part.times[i]);
    out.states.push_back(part.states[i]);
  }
  for (const auto& span : part.segments) {
    out.segments.push_back({span.label, span.begin + offset, span.end + offset});
  }
}

}  // namespace

std::string_view to_string(PulseLabel label) {
  switch (label) {
    case PulseLabel::kInitPiHalf:
      return "init_pi_half";
    case PulseLabel::kRephasePi:
      return "rephase_pi";
    case PulseLabel::kReadout:
      return "readout";
    case PulseLabel::kCustom:
      return "custom";
    case PulseLabel::kWait:
      return "wait";
  }
  return "custom";
}

void PulseSpec::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ValidationError("PulseSpec.duration must be > 0");
  }
  if (!(rabi0 >= 0.0) || !(rabi1 >= 0.0) || !std::isfinite(rabi0) || !std::isfinite(rabi1)) {
    throw ValidationError("PulseSpec Rabi frequencies must be finite and >= 0");
  }
  if (!std::isfinite(phase0) || !std::isfinite(phase1)) {
    throw ValidationError("PulseSpec phases must be finite");
  }
}

double SequenceSpec::total_duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += segment_duration(s);
  return total;
}

void SequenceSpec::validate() const {
  if (segments.empty() || !(total_duration() > 0.0)) {
    throw ValidationError("SequenceSpec: total duration must be > 0");
  }
  if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("SequenceSpec.step must be > 0");
  if (!(wait_sample_step >= 0.0)) throw ValidationError("SequenceSpec.wait_sample_step must be >= 0");
  if (!(sample_step >= 0.0) || !std::isfinite(sample_step)) {
    throw ValidationError("SequenceSpec.sample_step must be >= 0");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (const auto* pulse = std::get_if<PulseSpec>(&segments[i])) {
      pulse->validate();
      if (pulse->label == PulseLabel::kReadout && i + 1 != segments.size()) {
        throw ValidationError("SequenceSpec: readout pulse must be the last segment");
      }
    } else if (!(std::get<Wait>(segments[i]).duration >= 0.0)) {
      throw ValidationError("SequenceSpec: wait duration must be >= 0");
    }
  }
}

Observables observables_of(const DensityMatrix3& rho) {
  return {rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real(), rho(0, 1), rho(0, 2), rho(1, 2)};
}

const SegmentSpan* Trajectory::find(PulseLabel label) const {
  for (const auto& s : segments) {
    if (s.label == label) return &s;
  }
  return nullptr;
}

void Trajectory::validate() const {
  if (times.size() != states.size() || times.empty()) {
    throw ValidationError("Trajectory: times/states size mismatch");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ValidationError("Trajectory: times not increasing");
  }
  for (const auto& s : states) s.validate();
}

LambdaParams with_pulse(const LambdaParams& p, const PulseSpec& pulse) {
  LambdaParams q = p;
  q.rabi0 = pulse.rabi0;
  q.rabi1 = pulse.rabi1;
  q.phase0 = pulse.phase0;
  q.phase1 = pulse.phase1;
  return q;
}

double stable_step(const LambdaParams& p, const PulseSpec& pulse) {
  const double rate = with_pulse(p, pulse).max_rate();
  const double by_duration = pulse.duration / 20.0;
  if (rate <= 0.0) return by_duration;
  return std::min(by_duration, 0.05 / rate);
}

Trajectory propagate(const DensityMatrix3& rho0, const LambdaParams& p, const PulseSpec& pulse,
                     double dt, double sample_step) {
  pulse.validate();
  p.validate();
  const double limit = stable_step(p, pulse);
  if (!(dt > 0.0) || dt > limit * (1.0 + kStepSlack)) {
    throw ConfigError("propagate: step " + format_number(dt) + " s exceeds the stable limit " +
                      format_number(limit) + " s for pulse '" + std::string(to_string(pulse.label)) +
                      "'");
  }
  if (!(sample_step >= 0.0) || !std::isfinite(sample_step)) {
    throw ValidationError("propagate: sample_step must be >= 0");
  }
  const std::size_t samples = step_count(pulse.duration, sample_step > 0.0 ? sample_step : dt);
  const std::size_t per_sample = sample_step > 0.0 ? step_count(pulse.duration / static_cast<double>(samples), dt) : 1;
  const std::size_t n = samples * per_sample;
  const double h = pulse.duration / static_cast<double>(n);
  const LindbladGenerator f(with_pulse(p, pulse));

  Trajectory traj;
  traj.times.reserve(samples + 1);
  traj.states.reserve(samples + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);
  Matrix3c y = rho0.matrix();
  for (std::size_t k = 1; k <= n; ++k) {
    y = rk4_step(f, y, h);
    if (k % per_sample != 0) continue;
    traj.times.push_back(k == n ? pulse.duration : static_cast<double>(k) * h);
    traj.states.push_back(DensityMatrix3::unchecked(y));
  }
  traj.segments.push_back({pulse.label, 0, samples});
  return traj;
}

DensityMatrix3 free_evolve(const DensityMatrix3& rho, const LambdaParams& p, double duration) {
  const LambdaParams q = with_pulse(p, PulseSpec{duration, 0.0, 0.0, 0.0, 0.0, PulseLabel::kCustom});
  const Matrix3c h = hamiltonian(q);
  const Matrix3c& r = rho.matrix();
  Matrix3c out = r;

  const double pe = r(2, 2).real();
  const double survived = pe * std::exp(-q.gamma_opt_decay * duration);
  const double decayed = pe - survived;
  out(2, 2) = survived;
  out(0, 0) = r(0, 0).real() + q.branch0 * decayed;
  out(1, 1) = r(1, 1).real() + (1.0 - q.branch0) * decayed;

  const double optical_rate = q.optical_coherence_decay() + 0.25 * q.spin_dephasing();
  const double spin_rate = q.spin_dephasing();
  auto evolve = [&](int j, int k, double rate) {
    const double freq = (h(j, j) - h(k, k)).real();
    const Complex factor = std::exp(Complex(-rate * duration, -freq * duration));
    out(j, k) = r(j, k) * factor;
    out(k, j) = std::conj(out(j, k));
  };
  evolve(0, 1, spin_rate);
  evolve(0, 2, optical_rate);
  evolve(1, 2, optical_rate);
  return DensityMatrix3::unchecked(out);
}

Trajectory run_sequence(const DensityMatrix3& rho0, const LambdaParams& p, const SequenceSpec& seq,
                        WaitMethod waits) {
  seq.validate();
  p.validate();
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);
  double t = 0.0;
  double zeeman_sign = 1.0;

  for (const auto& segment : seq.segments) {
    LambdaParams member = p;
    member.delta_zeeman = zeeman_sign * p.delta_zeeman;
    const double duration = segment_duration(segment);
    if (!(duration > 0.0)) continue;

    if (const auto* pulse = std::get_if<PulseSpec>(&segment)) {
      if (pulse->label == PulseLabel::kRephasePi) {
        // The branch exchange acts at the pulse centre, as for an
        // instantaneous pi pulse there.
        PulseSpec half = *pulse;
        half.duration = 0.5 * pulse->duration;
        LambdaParams flipped = member;
        flipped.delta_zeeman = -member.delta_zeeman;
        const Trajectory first = propagate(traj.states.back(), member, half,
                                           std::min(seq.step, stable_step(member, half)), seq.sample_step);
        const Trajectory second = propagate(first.final_state(), flipped, half,
                                            std::min(seq.step, stable_step(flipped, half)), seq.sample_step);
        Trajectory part;
        append(part, first, 0.0);
        append(part, second, half.duration);
        part.segments.assign(1, {PulseLabel::kRephasePi, 0, part.states.size() - 1});
        append(traj, part, t);
        zeeman_sign = -zeeman_sign;
      } else {
        const double dt = std::min(seq.step, stable_step(member, *pulse));
        append(traj, propagate(traj.states.back(), member, *pulse, dt, seq.sample_step), t);
      }
    } else if (waits == WaitMethod::kRungeKutta) {
      PulseSpec idle{duration, 0.0, 0.0, 0.0, 0.0, PulseLabel::kWait};
      // Same output grid as the exact waits.
      const double dt = std::min(seq.step, stable_step(member, idle));
      const double sample = seq.wait_sample_step > 0.0 ? seq.wait_sample_step : duration;
      append(traj, propagate(traj.states.back(), member, idle, dt, sample), t);
    } else {
      Trajectory part;
      const DensityMatrix3 start = traj.states.back();
      part.times.push_back(0.0);
      part.states.push_back(start);
      if (seq.wait_sample_step > 0.0) {
        const std::size_t n = step_count(duration, seq.wait_sample_step);
        const double h = duration / static_cast<double>(n);
        for (std::size_t k = 1; k < n; ++k) {
          const double tk = static_cast<double>(k) * h;
          part.times.push_back(tk);
          part.states.push_back(free_evolve(start, member, tk));
        }
      }
      part.times.push_back(duration);
      part.states.push_back(free_evolve(start, member, duration));
      part.segments.push_back({PulseLabel::kWait, 0, part.states.size() - 1});
      append(traj, part, t);
    }
    t += duration;
  }
  return traj;
}

double bandwidth(const PulseSpec& pulse) {
  if (!(pulse.duration > 0.0)) throw ValidationError("bandwidth: duration must be > 0");
  return 1.0 / (std::numbers::pi * pulse.duration);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  CsvWriter csv(out);
  csv.header({"time_s", "p0", "p1", "pe", "re_rho01", "im_rho01", "re_rho0e", "im_rho0e",
              "re_rho1e", "im_rho1e"});
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const Observables o = traj.observables(i);
    csv.field(traj.times[i]).field(o.p0).field(o.p1).field(o.pe);
    csv.field(o.rho01.real()).field(o.rho01.imag());
    csv.field(o.rho0e.real()).field(o.rho0e.imag());
    csv.field(o.rho1e.real()).field(o.rho1e.imag());
    csv.end_row();
  }
}

void write_bloch_path_csv(std::ostream& out, const Trajectory& traj) {
  CsvWriter csv(out);
  csv.header({"time_s", "segment", "x", "y", "z"});
  std::size_t seg = 0;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    while (seg + 1 < traj.segments.size() && i > traj.segments[seg].end) ++seg;
    const Matrix2c g = traj.states[i].matrix().topLeftCorner<2, 2>();
    const double x = 2.0 * g(0, 1).real();
    const double y = -2.0 * g(0, 1).imag();
    const double z = (g(0, 0) - g(1, 1)).real();
    csv.field(traj.times[i]);
    csv.field(traj.segments.empty() ? std::string_view("none") : to_string(traj.segments[seg].label));
    csv.field(x).field(y).field(z);
    csv.end_row();
  }
}

}  // namespace eitecho
