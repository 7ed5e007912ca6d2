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

// Raman-beat readout, echo decay curves and exponential fits.
//
// The simulation runs in the rotating frame, so the hyperfine carrier is
// absent; the detected beat is rebuilt by re-modulating rho_1e(t) at the
// ground splitting.

#ifndef EITECHO_READOUT_HPP
#define EITECHO_READOUT_HPP

#include <array>
#include <ostream>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "eitecho/ensemble.hpp"
#include "eitecho/sequences.hpp"

namespace eitecho {

struct BeatTrace {
  std::vector<double> times;
  std::vector<double> signal;
  double beat_frequency = 10.2e6;

  void validate() const;
};

/// gain * Re[rho_1e(t) exp(i 2 pi f t)] over the readout segment of `traj`,
/// with t measured from the start of the readout pulse.
BeatTrace synthesize_beat(const Trajectory& traj, double beat_frequency, double gain = 1.0);

/// (2/N) |sum_n s_n exp(-i 2 pi f t_n)| over the largest whole number of beat
/// periods in the trace. Needs at least 5 periods.
double beat_amplitude(const BeatTrace& trace);

enum class ReadoutMode {
  /// Fourier amplitude of the synthesized beat during the readout pulse.
  kBeat,
  /// |rho_01| at the start of the readout, without simulating the pulse.
  kProxy,
};

/// Everything besides the sequence timing that an echo simulation needs.
struct EchoPhysics {
  LambdaParams base;
  EnsembleSpec ensemble;
  ReadoutMode mode = ReadoutMode::kBeat;
  DensityMatrix3 rho0 = mixed_ground_state();
  unsigned threads = 1;
  double detector_gain = 1.0;
  bool rephase = true;
};

/// Echo signal of one ensemble-averaged sequence at cfg.tau.
double echo_amplitude(const EchoConfig& cfg, const EchoPhysics& physics);

struct DecayCurve {
  std::vector<double> taus;
  std::vector<double> amplitudes;
  /// Number of averaged repeats per point; used as fit weights.
  std::vector<int> repeats;

  void validate() const;
};

/// One echo simulation per tau, data-parallel over tau.
DecayCurve assemble_decay_curve(const EchoConfig& cfg, const std::vector<double>& taus,
                                const EchoPhysics& physics);

/// Adds N(0, sigma / sqrt(repeats)) to every amplitude.
DecayCurve add_noise(const DecayCurve& curve, double sigma, std::mt19937_64& rng);

struct FitOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;
};

/// A exp(-tau / T2) + C.
struct FitResult {
  double amplitude = 0.0;
  double t2 = 0.0;
  double offset = 0.0;
  /// Parameter order (amplitude, t2, offset).
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  std::array<double, 3> ci95{};
  int iterations = 0;
  double rss = 0.0;
  double reduced_chi2 = 0.0;
  double r_squared = 0.0;
  /// Lag-1 autocorrelation of the residuals; near 1 for structured misfit.
  double residual_autocorrelation = 0.0;

  double model(double tau) const;
};

/// Weighted Levenberg-Marquardt fit. Throws NumericalError on fewer than 5
/// points, a flat curve, or non-convergence.
FitResult fit_decay(const DecayCurve& curve, const FitOptions& options = {});

/// `count` evenly spaced taus from `first` to `last` inclusive.
std::vector<double> linear_taus(double first, double last, std::size_t count);

void write_beat_trace_csv(std::ostream& out, const BeatTrace& trace);
void write_decay_curve_csv(std::ostream& out, const DecayCurve& curve);
nlohmann::json to_json(const DecayCurve& curve);
nlohmann::json to_json(const FitResult& fit);

}  // namespace eitecho

#endif  // EITECHO_READOUT_HPP
