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

// Study drivers: state tomography of the echo pulses, magnetic-field sweep,
// temperature scan, optical-T2 scaling and field compensation.

#ifndef EITECHO_STUDIES_HPP
#define EITECHO_STUDIES_HPP

#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "eitecho/readout.hpp"
#include "eitecho/tomography.hpp"

namespace eitecho {

struct QstOptions {
  double noise_rms = 0.0;
  /// Free evolution between the init and rephasing pulses of the third case.
  double gap = 2e-6;
};

struct QstCase {
  std::string name;
  Vector2c target;
  DensityMatrix3 state;
  TomographyResult result;
  /// Fidelity of the ground block renormalized to unit trace.
  double block_fidelity = 0.0;
};

/// The three characterized states: init at the configured phase, init with a
/// further 90 degrees of relative phase, and init followed by the rephasing
/// pulse.
std::vector<QstCase> qst_cases(const EchoConfig& cfg, const EchoPhysics& physics,
                               const QstOptions& options, std::mt19937_64& rng);

void write_qst_csv(std::ostream& out, const std::vector<QstCase>& cases);
nlohmann::json to_json(const std::vector<QstCase>& cases);

struct FieldModel {
  /// Hz per tesla along the strongest g axis.
  double g_factor = 1.2e8;
  /// Ambient field, tesla.
  Eigen::Vector3d field = Eigen::Vector3d::Zero();
  /// Applied compensation field, tesla.
  Eigen::Vector3d compensation = Eigen::Vector3d::Zero();

  void validate() const;
};

/// g_factor * |field + compensation|, Hz.
double splitting_from_field(const FieldModel& m);

/// Two equal branches at -+splitting/2; a single unshifted branch for 0.
std::vector<ZeemanBranch> zeeman_branches(double splitting);

/// First local minimum of the echo amplitude in [tau_lo, tau_hi]: coarse scan
/// then golden-section refinement to `tolerance`. NaN when the scan has no
/// interior minimum.
double locate_beat_minimum(const EchoConfig& cfg, const EchoPhysics& physics, double tau_lo,
                           double tau_hi, std::size_t coarse_points = 25, double tolerance = 0.05e-6);

struct FieldSweepPoint {
  /// Swept vertical compensation component, tesla.
  double field = 0.0;
  double splitting = 0.0;
  DecayCurve curve;
  std::optional<FitResult> fit;
  std::string fit_error;
  /// NaN when no minimum is expected or found.
  double beat_minimum = 0.0;
  double expected_minimum = 0.0;
};

/// For every value, sets the vertical compensation, splits the spin levels
/// into two branches, simulates and fits the decay curve and locates the
/// first beat minimum.
std::vector<FieldSweepPoint> field_sweep(const std::vector<double>& vertical_fields,
                                         const FieldModel& model, const EchoConfig& cfg,
                                         const EchoPhysics& physics, const std::vector<double>& taus);

/// field, splitting, tau, amplitude: one row per (field, tau).
void write_field_sweep_csv(std::ostream& out, const std::vector<FieldSweepPoint>& points);
void write_field_fit_csv(std::ostream& out, const std::vector<FieldSweepPoint>& points);


struct TemperatureModel {
  /// Optical T2 at temperature_ref, seconds.
  double t2_opt_ref = 30e-6;
  double temperature_ref = 4.0;
  double exponent = 7.0;

  void validate() const;
  /// Optical pure-dephasing rate at T; the decay part of the linewidth is
  /// temperature independent.
  double pure_dephasing(double temperature, double gamma_opt_decay) const;
  double optical_t2(double temperature, double gamma_opt_decay) const;
  /// Ratio of the temperature-dependent linewidths at t_a and t_b.
  double linewidth_ratio(double t_a, double t_b) const;
};

struct TemperaturePoint {
  double temperature = 0.0;
  double optical_t2 = 0.0;
  DecayCurve curve;
  std::optional<FitResult> fit;
  std::string fit_error;
  /// Echo amplitude at the first tau of the chain.
  double amplitude = 0.0;
  /// amplitude divided by its value at temperature_ref.
  double relative_amplitude = 0.0;
};

std::vector<TemperaturePoint> temperature_scan(const std::vector<double>& temperatures,
                                               const TemperatureModel& tm, const EchoConfig& cfg,
                                               const EchoPhysics& physics, const std::vector<double>& taus);

/// First index whose value drops below fraction * values[0].
std::optional<std::size_t> plateau_knee(const std::vector<double>& values, double fraction = 0.9);
/// First index whose value is below threshold.
std::optional<std::size_t> first_below(const std::vector<double>& values, double threshold);

void write_temperature_csv(std::ostream& out, const std::vector<TemperaturePoint>& points);


struct ScalingModel {
  /// Available intensity, W/m^2: 100 mW over a 70 um diameter spot.
  double intensity_budget = 0.1 / (std::numbers::pi * 35e-6 * 35e-6);
  /// Intensity at which the reference pair below was taken.
  double reference_intensity = 0.1 / (std::numbers::pi * 35e-6 * 35e-6);
  /// Pi-pulse duration for a radiatively limited optical T2 of t2_ref.
  double t_pi_ref = 0.1e-6;
  double t2_ref = 100e-6;

  void validate() const;
  /// t_pi_ref * sqrt(t2 / t2_ref) * sqrt(reference_intensity / intensity_budget).
  double pi_duration(double optical_t2) const;
};

struct ScalingPoint {
  double optical_t2 = 0.0;
  double pi_duration = 0.0;
  double fidelity = 0.0;
  double closed_fidelity = 0.0;
  /// |rho_01| before readout, and its closed-system value.
  double coherence = 0.0;
  double closed_coherence = 0.0;
};

/// Echo with pulse durations set by the scaling model (init T_pi, rephase
/// 2 T_pi, tau = 6 T_pi); fidelity of the pre-readout ground block against
/// the ideal echo state. The optical T2 enters as pure dephasing on top of
/// the base decay rate.
std::vector<ScalingPoint> scaling_study(const std::vector<double>& optical_t2s, const ScalingModel& sm,
                                        const EchoConfig& cfg, const EchoPhysics& physics);

void write_scaling_csv(std::ostream& out, const std::vector<ScalingPoint>& points);


struct CompensationOptions {
  /// Coarse scan covers [-range, range] on every axis.
  double range = 100e-6;
  double coarse_step = 10e-6;
  double tolerance = 0.05e-6;
  int max_sweeps = 10;
  /// Search stops once the best axis moves less than this.
  double move_threshold = 0.1e-6;
  /// Storage times of the objective; empty selects 8-20 us, short enough that
  /// the echo falls monotonically with the splitting up to about 20 kHz.
  std::vector<double> taus;
};

struct CompensationResult {
  Eigen::Vector3d compensation = Eigen::Vector3d::Zero();
  double objective = 0.0;
  double initial_objective = 0.0;
  int sweeps = 0;
  int evaluations = 0;
  bool improved = false;
  std::string diagnostics;
};

/// Greedy coordinate search over the three compensation components that
/// maximizes the mean echo amplitude over the tau chain.
CompensationResult compensation_search(const FieldModel& m, const EchoConfig& cfg,
                                       const EchoPhysics& physics, const CompensationOptions& options);

nlohmann::json to_json(const CompensationResult& result);

}  // namespace eitecho

#endif  // EITECHO_STUDIES_HPP
