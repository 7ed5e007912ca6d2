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

#include "eitecho/studies.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "eitecho/csv.hpp"
#include "eitecho/error.hpp"
#include "eitecho/parallel.hpp"

namespace eitecho {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kGoldenRatio = (std::sqrt(5.0) - 1.0) / 2.0;

/// Argmin of f on [a, b] by golden-section search.
double golden_minimize(const std::function<double(double)>& f, double a, double b, double tolerance) {
  double c = b - kGoldenRatio * (b - a);
  double d = a + kGoldenRatio * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGoldenRatio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGoldenRatio * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

void try_fit(const DecayCurve& curve, std::optional<FitResult>& fit, std::string& error) {
  try {
    fit = fit_decay(curve);
  } catch (const NumericalError& e) {
    fit.reset();
    error = e.what();
  }
}

nlohmann::json matrix_json(const Matrix2c& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 2; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < 2; ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

LambdaParams closed_system(LambdaParams p) {
  p.gamma_opt_decay = 0.0;
  p.gamma_opt_deph = 0.0;
  p.gamma_spin_deph = 0.0;
  p.gamma_excitation_deph = 0.0;
  return p;
}

}  // namespace

std::vector<QstCase> qst_cases(const EchoConfig& cfg, const EchoPhysics& physics,
                               const QstOptions& options, std::mt19937_64& rng) {
  cfg.validate();
  if (!(options.gap >= 0.0)) throw ValidationError("qst: gap must be >= 0");
  struct Spec {
    const char* name;
    double offset;
    bool rephase;
  };
  const Spec specs[] = {
      {"init", cfg.init_phase_offset, false},
      {"init_phase_90deg", cfg.init_phase_offset + 0.5 * std::numbers::pi, false},
      {"init_rephase", cfg.init_phase_offset, true},
  };
  EnsembleOptions ensemble_options;
  ensemble_options.rho0 = physics.rho0;
  ensemble_options.threads = physics.threads;

  std::vector<QstCase> cases;
  for (const Spec& s : specs) {
    EchoConfig c = cfg;
    c.init_phase_offset = s.offset;
    SequenceSpec seq;
    seq.step = c.step;
    seq.segments.push_back(make_init_pulse(c));
    if (s.rephase) {
      if (options.gap > 0.0) seq.segments.push_back(Wait{options.gap});
      seq.segments.push_back(make_rephase_pulse(c));
    }
    const Trajectory traj = ensemble_average(seq, physics.base, physics.ensemble, ensemble_options);

    QstCase out;
    out.name = s.name;
    out.target = s.rephase ? ideal_echo_target(c) : dark_ket(c.init_phase_offset);
    out.state = traj.final_state();
    const GroundQubitState ground = out.state.ground_block();
    out.result = run_tomography(ground, out.target, options.noise_rms, rng);
    // Renormalize the measured Bloch vector by the simulated ground population.
    const BlochVector t = bloch_vector(GroundQubitState::pure(out.target));
    const BlochVector& r = out.result.projections;
    const double dot = (t.x * r.x + t.y * r.y + t.z * r.z) / ground.trace();
    out.block_fidelity = std::clamp(0.5 * (1.0 + dot), 0.0, 1.0);
    cases.push_back(std::move(out));
  }
  return cases;
}

void write_qst_csv(std::ostream& out, const std::vector<QstCase>& cases) {
  CsvWriter csv(out);
  csv.header({"case", "x", "y", "z", "re_rho00", "re_rho01", "im_rho01", "re_rho11", "fidelity",
              "block_fidelity"});
  for (const auto& c : cases) {
    const Matrix2c& m = c.result.reconstructed.matrix();
    csv.field(c.name);
    csv.field(c.result.projections.x).field(c.result.projections.y).field(c.result.projections.z);
    csv.field(m(0, 0).real()).field(m(0, 1).real()).field(m(0, 1).imag()).field(m(1, 1).real());
    csv.field(c.result.fidelity_vs_target).field(c.block_fidelity);
    csv.end_row();
  }
}

nlohmann::json to_json(const std::vector<QstCase>& cases) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : cases) {
    nlohmann::json j = to_json(c.result);
    j["case"] = c.name;
    j["block_fidelity"] = c.block_fidelity;
    j["ground_block"] = matrix_json(c.state.ground_block().matrix());
    j["excited_population"] = c.state.population(kLevelE);
    out.push_back(j);
  }
  return out;
}

void FieldModel::validate() const {
  if (!(g_factor > 0.0) || !std::isfinite(g_factor)) throw ValidationError("FieldModel.g_factor must be > 0");
  if (!field.allFinite() || !compensation.allFinite()) throw ValidationError("FieldModel: fields must be finite");
}

double splitting_from_field(const FieldModel& m) {
  m.validate();
  return m.g_factor * (m.field + m.compensation).norm();
}

std::vector<ZeemanBranch> zeeman_branches(double splitting) {
  if (!(splitting >= 0.0) || !std::isfinite(splitting)) {
    throw ValidationError("zeeman_branches: splitting must be >= 0");
  }
  if (splitting == 0.0) return {{0.0, 1.0}};
  return {{-0.5 * splitting, 0.5}, {0.5 * splitting, 0.5}};
}

double locate_beat_minimum(const EchoConfig& cfg, const EchoPhysics& physics, double tau_lo,
                           double tau_hi, std::size_t coarse_points, double tolerance) {
  if (coarse_points < 3) throw ValidationError("locate_beat_minimum: needs at least 3 coarse points");
  const std::vector<double> taus = linear_taus(tau_lo, tau_hi, coarse_points);
  const DecayCurve coarse = assemble_decay_curve(cfg, taus, physics);
  const auto& a = coarse.amplitudes;
  for (std::size_t i = 1; i + 1 < a.size(); ++i) {
    if (a[i] < a[i - 1] && a[i] <= a[i + 1]) {
      auto amplitude_at = [&](double tau) {
        EchoConfig c = cfg;
        c.tau = tau;
        return echo_amplitude(c, physics);
      };
      return golden_minimize(amplitude_at, taus[i - 1], taus[i + 1], tolerance);
    }
  }
  return kNaN;
}

std::vector<FieldSweepPoint> field_sweep(const std::vector<double>& vertical_fields,
                                         const FieldModel& model, const EchoConfig& cfg,
                                         const EchoPhysics& physics, const std::vector<double>& taus) {
  model.validate();
  std::vector<FieldSweepPoint> points;
  for (double value : vertical_fields) {
    FieldModel m = model;
    m.compensation.z() = value;
    FieldSweepPoint point;
    point.field = value;
    point.splitting = splitting_from_field(m);
    EchoPhysics p = physics;
    p.ensemble.zeeman_branches = zeeman_branches(point.splitting);
    point.curve = assemble_decay_curve(cfg, taus, p);
    try_fit(point.curve, point.fit, point.fit_error);
    point.expected_minimum = point.splitting > 0.0 ? 0.5 / point.splitting : kNaN;
    point.beat_minimum = kNaN;
    if (point.splitting > 0.0 && 1.0 / point.splitting > taus.front()) {
      point.beat_minimum = locate_beat_minimum(cfg, p, taus.front(), 1.0 / point.splitting);
    }
    points.push_back(std::move(point));
  }
  return points;
}

void write_field_sweep_csv(std::ostream& out, const std::vector<FieldSweepPoint>& points) {
  CsvWriter csv(out);
  csv.header({"field_T", "splitting_Hz", "tau_s", "amplitude"});
  for (const auto& p : points) {
    for (std::size_t i = 0; i < p.curve.taus.size(); ++i) {
      csv.field(p.field).field(p.splitting).field(p.curve.taus[i]).field(p.curve.amplitudes[i]).end_row();
    }
  }
}

void write_field_fit_csv(std::ostream& out, const std::vector<FieldSweepPoint>& points) {
  CsvWriter csv(out);
  csv.header({"field_T", "splitting_Hz", "amplitude", "amplitude_ci95", "t2_s", "t2_ci95_s", "offset",
              "offset_ci95", "r_squared", "residual_autocorrelation", "beat_minimum_s",
              "expected_minimum_s", "fit_error"});
  for (const auto& p : points) {
    csv.field(p.field).field(p.splitting);
    if (p.fit) {
      csv.field(p.fit->amplitude).field(p.fit->ci95[0]).field(p.fit->t2).field(p.fit->ci95[1]);
      csv.field(p.fit->offset).field(p.fit->ci95[2]).field(p.fit->r_squared).field(p.fit->residual_autocorrelation);
    } else {
      for (int k = 0; k < 8; ++k) csv.field(kNaN);
    }
    csv.field(p.beat_minimum).field(p.expected_minimum).field(p.fit_error).end_row();
  }
}

void TemperatureModel::validate() const {
  if (!(t2_opt_ref > 0.0) || !std::isfinite(t2_opt_ref)) throw ValidationError("TemperatureModel.t2_opt_ref must be > 0");
  if (!(temperature_ref > 0.0) || !std::isfinite(temperature_ref)) {
    throw ValidationError("TemperatureModel.temperature_ref must be > 0");
  }
  if (!std::isfinite(exponent)) throw ValidationError("TemperatureModel.exponent must be finite");
}

double TemperatureModel::pure_dephasing(double temperature, double gamma_opt_decay) const {
  validate();
  if (!(temperature > 0.0)) throw ValidationError("temperature must be > 0");
  const double at_ref = 1.0 / t2_opt_ref - 0.5 * gamma_opt_decay;
  if (at_ref < 0.0) {
    throw ValidationError("TemperatureModel.t2_opt_ref exceeds twice the optical T1");
  }
  return at_ref * std::pow(temperature / temperature_ref, exponent);
}

double TemperatureModel::optical_t2(double temperature, double gamma_opt_decay) const {
  return 1.0 / (0.5 * gamma_opt_decay + pure_dephasing(temperature, gamma_opt_decay));
}

double TemperatureModel::linewidth_ratio(double t_a, double t_b) const {
  validate();
  if (!(t_a > 0.0) || !(t_b > 0.0)) throw ValidationError("temperature must be > 0");
  return std::pow(t_a / t_b, exponent);
}

std::vector<TemperaturePoint> temperature_scan(const std::vector<double>& temperatures,
                                               const TemperatureModel& tm, const EchoConfig& cfg,
                                               const EchoPhysics& physics, const std::vector<double>& taus) {
  tm.validate();
  if (taus.empty()) throw ValidationError("temperature_scan: empty tau list");
  auto physics_at = [&](double temperature) {
    EchoPhysics p = physics;
    p.base.gamma_opt_deph = tm.pure_dephasing(temperature, physics.base.gamma_opt_decay);
    return p;
  };
  EchoConfig first = cfg;
  first.tau = taus.front();
  const double reference = echo_amplitude(first, physics_at(tm.temperature_ref));

  std::vector<TemperaturePoint> points;
  for (double temperature : temperatures) {
    TemperaturePoint point;
    point.temperature = temperature;
    point.optical_t2 = tm.optical_t2(temperature, physics.base.gamma_opt_decay);
    point.curve = assemble_decay_curve(cfg, taus, physics_at(temperature));
    try_fit(point.curve, point.fit, point.fit_error);
    point.amplitude = point.curve.amplitudes.front();
    point.relative_amplitude = reference > 0.0 ? point.amplitude / reference : kNaN;
    points.push_back(std::move(point));
  }
  return points;
}

std::optional<std::size_t> plateau_knee(const std::vector<double>& values, double fraction) {
  if (values.empty()) return std::nullopt;
  return first_below(values, fraction * values.front());
}

std::optional<std::size_t> first_below(const std::vector<double>& values, double threshold) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < threshold) return i;
  }
  return std::nullopt;
}

void write_temperature_csv(std::ostream& out, const std::vector<TemperaturePoint>& points) {
  CsvWriter csv(out);
  csv.header({"temperature_K", "optical_t2_s", "t2_s", "t2_ci95_s", "amplitude", "relative_amplitude",
              "fit_error"});
  for (const auto& p : points) {
    csv.field(p.temperature).field(p.optical_t2);
    csv.field(p.fit ? p.fit->t2 : kNaN).field(p.fit ? p.fit->ci95[1] : kNaN);
    csv.field(p.amplitude).field(p.relative_amplitude).field(p.fit_error).end_row();
  }
}

void ScalingModel::validate() const {
  const double values[] = {intensity_budget, reference_intensity, t_pi_ref, t2_ref};
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("ScalingModel fields must be > 0");
  }
}

double ScalingModel::pi_duration(double optical_t2) const {
  validate();
  if (!(optical_t2 > 0.0)) throw ValidationError("optical T2 must be > 0");
  return t_pi_ref * std::sqrt(optical_t2 / t2_ref) * std::sqrt(reference_intensity / intensity_budget);
}

std::vector<ScalingPoint> scaling_study(const std::vector<double>& optical_t2s, const ScalingModel& sm,
                                        const EchoConfig& cfg, const EchoPhysics& physics) {
  sm.validate();
  const double decay = physics.base.gamma_opt_decay;
  for (double t2 : optical_t2s) {
    if (!(t2 > 0.0)) throw ValidationError("scaling_study: optical T2 values must be > 0");
    if (decay > 0.0 && 1.0 / t2 < 0.5 * decay) {
      throw ValidationError("scaling_study: optical T2 " + format_number(t2) + " s exceeds twice the optical T1");
    }
  }
  std::vector<ScalingPoint> points(optical_t2s.size());
  EnsembleOptions options;
  options.rho0 = physics.rho0;
  parallel_for(optical_t2s.size(), physics.threads, [&](std::size_t i) {
    ScalingPoint& point = points[i];
    point.optical_t2 = optical_t2s[i];
    point.pi_duration = sm.pi_duration(point.optical_t2);
    EchoConfig c = cfg;
    c.init_duration = point.pi_duration;
    c.rephase_duration = 2.0 * point.pi_duration;
    c.readout_duration = point.pi_duration;
    c.tau = 6.0 * point.pi_duration;
    c.step = std::min(cfg.step, point.pi_duration / 50.0);
    const SequenceSpec seq = make_echo_sequence(c, EchoLayout{physics.rephase, false});
    const Vector2c target = ideal_echo_target(c);

    LambdaParams open = physics.base;
    open.gamma_opt_deph = 1.0 / point.optical_t2 - 0.5 * decay;
    const GroundQubitState g = ensemble_average(seq, open, physics.ensemble, options).final_state().ground_block();
    const GroundQubitState g0 =
        ensemble_average(seq, closed_system(physics.base), physics.ensemble, options).final_state().ground_block();
    point.fidelity = fidelity(g, target);
    point.closed_fidelity = fidelity(g0, target);
    point.coherence = std::abs(g(0, 1));
    point.closed_coherence = std::abs(g0(0, 1));
  });
  return points;
}

void write_scaling_csv(std::ostream& out, const std::vector<ScalingPoint>& points) {
  CsvWriter csv(out);
  csv.header({"optical_t2_s", "pi_duration_s", "fidelity", "closed_fidelity", "coherence",
              "closed_coherence"});
  for (const auto& p : points) {
    csv.field(p.optical_t2).field(p.pi_duration).field(p.fidelity).field(p.closed_fidelity);
    csv.field(p.coherence).field(p.closed_coherence).end_row();
  }
}

CompensationResult compensation_search(const FieldModel& m, const EchoConfig& cfg,
                                       const EchoPhysics& physics, const CompensationOptions& options) {
  m.validate();
  if (!(options.range > 0.0) || !(options.coarse_step > 0.0) || !(options.tolerance > 0.0) ||
      options.max_sweeps < 1) {
    throw ValidationError("CompensationOptions: range, coarse_step, tolerance and max_sweeps must be > 0");
  }
  const std::vector<double> taus = options.taus.empty() ? linear_taus(8e-6, 20e-6, 4) : options.taus;

  CompensationResult result;
  auto objective = [&](const Eigen::Vector3d& c) {
    FieldModel trial = m;
    trial.compensation = c;
    EchoPhysics p = physics;
    p.ensemble.zeeman_branches = zeeman_branches(splitting_from_field(trial));
    const DecayCurve curve = assemble_decay_curve(cfg, taus, p);
    double sum = 0.0;
    for (double a : curve.amplitudes) sum += a;
    ++result.evaluations;
    return sum / static_cast<double>(curve.amplitudes.size());
  };

  Eigen::Vector3d c = m.compensation;
  double best = objective(c);
  result.initial_objective = best;
  const auto half = static_cast<int>(std::llround(options.range / options.coarse_step));
  std::ostringstream log;

  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    result.sweeps = sweep;
    int best_axis = -1;
    double best_value = 0.0;
    double best_gain = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      double coarse_value = c(axis);
      double coarse_best = best;
      for (int k = -half; k <= half; ++k) {
        Eigen::Vector3d trial = c;
        trial(axis) = k * options.coarse_step;
        const double f = objective(trial);
        if (f > coarse_best) {
          coarse_best = f;
          coarse_value = trial(axis);
        }
      }
      auto negated = [&](double v) {
        Eigen::Vector3d trial = c;
        trial(axis) = v;
        return -objective(trial);
      };
      const double refined = golden_minimize(negated, coarse_value - options.coarse_step,
                                             coarse_value + options.coarse_step, options.tolerance);
      Eigen::Vector3d trial = c;
      trial(axis) = refined;
      const double gain = objective(trial) - best;
      if (gain > best_gain) {
        best_gain = gain;
        best_axis = axis;
        best_value = refined;
      }
    }
    if (best_axis < 0) {
      log << "sweep " << sweep << ": no axis improves the objective; ";
      break;
    }
    const double move = std::abs(best_value - c(best_axis));
    c(best_axis) = best_value;
    best += best_gain;
    log << "sweep " << sweep << ": axis " << best_axis << " -> " << best_value << " T (gain " << best_gain
        << "); ";
    if (move < options.move_threshold) break;
  }
  result.compensation = c;
  result.objective = best;
  result.improved = best > result.initial_objective;
  if (!result.improved) log << "warning: search did not improve on the starting compensation";
  result.diagnostics = log.str();
  return result;
}

nlohmann::json to_json(const CompensationResult& result) {
  return {{"compensation_T", {result.compensation.x(), result.compensation.y(), result.compensation.z()}},
          {"objective", result.objective},
          {"initial_objective", result.initial_objective},
          {"sweeps", result.sweeps},
          {"evaluations", result.evaluations},
          {"improved", result.improved},
          {"diagnostics", result.diagnostics}};
}

}  // namespace eitecho
