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

#include "eitecho/readout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "eitecho/csv.hpp"
#include "eitecho/error.hpp"
#include "eitecho/parallel.hpp"

namespace eitecho {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMinBeatPeriods = 5;
constexpr std::size_t kMinFitPoints = 5;

struct Normalized {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
  double x_scale = 1.0;
  double y_scale = 1.0;
};

struct Evaluation {
  Eigen::Matrix3d jtwj;
  Eigen::Vector3d jtwr;
  double cost = 0.0;
};

Evaluation evaluate(const Normalized& data, const Eigen::Vector3d& q) {
  Evaluation e{Eigen::Matrix3d::Zero(), Eigen::Vector3d::Zero(), 0.0};
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    const double ex = std::exp(-data.x[i] / q(1));
    const double r = data.y[i] - (q(0) * ex + q(2));
    const Eigen::Vector3d j(ex, q(0) * ex * data.x[i] / (q(1) * q(1)), 1.0);
    e.jtwj += data.w[i] * j * j.transpose();
    e.jtwr += data.w[i] * r * j;
    e.cost += data.w[i] * r * r;
  }
  return e;
}

double cost_of(const Normalized& data, const Eigen::Vector3d& q) {
  double cost = 0.0;
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    const double r = data.y[i] - (q(0) * std::exp(-data.x[i] / q(1)) + q(2));
    cost += data.w[i] * r * r;
  }
  return cost;
}

std::string describe(const Eigen::Vector3d& q, const Normalized& data, int iterations, double cost) {
  std::ostringstream s;
  s << "iterations=" << iterations << " amplitude=" << q(0) * data.y_scale
    << " t2=" << q(1) * data.x_scale << " offset=" << q(2) * data.y_scale
    << " weighted_rss=" << cost * data.y_scale * data.y_scale;
  return s.str();
}

}  // namespace

void BeatTrace::validate() const {
  if (times.size() != signal.size()) throw ValidationError("BeatTrace: times and signal differ in length");
  if (times.size() < 2) throw ValidationError("BeatTrace: needs at least two samples");
  if (!(beat_frequency > 0.0)) throw ValidationError("BeatTrace: beat_frequency must be > 0");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw ValidationError("BeatTrace: times must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) > 1e-6 * dt) {
      throw ValidationError("BeatTrace: sampling is not uniform");
    }
  }
  if (dt > 0.25 / beat_frequency) {
    throw ConfigError("BeatTrace: sample spacing " + format_number(dt) +
                      " s is coarser than a quarter beat period");
  }
}

BeatTrace synthesize_beat(const Trajectory& traj, double beat_frequency, double gain) {
  const SegmentSpan* span = traj.find(PulseLabel::kReadout);
  if (span == nullptr) throw ValidationError("synthesize_beat: trajectory has no readout segment");
  BeatTrace trace;
  trace.beat_frequency = beat_frequency;
  const double t0 = traj.times[span->begin];
  for (std::size_t i = span->begin; i <= span->end; ++i) {
    const double t = traj.times[i] - t0;
    const Complex carrier = std::polar(1.0, kTwoPi * beat_frequency * t);
    trace.times.push_back(t);
    trace.signal.push_back(gain * (traj.states[i](kLevel1, kLevelE) * carrier).real());
  }
  trace.validate();
  return trace;
}

double beat_amplitude(const BeatTrace& trace) {
  trace.validate();
  const double dt = trace.times[1] - trace.times[0];
  const double f = trace.beat_frequency;
  const auto n = trace.times.size();
  const double periods = std::floor(static_cast<double>(n) * dt * f + 1e-9);
  if (periods < kMinBeatPeriods) {
    throw ConfigError("beat_amplitude: trace spans fewer than 5 beat periods");
  }
  const auto used = std::min(n, static_cast<std::size_t>(std::llround(periods / (f * dt))));
  Complex sum(0.0, 0.0);
  for (std::size_t i = 0; i < used; ++i) {
    sum += trace.signal[i] * std::polar(1.0, -kTwoPi * f * trace.times[i]);
  }
  return 2.0 * std::abs(sum) / static_cast<double>(used);
}

double echo_amplitude(const EchoConfig& cfg, const EchoPhysics& physics) {
  const bool beat = physics.mode == ReadoutMode::kBeat;
  const SequenceSpec seq = make_echo_sequence(cfg, EchoLayout{physics.rephase, beat});
  EnsembleOptions options;
  options.rho0 = physics.rho0;
  options.threads = physics.threads;
  const Trajectory traj = ensemble_average(seq, physics.base, physics.ensemble, options);
  if (!beat) return std::abs(traj.final_state()(kLevel0, kLevel1));
  return beat_amplitude(synthesize_beat(traj, cfg.splitting, physics.detector_gain));
}

void DecayCurve::validate() const {
  if (taus.size() != amplitudes.size() || taus.size() != repeats.size()) {
    throw ValidationError("DecayCurve: taus, amplitudes and repeats differ in length");
  }
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!std::isfinite(taus[i]) || !std::isfinite(amplitudes[i])) {
      throw ValidationError("DecayCurve: non-finite value at index " + std::to_string(i));
    }
    if (repeats[i] < 1) throw ValidationError("DecayCurve: repeats must be >= 1");
    if (i > 0 && !(taus[i] > taus[i - 1])) {
      throw ValidationError("DecayCurve: taus must be strictly increasing");
    }
  }
}

DecayCurve assemble_decay_curve(const EchoConfig& cfg, const std::vector<double>& taus,
                                const EchoPhysics& physics) {
  if (taus.size() < 3) throw ValidationError("assemble_decay_curve: needs at least 3 taus");
  DecayCurve curve;
  curve.taus = taus;
  curve.amplitudes.assign(taus.size(), 0.0);
  curve.repeats.assign(taus.size(), 1);
  for (std::size_t i = 1; i < taus.size(); ++i) {
    if (!(taus[i] > taus[i - 1])) throw ValidationError("assemble_decay_curve: taus must increase");
  }
  EchoPhysics inner = physics;
  inner.threads = 1;
  parallel_for(taus.size(), physics.threads, [&](std::size_t i) {
    EchoConfig c = cfg;
    c.tau = taus[i];
    curve.amplitudes[i] = echo_amplitude(c, inner);
  });
  return curve;
}

DecayCurve add_noise(const DecayCurve& curve, double sigma, std::mt19937_64& rng) {
  curve.validate();
  if (!(sigma >= 0.0)) throw ValidationError("add_noise: sigma must be >= 0");
  DecayCurve noisy = curve;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < noisy.amplitudes.size(); ++i) {
    noisy.amplitudes[i] += sigma / std::sqrt(static_cast<double>(noisy.repeats[i])) * normal(rng);
  }
  return noisy;
}

double FitResult::model(double tau) const { return amplitude * std::exp(-tau / t2) + offset; }

FitResult fit_decay(const DecayCurve& curve, const FitOptions& options) {
  curve.validate();
  const std::size_t n = curve.taus.size();
  if (n < kMinFitPoints) throw NumericalError("fit_decay: needs at least 5 points");
  const auto [lo, hi] = std::minmax_element(curve.amplitudes.begin(), curve.amplitudes.end());
  const double y_min = *lo;
  const double y_max = *hi;
  if (!(y_max > y_min)) throw NumericalError("fit_decay: degenerate curve with zero variance");

  // Work in units of the largest tau and the largest |amplitude|.
  Normalized data;
  data.x_scale = std::max(std::abs(curve.taus.front()), std::abs(curve.taus.back()));
  data.y_scale = std::max(std::abs(y_min), std::abs(y_max));
  for (std::size_t i = 0; i < n; ++i) {
    data.x.push_back(curve.taus[i] / data.x_scale);
    data.y.push_back(curve.amplitudes[i] / data.y_scale);
    data.w.push_back(static_cast<double>(curve.repeats[i]));
  }

  const double span = (curve.taus.back() - curve.taus.front()) / data.x_scale;
  const bool rising = data.y.back() > data.y.front();
  const double range = (y_max - y_min) / data.y_scale;
  Eigen::Vector3d q(rising ? -range : range, 0.5 * span, (rising ? y_max : y_min) / data.y_scale);

  double lambda = 1e-3;
  double cost = cost_of(data, q);
  bool converged = false;
  int iteration = 0;
  while (iteration < options.max_iterations) {
    ++iteration;
    const Evaluation e = evaluate(data, q);
    Eigen::Matrix3d a = e.jtwj;
    for (int k = 0; k < 3; ++k) a(k, k) += lambda * std::max(e.jtwj(k, k), 1e-12);
    const Eigen::Vector3d step = a.ldlt().solve(e.jtwr);
    if (!step.allFinite()) break;
    const Eigen::Vector3d trial = q + step;
    const double trial_cost = trial(1) > 0.0 ? cost_of(data, trial) : INFINITY;
    if (trial_cost < cost) {
      q = trial;
      cost = trial_cost;
      lambda = std::max(lambda / 10.0, 1e-12);
    } else {
      lambda *= 10.0;
    }
    if (step.norm() < options.tolerance * (q.norm() + options.tolerance)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NumericalError("fit_decay: no convergence after " + std::to_string(options.max_iterations) +
                         " iterations (" + describe(q, data, iteration, cost) + ")");
  }

  const Evaluation e = evaluate(data, q);
  const double dof = static_cast<double>(n - 3);
  const double s2 = e.cost / dof;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(e.jtwj);
  if (!lu.isInvertible()) {
    throw NumericalError("fit_decay: singular Jacobian at optimum (" + describe(q, data, iteration, cost) + ")");
  }
  const Eigen::Vector3d scale(data.y_scale, data.x_scale, data.y_scale);
  FitResult fit;
  fit.amplitude = q(0) * data.y_scale;
  fit.t2 = q(1) * data.x_scale;
  fit.offset = q(2) * data.y_scale;
  fit.covariance = scale.asDiagonal() * (s2 * lu.inverse()) * scale.asDiagonal();
  const boost::math::students_t dist(dof);
  const double t_quantile = boost::math::quantile(dist, 0.975);
  for (int k = 0; k < 3; ++k) fit.ci95[k] = t_quantile * std::sqrt(std::max(fit.covariance(k, k), 0.0));
  fit.iterations = iteration;

  // Goodness of fit in the original units.
  double w_sum = 0.0;
  double y_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w_sum += data.w[i];
    y_mean += data.w[i] * curve.amplitudes[i];
  }
  y_mean /= w_sum;
  double total = 0.0;
  std::vector<double> residuals(n);
  for (std::size_t i = 0; i < n; ++i) {
    residuals[i] = curve.amplitudes[i] - fit.model(curve.taus[i]);
    fit.rss += data.w[i] * residuals[i] * residuals[i];
    total += data.w[i] * (curve.amplitudes[i] - y_mean) * (curve.amplitudes[i] - y_mean);
  }
  fit.reduced_chi2 = fit.rss / dof;
  fit.r_squared = 1.0 - fit.rss / total;
  double r_mean = 0.0;
  for (double r : residuals) r_mean += r;
  r_mean /= static_cast<double>(n);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    den += (residuals[i] - r_mean) * (residuals[i] - r_mean);
    if (i > 0) num += (residuals[i] - r_mean) * (residuals[i - 1] - r_mean);
  }
  fit.residual_autocorrelation = den > 0.0 ? num / den : 0.0;
  return fit;
}

std::vector<double> linear_taus(double first, double last, std::size_t count) {
  if (count < 2 || !(last > first)) throw ValidationError("linear_taus: need count >= 2 and last > first");
  std::vector<double> taus(count);
  for (std::size_t i = 0; i < count; ++i) {
    taus[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return taus;
}

void write_beat_trace_csv(std::ostream& out, const BeatTrace& trace) {
  CsvWriter csv(out);
  csv.header({"time_s", "signal"});
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    csv.field(trace.times[i]).field(trace.signal[i]).end_row();
  }
}

void write_decay_curve_csv(std::ostream& out, const DecayCurve& curve) {
  CsvWriter csv(out);
  csv.header({"tau_s", "amplitude", "repeats"});
  for (std::size_t i = 0; i < curve.taus.size(); ++i) {
    csv.field(curve.taus[i]).field(curve.amplitudes[i]).field(curve.repeats[i]).end_row();
  }
}

nlohmann::json to_json(const DecayCurve& curve) {
  return {{"taus_s", curve.taus}, {"amplitudes", curve.amplitudes}, {"repeats", curve.repeats}};
}

nlohmann::json to_json(const FitResult& fit) {
  nlohmann::json cov = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) {
    cov.push_back({fit.covariance(i, 0), fit.covariance(i, 1), fit.covariance(i, 2)});
  }
  return {{"amplitude", fit.amplitude},
          {"t2_s", fit.t2},
          {"offset", fit.offset},
          {"ci95", {{"amplitude", fit.ci95[0]}, {"t2_s", fit.ci95[1]}, {"offset", fit.ci95[2]}}},
          {"covariance", cov},
          {"iterations", fit.iterations},
          {"rss", fit.rss},
          {"reduced_chi2", fit.reduced_chi2},
          {"r_squared", fit.r_squared},
          {"residual_autocorrelation", fit.residual_autocorrelation}};
}

}  // namespace eitecho
