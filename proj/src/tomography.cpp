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

#include "eitecho/tomography.hpp"

#include <cmath>
#include <numbers>

#include "eitecho/error.hpp"

namespace eitecho {

namespace {

constexpr double kInconsistentLength = 1.05;

/// exp(-i angle/2 sigma).
Matrix2c spin_rotation(const Matrix2c& sigma, double angle) {
  const Complex i(0.0, 1.0);
  return std::cos(0.5 * angle) * Matrix2c::Identity() - i * std::sin(0.5 * angle) * sigma;
}

double population_difference(const Matrix2c& rho, double noise_rms, std::mt19937_64& rng) {
  double p0 = rho(0, 0).real();
  double p1 = rho(1, 1).real();
  if (noise_rms > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_rms);
    p0 += noise(rng);
    p1 += noise(rng);
  }
  return p0 - p1;
}

}  // namespace

Populations measure_populations(const DensityMatrix3& rho, double noise_rms, std::mt19937_64& rng) {
  if (!(noise_rms >= 0.0)) throw ValidationError("measure_populations: noise_rms must be >= 0");
  Populations p{rho.population(kLevel0), rho.population(kLevel1), rho.population(kLevelE)};
  if (noise_rms > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_rms);
    p.p0 += noise(rng);
    p.p1 += noise(rng);
    p.pe += noise(rng);
  }
  return p;
}

BlochVector projection_measurements(const GroundQubitState& rho_ground, double noise_rms,
                                    std::mt19937_64& rng) {
  rho_ground.validate();
  if (!(noise_rms >= 0.0)) throw ValidationError("projection_measurements: noise_rms must be >= 0");
  const Matrix2c& rho = rho_ground.matrix();
  const Matrix2c ux = spin_rotation(pauli_y(), -0.5 * std::numbers::pi);
  const Matrix2c uy = spin_rotation(pauli_x(), 0.5 * std::numbers::pi);
  BlochVector v;
  v.x = population_difference(ux * rho * ux.adjoint(), noise_rms, rng);
  v.y = population_difference(uy * rho * uy.adjoint(), noise_rms, rng);
  v.z = population_difference(rho, noise_rms, rng);
  return v;
}

GroundQubitState reconstruct(double x, double y, double z) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
    throw ValidationError("reconstruct: non-finite projection");
  }
  const double length = std::sqrt(x * x + y * y + z * z);
  if (length > kInconsistentLength) {
    throw NumericalError("reconstruct: Bloch vector length " + std::to_string(length) +
                         " is inconsistent with a physical state");
  }
  const Matrix2c rho =
      0.5 * (Matrix2c::Identity() + x * pauli_x() + y * pauli_y() + z * pauli_z());
  if (length <= 1.0) return GroundQubitState::from_matrix(rho);

  // Truncate negative eigenvalues and renormalize the trace.
  Eigen::SelfAdjointEigenSolver<Matrix2c> solver(rho);
  Eigen::Vector2d values = solver.eigenvalues().cwiseMax(0.0);
  values /= values.sum();
  const Matrix2c clamped =
      solver.eigenvectors() * values.cast<Complex>().asDiagonal() * solver.eigenvectors().adjoint();
  return GroundQubitState::from_matrix(0.5 * (clamped + clamped.adjoint()));
}

TomographyResult run_tomography(const GroundQubitState& rho_ground, const Vector2c& target,
                                double noise_rms, std::mt19937_64& rng) {
  TomographyResult result;
  result.projections = projection_measurements(rho_ground, noise_rms, rng);
  result.reconstructed = reconstruct(result.projections.x, result.projections.y, result.projections.z);
  result.fidelity_vs_target = fidelity(result.reconstructed, target);
  return result;
}

nlohmann::json to_json(const TomographyResult& result) {
  const Matrix2c& m = result.reconstructed.matrix();
  nlohmann::json elements = nlohmann::json::array();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) elements.push_back({m(i, j).real(), m(i, j).imag()});
  }
  return {{"projections", {{"x", result.projections.x}, {"y", result.projections.y}, {"z", result.projections.z}}},
          {"reconstructed", elements},
          {"fidelity", result.fidelity_vs_target}};
}

}  // namespace eitecho
