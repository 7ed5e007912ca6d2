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

// Ground-qubit state tomography by linear inversion.
//
// Populations are read out ideally (plus optional Gaussian noise); the x and
// y projections use ideal spin pre-rotations that map the respective Bloch
// axis onto z.

#ifndef EITECHO_TOMOGRAPHY_HPP
#define EITECHO_TOMOGRAPHY_HPP

#include <random>

#include <nlohmann/json.hpp>

#include "eitecho/qstate.hpp"

namespace eitecho {

struct Populations {
  double p0 = 0.0;
  double p1 = 0.0;
  double pe = 0.0;
};

/// Diagonal of rho, each entry plus N(0, noise_rms) when noise_rms > 0.
Populations measure_populations(const DensityMatrix3& rho, double noise_rms, std::mt19937_64& rng);

/// (tr(X rho), tr(Y rho), tr(Z rho)) estimated as population differences
/// after the pre-rotations R_y(-pi/2), R_x(pi/2) and no rotation.
BlochVector projection_measurements(const GroundQubitState& rho_ground, double noise_rms,
                                    std::mt19937_64& rng);

/// (I + xX + yY + zZ) / 2. Bloch vectors longer than 1 (noise) are clamped to
/// the nearest state; longer than 1.05 is rejected as inconsistent.
GroundQubitState reconstruct(double x, double y, double z);

struct TomographyResult {
  BlochVector projections;
  GroundQubitState reconstructed;
  double fidelity_vs_target = 0.0;
};

TomographyResult run_tomography(const GroundQubitState& rho_ground, const Vector2c& target,
                                double noise_rms, std::mt19937_64& rng);

nlohmann::json to_json(const TomographyResult& result);

}  // namespace eitecho

#endif  // EITECHO_TOMOGRAPHY_HPP
