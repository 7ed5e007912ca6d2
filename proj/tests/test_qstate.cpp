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

#include "eitecho/qstate.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "eitecho/error.hpp"
#include "oracles.hpp"

namespace eitecho {
namespace {

TEST(DensityMatrix3, AcceptsSubNormalizedStates) {
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = 0.25;
  m(1, 1) = 0.25;
  const DensityMatrix3 rho = DensityMatrix3::from_matrix(m);
  EXPECT_DOUBLE_EQ(rho.trace(), 0.5);
  EXPECT_TRUE(rho.is_valid());
}

TEST(DensityMatrix3, RejectsNonHermitian) {
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = 1.0;
  m(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix3::from_matrix(m), ValidationError);
}

TEST(DensityMatrix3, RejectsTraceAboveOne) {
  Matrix3c m = Matrix3c::Identity() * 0.5;
  EXPECT_THROW(DensityMatrix3::from_matrix(m), ValidationError);
}

TEST(DensityMatrix3, RejectsNegativeEigenvalue) {
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  m(0, 1) = 0.6;
  m(1, 0) = 0.6;
  EXPECT_THROW(DensityMatrix3::from_matrix(m), ValidationError);
  EXPECT_FALSE(DensityMatrix3::unchecked(m).is_valid());
}

TEST(DensityMatrix3, RejectsNonFinite) {
  Matrix3c m = Matrix3c::Zero();
  m(2, 2) = std::nan("");
  EXPECT_THROW(DensityMatrix3::from_matrix(m), ValidationError);
}

TEST(DensityMatrix3, GroundBlockKeepsPopulation) {
  const DensityMatrix3 rho = mixed_ground_state() * 0.5 + DensityMatrix3::pure(excited_ket()) * 0.5;
  const GroundQubitState g = rho.ground_block();
  EXPECT_DOUBLE_EQ(g.trace(), 0.5);
  EXPECT_DOUBLE_EQ(rho.population(kLevelE), 0.5);
}

TEST(Kets, DarkStateBlochVector) {
  for (double phi : {0.0, 0.3, std::numbers::pi / 2, 2.5, -1.0}) {
    const BlochVector b = bloch_vector(GroundQubitState::pure(dark_ket(phi), 0.5));
    EXPECT_NEAR(b.x, -0.5 * std::cos(phi), 1e-15);
    EXPECT_NEAR(b.y, -0.5 * std::sin(phi), 1e-15);
    EXPECT_NEAR(b.z, 0.0, 1e-15);
  }
}

TEST(Kets, BrightAndDarkAreOrthonormal) {
  for (double phi : {0.0, 1.1, -2.0}) {
    EXPECT_NEAR(std::abs(bright_ket(phi).dot(dark_ket(phi))), 0.0, 1e-15);
    EXPECT_NEAR(bright_ket(phi).norm(), 1.0, 1e-15);
    EXPECT_NEAR(dark_ket(phi).norm(), 1.0, 1e-15);
  }
  EXPECT_NEAR((dark_ket() - dark_ket(0.0)).norm(), 0.0, 0.0);
}

TEST(Pauli, AlgebraHolds) {
  const Complex i(0.0, 1.0);
  EXPECT_NEAR((pauli_x() * pauli_y() - i * pauli_z()).norm(), 0.0, 1e-15);
  EXPECT_NEAR((pauli_x() * pauli_x() - Matrix2c::Identity()).norm(), 0.0, 1e-15);
}

TEST(BlochVector, OfBasisStates) {
  const BlochVector z = bloch_vector(GroundQubitState::pure(ground_ket(kLevel0)));
  EXPECT_DOUBLE_EQ(z.z, 1.0);
  const BlochVector plus = bloch_vector(GroundQubitState::pure(bright_ket()));
  EXPECT_NEAR(plus.x, 1.0, 1e-15);
  EXPECT_NEAR(plus.length(), 1.0, 1e-15);
}

TEST(Fidelity, MissingPopulationCountsAsMixed) {
  // Half the population in the target, half lost: 1/2 + (1/2)(1/2).
  const GroundQubitState half = GroundQubitState::pure(dark_ket(), 0.5);
  EXPECT_NEAR(fidelity(half, dark_ket()), 0.75, 1e-15);
  EXPECT_NEAR(fidelity(GroundQubitState::pure(dark_ket()), dark_ket()), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(GroundQubitState::pure(bright_ket()), dark_ket()), 0.0, 1e-15);
}

TEST(TraceDistance, KnownValues) {
  const GroundQubitState a = GroundQubitState::pure(ground_ket(0));
  const GroundQubitState b = GroundQubitState::pure(ground_ket(1));
  EXPECT_NEAR(trace_distance(a, b), 1.0, 1e-15);
  EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-15);
  // |<0|+>|^2 = 1/2 gives sqrt(1 - 1/2).
  EXPECT_NEAR(trace_distance(a, GroundQubitState::pure(bright_ket())), std::sqrt(0.5), 1e-15);
}

TEST(TraceDistance, RejectsMismatchedTraces) {
  const GroundQubitState a = GroundQubitState::pure(ground_ket(0));
  const GroundQubitState b = GroundQubitState::pure(ground_ket(0), 0.5);
  EXPECT_THROW(trace_distance(a, b), ValidationError);
}

TEST(TraceDistance, RandomStatesAreBoundedMetric) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const DensityMatrix3 a = DensityMatrix3::from_matrix(oracle::random_density3(rng));
    const DensityMatrix3 b = DensityMatrix3::from_matrix(oracle::random_density3(rng));
    const DensityMatrix3 c = DensityMatrix3::from_matrix(oracle::random_density3(rng));
    const double ab = trace_distance(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0 + 1e-12);
    EXPECT_NEAR(ab, trace_distance(b, a), 1e-12);
    EXPECT_LE(trace_distance(a, c), ab + trace_distance(b, c) + 1e-12);
  }
}

TEST(RandomStates, BlochVectorsInsideBall) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 500; ++k) {
    const GroundQubitState s = GroundQubitState::from_matrix(oracle::random_density2(rng));
    EXPECT_LE(bloch_vector(s).length(), 1.0 + 1e-12);
  }
}

TEST(Text, RoundTripsExactly) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const DensityMatrix3 rho = DensityMatrix3::from_matrix(oracle::random_density3(rng, 0.8));
    const DensityMatrix3 back = density_matrix3_from_text(to_text(rho));
    EXPECT_EQ(rho.matrix(), back.matrix());
    const GroundQubitState g = GroundQubitState::from_matrix(oracle::random_density2(rng));
    EXPECT_EQ(g.matrix(), ground_state_from_text(to_text(g)).matrix());
  }
}

TEST(Text, RejectsMalformedInput) {
  EXPECT_THROW(density_matrix3_from_text("1+0i 0+0i"), ValidationError);
  EXPECT_THROW(ground_state_from_text("a b\nc d"), ValidationError);
}

}  // namespace
}  // namespace eitecho
