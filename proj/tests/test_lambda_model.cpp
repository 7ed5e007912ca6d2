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

#include "eitecho/lambda_model.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "eitecho/error.hpp"
#include "oracles.hpp"

namespace eitecho {
namespace {

LambdaParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LambdaParams p;
  p.rabi0 = 2e6 * u(rng);
  p.rabi1 = 2e6 * u(rng);
  p.phase0 = 6.0 * u(rng) - 3.0;
  p.phase1 = 6.0 * u(rng) - 3.0;
  p.delta_opt = 1e6 * (u(rng) - 0.5);
  p.delta_spin = 1e5 * (u(rng) - 0.5);
  p.delta_zeeman = 1e5 * (u(rng) - 0.5);
  p.gamma_opt_decay = 1e5 * u(rng);
  p.gamma_opt_deph = 1e5 * u(rng);
  p.gamma_spin_deph = 1e4 * u(rng);
  p.gamma_excitation_deph = 1e4 * u(rng);
  p.branch0 = u(rng);
  return p;
}

TEST(Hamiltonian, MatchesStatedConvention) {
  LambdaParams p;
  p.rabi0 = 2.0;
  p.rabi1 = 4.0;
  p.phase0 = 0.5;
  p.phase1 = -1.0;
  p.delta_opt = 3.0;
  p.delta_spin = 0.6;
  p.delta_zeeman = 0.2;
  const Matrix3c h = hamiltonian(p);
  EXPECT_NEAR(std::abs(h(2, 0) - std::polar(1.0, 0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(h(2, 1) - std::polar(2.0, -1.0)), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(h(0, 0).real(), 0.4);
  EXPECT_DOUBLE_EQ(h(1, 1).real(), -0.4);
  EXPECT_DOUBLE_EQ(h(2, 2).real(), 3.0);
  EXPECT_NEAR((h - h.adjoint()).norm(), 0.0, 0.0);
  EXPECT_NEAR((h - oracle::hamiltonian(p)).norm(), 0.0, 1e-15);
}

TEST(Couplings, DarkStateDecouplesAndBrightIsEnhanced) {
  LambdaParams p;
  p.rabi0 = p.rabi1 = 1.0e6;
  const Couplings c = coupling_strengths(p);
  EXPECT_NEAR(std::abs(c.dark), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(c.bright), std::numbers::sqrt2 * 0.5e6, 1e-6);
}

TEST(Couplings, BrightDarkBasisFollowsRelativePhase) {
  LambdaParams p;
  p.rabi0 = p.rabi1 = 1.0;
  p.phase0 = 0.9;
  p.phase1 = 0.2;
  const BrightDarkBasis basis = bright_dark_basis(p);
  EXPECT_NEAR((basis.columns.adjoint() * basis.columns - Matrix2c::Identity()).norm(), 0.0, 1e-14);
  const Vector3c dark = embed(basis.dark());
  EXPECT_NEAR(std::abs((hamiltonian(p) * dark)(2)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(basis.dark().dot(dark_ket(0.7))), 1.0, 1e-14);
}

TEST(Couplings, SingleColourDrivesBothEqually) {
  LambdaParams p;
  p.rabi0 = 1.0e6;
  const Couplings c = coupling_strengths(p);
  EXPECT_NEAR(std::abs(c.bright), 1.0e6 / (2.0 * std::numbers::sqrt2), 1e-6);
  EXPECT_NEAR(std::abs(c.dark), 1.0e6 / (2.0 * std::numbers::sqrt2), 1e-6);
}

TEST(Couplings, PhaseFlipExchangesBrightAndDark) {
  LambdaParams p;
  p.rabi0 = p.rabi1 = 1.0e6;
  p.phase1 = std::numbers::pi;
  Couplings c = coupling_strengths(p);
  EXPECT_NEAR(std::abs(c.bright), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(c.dark), std::numbers::sqrt2 * 0.5e6, 1e-6);
  p.phase1 = 0.5 * std::numbers::pi;
  c = coupling_strengths(p);
  EXPECT_NEAR(std::abs(c.bright), 0.5e6, 1e-6);
  EXPECT_NEAR(std::abs(c.dark), 0.5e6, 1e-6);
}

TEST(Couplings, UndrivenFallsBackToEqualPhasePair) {
  const BrightDarkBasis basis = bright_dark_basis(LambdaParams{});
  EXPECT_NEAR(std::abs(basis.dark().dot(dark_ket())), 1.0, 1e-15);
}

TEST(Generator, MatchesExplicitJumpOperators) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 200; ++k) {
    const LambdaParams p = random_params(rng);
    const DensityMatrix3 rho = DensityMatrix3::from_matrix(oracle::random_density3(rng));
    const Matrix3c expected = oracle::lindblad(rho.matrix(), p);
    const Matrix3c got = lindblad_rhs(rho, p);
    EXPECT_LT(oracle::max_abs_diff(got, expected), 1e-9 * (1.0 + expected.cwiseAbs().maxCoeff()));
    EXPECT_LT(oracle::max_abs_diff(LindbladGenerator(p)(rho.matrix()), got), 1e-9);
  }
}

TEST(Generator, IsTracelessAndHermitian) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 100; ++k) {
    const LambdaParams p = random_params(rng);
    const Matrix3c d = lindblad_rhs(DensityMatrix3::from_matrix(oracle::random_density3(rng)), p);
    EXPECT_LT(std::abs(d.trace()), 1e-6);
    EXPECT_LT((d - d.adjoint()).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Generator, ClosedFormCoherenceRates) {
  LambdaParams p;
  p.delta_spin = 300.0;
  p.delta_zeeman = 50.0;
  p.delta_opt = 7000.0;
  p.gamma_opt_decay = 1000.0;
  p.gamma_opt_deph = 200.0;
  p.gamma_spin_deph = 40.0;
  p.gamma_excitation_deph = 8.0;
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = m(1, 1) = m(2, 2) = 1.0 / 3.0;
  m(0, 1) = m(1, 0) = 0.1;
  m(0, 2) = m(2, 0) = 0.1;
  const Matrix3c d = lindblad_rhs(DensityMatrix3::from_matrix(m), p);
  const Complex i(0.0, 1.0);
  const double s = 350.0;
  const double spin = 48.0;
  EXPECT_NEAR(std::abs(d(0, 1) - (-(spin + i * s) * 0.1)), 0.0, 1e-12);
  const Complex optical = -(500.0 + 200.0 + 0.25 * spin + i * (0.5 * s - 7000.0)) * 0.1;
  EXPECT_NEAR(std::abs(d(0, 2) - optical), 0.0, 1e-12);
  EXPECT_NEAR(d(2, 2).real(), -1000.0 / 3.0, 1e-12);
  EXPECT_NEAR(d(0, 0).real(), 0.5 * 1000.0 / 3.0, 1e-12);
}

TEST(Generator, RateEquationsForExcitedState) {
  LambdaParams p;
  p.gamma_opt_decay = 1e4;
  const Matrix3c d = lindblad_rhs(DensityMatrix3::pure(excited_ket()), p);
  EXPECT_NEAR(d(2, 2).real(), -1e4, 1e-9);
  EXPECT_NEAR(d(0, 0).real(), 5e3, 1e-9);
  EXPECT_NEAR(d(1, 1).real(), 5e3, 1e-9);
}

TEST(Generator, DarkStateIsStationary) {
  LambdaParams p;
  p.rabi0 = p.rabi1 = 3.0e6;
  p.phase0 = 1.1;
  const Matrix3c d = lindblad_rhs(DensityMatrix3::pure(embed(dark_ket(1.1))), p);
  EXPECT_LT(d.norm(), 1e-12 * 3.0e6);
}

TEST(Params, MaxRateCoversEveryScale) {
  LambdaParams p;
  p.rabi0 = 5.0;
  p.delta_opt = -40.0;
  p.gamma_opt_decay = 3.0;
  EXPECT_GE(p.max_rate(), 40.0);
  EXPECT_DOUBLE_EQ(LambdaParams{}.max_rate(), 0.0);
}

TEST(Params, ValidateRejectsBadValues) {
  LambdaParams p;
  p.gamma_opt_decay = -1.0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = LambdaParams{};
  p.branch0 = 1.5;
  EXPECT_THROW(p.validate(), ValidationError);
  p = LambdaParams{};
  p.rabi0 = std::nan("");
  EXPECT_THROW(p.validate(), ValidationError);
  p = LambdaParams{};
  p.gamma_spin_deph = -0.1;
  EXPECT_THROW(p.validate(), ValidationError);
  EXPECT_NO_THROW(LambdaParams{}.validate());
}

}  // namespace
}  // namespace eitecho
