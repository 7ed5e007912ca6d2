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
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "eitecho/error.hpp"

namespace eitecho {
namespace {

std::ptrdiff_t lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

EchoPhysics material() {
  EchoPhysics physics;
  physics.base.gamma_opt_decay = 1.0 / 200e-6;
  physics.base.gamma_spin_deph = 1.0 / 500e-6;
  return physics;
}

FieldModel vertical(double bz) {
  FieldModel m;
  m.field = Eigen::Vector3d(0.0, 0.0, bz);
  return m;
}

TEST(Field, SplittingIsLinearInFieldMagnitude) {
  EXPECT_NEAR(splitting_from_field(vertical(50e-6)), 6e3, 1e-9);
  EXPECT_NEAR(splitting_from_field(vertical(-100e-6)), 12e3, 1e-9);
  FieldModel m = vertical(50e-6);
  m.compensation = Eigen::Vector3d(0.0, 0.0, -50e-6);
  EXPECT_EQ(splitting_from_field(m), 0.0);
  m.field = Eigen::Vector3d(30e-6, 40e-6, 0.0);
  m.compensation.setZero();
  EXPECT_NEAR(splitting_from_field(m), 6e3, 1e-9);
  m.g_factor = -1.0;
  EXPECT_THROW(splitting_from_field(m), ValidationError);
}

TEST(Field, ZeemanBranchesAreSymmetric) {
  ASSERT_EQ(zeeman_branches(0.0).size(), 1u);
  const auto b = zeeman_branches(6e3);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].offset, -3e3);
  EXPECT_EQ(b[1].offset, 3e3);
  EXPECT_EQ(b[0].weight + b[1].weight, 1.0);
  EXPECT_THROW(zeeman_branches(-1.0), ValidationError);
}

TEST(FieldSweep, ZeroSplittingRecoversSpinT2) {
  const auto points = field_sweep({0.0, 10e-6}, vertical(0.0), EchoConfig{}, material(), linear_taus(10e-6, 300e-6, 30));
  ASSERT_EQ(points.size(), 2u);
  ASSERT_TRUE(points[0].fit.has_value()) << points[0].fit_error;
  EXPECT_NEAR(points[0].fit->t2, 500e-6, 0.02 * 500e-6);
  EXPECT_TRUE(std::isnan(points[0].beat_minimum));
  EXPECT_NEAR(points[1].splitting, 1.2e3, 1e-9);
  // 1.2 kHz beats with an 833 us period: the curve sags below the pure decay.
  EXPECT_LT(points[1].curve.amplitudes.back(), points[0].curve.amplitudes.back());
  std::ostringstream csv;
  write_field_sweep_csv(csv, points);
  EXPECT_EQ(lines(csv.str()), 61);
}

TEST(BeatMinimum, SingleMemberSitsAtHalfTheBeatPeriod) {
  EchoPhysics physics = material();
  physics.mode = ReadoutMode::kProxy;
  physics.ensemble.zeeman_branches = zeeman_branches(6e3);
  const double tau = locate_beat_minimum(EchoConfig{}, physics, 20e-6, 160e-6);
  EXPECT_NEAR(tau, 0.5 / 6e3, 0.05 * 0.5 / 6e3);
}

TEST(Temperature, LinewidthPowerLaw) {
  TemperatureModel tm;
  EXPECT_NEAR(tm.linewidth_ratio(11.0, 6.0), std::pow(11.0 / 6.0, 7.0), 1e-9);
  EXPECT_NEAR(tm.linewidth_ratio(11.0, 6.0), 69.9, 0.01 * 69.9);
  const double gamma = 1.0 / 200e-6;
  EXPECT_NEAR(tm.optical_t2(4.0, gamma), 30e-6, 1e-15);
  EXPECT_NEAR(tm.pure_dephasing(8.0, gamma), 128.0 * tm.pure_dephasing(4.0, gamma), 1e-6);
  tm.t2_opt_ref = 500e-6;
  EXPECT_THROW(tm.pure_dephasing(4.0, gamma), ValidationError);
}

TEST(Temperature, EchoFallsWithTemperature) {
  const auto points =
      temperature_scan({4.0, 6.0, 8.0, 10.0}, TemperatureModel{}, EchoConfig{}, material(), linear_taus(20e-6, 200e-6, 6));
  ASSERT_EQ(points.size(), 4u);
  EXPECT_NEAR(points[0].relative_amplitude, 1.0, 1e-12);
  for (std::size_t i = 1; i < points.size(); ++i) {
    EXPECT_LT(points[i].relative_amplitude, points[i - 1].relative_amplitude);
    EXPECT_LT(points[i].optical_t2, points[i - 1].optical_t2);
  }
}

TEST(Knee, FirstBelowAndPlateau) {
  const std::vector<double> v{1.0, 0.98, 0.95, 0.7, 0.2};
  EXPECT_EQ(plateau_knee(v), 3u);
  EXPECT_EQ(first_below(v, 0.5), 4u);
  EXPECT_FALSE(first_below(v, 0.1).has_value());
  EXPECT_FALSE(plateau_knee({}).has_value());
}

TEST(Scaling, PiDurationSquareRootLaw) {
  ScalingModel sm;
  EXPECT_NEAR(sm.pi_duration(100e-6), 0.1e-6, 1e-18);
  EXPECT_NEAR(sm.pi_duration(25e-6), 0.05e-6, 1e-18);
  sm.intensity_budget = 4.0 * sm.reference_intensity;
  EXPECT_NEAR(sm.pi_duration(100e-6), 0.05e-6, 1e-18);
  EXPECT_THROW(sm.pi_duration(0.0), ValidationError);
}

TEST(Scaling, FidelityGrowsWithOpticalT2) {
  const auto points = scaling_study({1e-8, 1e-7, 1e-6, 1e-5}, ScalingModel{}, EchoConfig{}, material());
  ASSERT_EQ(points.size(), 4u);
  for (std::size_t i = 0; i < points.size(); ++i) {
    EXPECT_LE(points[i].fidelity, points[i].closed_fidelity + 1e-9);
    EXPECT_LE(points[i].coherence, points[i].closed_coherence + 1e-9);
    if (i > 0) {
      EXPECT_GT(points[i].coherence, points[i - 1].coherence);
    }
  }
  EXPECT_THROW(scaling_study({1e-3}, ScalingModel{}, EchoConfig{}, material()), ValidationError);
}

TEST(Qst, GroundBlockFidelityAboveThreshold) {
  std::mt19937_64 rng(11);
  const auto cases = qst_cases(EchoConfig{}, material(), QstOptions{}, rng);
  ASSERT_EQ(cases.size(), 3u);
  for (const auto& c : cases) {
    EXPECT_GE(c.block_fidelity, 0.95) << c.name;
    EXPECT_LE(c.result.fidelity_vs_target, 0.75 + 1e-9) << c.name;
  }
  std::ostringstream csv;
  write_qst_csv(csv, cases);
  EXPECT_EQ(lines(csv.str()), 4);
  EXPECT_EQ(to_json(cases).size(), 3u);
}

TEST(Compensation, ZeroAmbientStaysAtZero) {
  const CompensationResult r = compensation_search(vertical(0.0), EchoConfig{}, material(), CompensationOptions{});
  EXPECT_LT(r.compensation.norm(), 0.1e-6);
  EXPECT_FALSE(r.improved);
}

TEST(Compensation, CancelsVerticalField) {
  const CompensationResult r = compensation_search(vertical(50e-6), EchoConfig{}, material(), CompensationOptions{});
  EXPECT_LT((r.compensation - Eigen::Vector3d(0.0, 0.0, -50e-6)).norm(), 1e-6) << r.diagnostics;
  EXPECT_TRUE(r.improved);
  EXPECT_GT(r.objective, r.initial_objective);
  EXPECT_TRUE(to_json(r).contains("compensation_T"));
}

TEST(Compensation, RejectsBadOptions) {
  CompensationOptions o;
  o.coarse_step = 0.0;
  EXPECT_THROW(compensation_search(vertical(0.0), EchoConfig{}, material(), o), ValidationError);
}

TEST(Qst, CapturedFidelitiesUnderMissingPopulationConvention) {
  std::mt19937_64 rng(11);
  const auto cases = qst_cases(EchoConfig{}, material(), QstOptions{}, rng);
  ASSERT_EQ(cases.size(), 3u);
  const double floors[3] = {0.70, 0.68, 0.67};
  for (std::size_t i = 0; i < cases.size(); ++i) EXPECT_GE(cases[i].result.fidelity_vs_target, floors[i]) << cases[i].name;
}

TEST(BeatMinimum, FollowsHalfPeriodAcrossSplittings) {
  EchoPhysics physics = material();
  physics.mode = ReadoutMode::kProxy;
  for (double f : {2e3, 4e3, 6e3, 9e3, 12e3, 16e3}) {
    physics.ensemble.zeeman_branches = zeeman_branches(f);
    const double expected = 0.5 / f;
    const double tau = locate_beat_minimum(EchoConfig{}, physics, std::max(10e-6, 0.5 * expected), 1.6 * expected);
    EXPECT_NEAR(tau, expected, 0.05 * expected) << f;
  }
}

// The finite pulses add a fixed lag of a microsecond or two, which outgrows 5%
// of the half period above about 16 kHz.
TEST(BeatMinimum, FixedLagAtHighSplitting) {
  EchoPhysics physics = material();
  physics.mode = ReadoutMode::kProxy;
  physics.ensemble.zeeman_branches = zeeman_branches(20e3);
  const double tau = locate_beat_minimum(EchoConfig{}, physics, 12.5e-6, 40e-6);
  EXPECT_GT(tau - 25e-6, 0.5e-6);
  EXPECT_LT(tau - 25e-6, 2.5e-6);
}

}  // namespace
}  // namespace eitecho
