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
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "eitecho/error.hpp"
#include "oracles.hpp"

namespace eitecho {
namespace {

constexpr double kPi = std::numbers::pi;

LambdaParams lossy() {
  LambdaParams p;
  p.gamma_opt_decay = 1.0 / 20e-6;
  p.gamma_opt_deph = 2e4;
  p.gamma_spin_deph = 1.0 / 50e-6;
  p.branch0 = 0.3;
  p.delta_opt = 2e5;
  p.delta_spin = 3e4;
  return p;
}

TEST(Propagate, SingleColorRabiFlop) {
  const double rabi = 2.0 * kPi * 250e3;
  const PulseSpec pulse{4e-6, rabi, 0.0, 0.0, 0.0, PulseLabel::kCustom};
  const Trajectory traj =
      propagate(DensityMatrix3::pure(embed(ground_ket(0))), LambdaParams{}, pulse, 1e-9);
  for (std::size_t i = 0; i < traj.times.size(); i += 97) {
    const double s = std::sin(0.5 * rabi * traj.times[i]);
    EXPECT_NEAR(traj.observables(i).pe, s * s, 1e-9);
  }
  EXPECT_NEAR(traj.times.back(), 4e-6, 1e-18);
}

TEST(Propagate, MatchesMatrixExponentialOpenSystem) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 5; ++k) {
    LambdaParams p = lossy();
    const PulseSpec pulse{1.5e-6, 1.3e6, 0.8e6, 0.4 * k, -0.2, PulseLabel::kCustom};
    const Matrix3c rho0 = oracle::random_density3(rng);
    const double dt = 0.25 * stable_step(p, pulse);
    const Trajectory traj = propagate(DensityMatrix3::from_matrix(rho0), p, pulse, dt);
    const Matrix3c expected = oracle::evolve(rho0, with_pulse(p, pulse), pulse.duration);
    EXPECT_LT(oracle::max_abs_diff(traj.final_state().matrix(), expected), 1e-9);
  }
}

TEST(Propagate, SampleGridIsIndependentOfStep) {
  const PulseSpec pulse{2e-6, 1.1e6, 1.1e6, 0.3, 0.0, PulseLabel::kCustom};
  const LambdaParams p = lossy();
  const Trajectory coarse = propagate(mixed_ground_state(), p, pulse, 10e-9, 40e-9);
  const Trajectory fine = propagate(mixed_ground_state(), p, pulse, 2.5e-9, 40e-9);
  ASSERT_EQ(coarse.times.size(), 51u);
  ASSERT_EQ(coarse.times, fine.times);
  EXPECT_EQ(coarse.segments[0].end, 50u);
  for (std::size_t i = 0; i < coarse.times.size(); ++i) {
    EXPECT_LT(oracle::max_abs_diff(coarse.states[i].matrix(), fine.states[i].matrix()), 1e-9);
  }
  const Matrix3c expected = oracle::evolve(mixed_ground_state().matrix(), with_pulse(p, pulse), pulse.duration);
  EXPECT_LT(oracle::max_abs_diff(fine.final_state().matrix(), expected), 1e-11);
}

TEST(Propagate, RejectsCoarseStep) {
  const PulseSpec pulse{1e-6, 1e7, 1e7, 0.0, 0.0, PulseLabel::kCustom};
  const double limit = stable_step(LambdaParams{}, pulse);
  EXPECT_NEAR(limit, 0.05 / 1e7, 1e-20);
  EXPECT_THROW(propagate(mixed_ground_state(), LambdaParams{}, pulse, 2.0 * limit), ConfigError);
}

TEST(Propagate, StepLimitFollowsDurationForSlowPulses) {
  const PulseSpec pulse{1e-6, 1.0, 0.0, 0.0, 0.0, PulseLabel::kCustom};
  EXPECT_DOUBLE_EQ(stable_step(LambdaParams{}, pulse), 1e-6 / 20.0);
}

TEST(FreeEvolve, ClosedFormDecay) {
  const LambdaParams p = lossy();
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = 0.2;
  m(1, 1) = 0.3;
  m(2, 2) = 0.5;
  m(0, 1) = m(1, 0) = 0.1;
  const double t = 13e-6;
  const DensityMatrix3 out = free_evolve(DensityMatrix3::from_matrix(m), p, t);
  const double survived = 0.5 * std::exp(-p.gamma_opt_decay * t);
  EXPECT_NEAR(out.population(kLevelE), survived, 1e-15);
  EXPECT_NEAR(out.population(kLevel0), 0.2 + 0.3 * (0.5 - survived), 1e-15);
  const Complex rho01 = 0.1 * std::exp(Complex(-p.gamma_spin_deph, -p.delta_spin) * t);
  EXPECT_NEAR(std::abs(out(0, 1) - rho01), 0.0, 1e-15);
}

TEST(FreeEvolve, SpinDephasingOfDarkState) {
  LambdaParams p;
  p.gamma_spin_deph = 1.0 / 500e-6;
  const DensityMatrix3 out = free_evolve(DensityMatrix3::pure(embed(dark_ket())), p, 500e-6);
  EXPECT_NEAR(std::abs(out(0, 1)), 0.5 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(std::abs(out(0, 1)), 0.1839, 1e-4);
}

TEST(FreeEvolve, MatchesMatrixExponential) {
  std::mt19937_64 rng(9);
  const LambdaParams p = lossy();
  for (int k = 0; k < 20; ++k) {
    const Matrix3c rho0 = oracle::random_density3(rng);
    const double t = 1e-6 * (1 + k);
    const Matrix3c expected = oracle::evolve(rho0, p, t);
    EXPECT_LT(oracle::max_abs_diff(free_evolve(DensityMatrix3::from_matrix(rho0), p, t).matrix(), expected),
              1e-12);
  }
}

TEST(RunSequence, ExactAndRungeKuttaWaitsAgree) {
  const LambdaParams p = lossy();
  SequenceSpec seq;
  seq.step = 5e-9;
  seq.segments = {PulseSpec{1e-6, 1.2e6, 1.2e6, 0.0, 0.0, PulseLabel::kInitPiHalf}, Wait{20e-6},
                  PulseSpec{1e-6, 1.2e6, 1.2e6, 0.0, 0.0, PulseLabel::kCustom}};
  const Trajectory exact = run_sequence(mixed_ground_state(), p, seq, WaitMethod::kExact);
  const Trajectory rk = run_sequence(mixed_ground_state(), p, seq, WaitMethod::kRungeKutta);
  EXPECT_LT(trace_distance(exact.final_state(), rk.final_state()), 1e-9);
}

TEST(RunSequence, SpansAndTimesAreConsistent) {
  SequenceSpec seq;
  seq.wait_sample_step = 1e-6;
  seq.segments = {PulseSpec{1e-6, 1e6, 1e6, 0.0, 0.0, PulseLabel::kInitPiHalf}, Wait{5e-6},
                  PulseSpec{2e-6, 1e6, 1e6, 0.0, 0.0, PulseLabel::kRephasePi}, Wait{5e-6},
                  PulseSpec{1e-6, 1e6, 1e6, 0.0, 0.0, PulseLabel::kReadout}};
  const Trajectory traj = run_sequence(mixed_ground_state(), LambdaParams{}, seq);
  EXPECT_NO_THROW(traj.validate());
  EXPECT_NEAR(traj.times.back(), seq.total_duration(), 1e-15);
  const SegmentSpan* rephase = traj.find(PulseLabel::kRephasePi);
  ASSERT_NE(rephase, nullptr);
  EXPECT_NEAR(traj.times[rephase->begin], 6e-6, 1e-15);
  EXPECT_NEAR(traj.times[rephase->end], 8e-6, 1e-15);
  const SegmentSpan* readout = traj.find(PulseLabel::kReadout);
  ASSERT_NE(readout, nullptr);
  EXPECT_NEAR(traj.times[readout->begin], 13e-6, 1e-15);
  EXPECT_EQ(readout->end, traj.times.size() - 1);
  for (std::size_t i = 1; i < traj.times.size(); ++i) EXPECT_GE(traj.times[i], traj.times[i - 1]);
}

TEST(RunSequence, ZeemanSignFlipsAtRephasingPulseCentre) {
  // An undriven pulse makes the phase bookkeeping exact: the branch detuning
  // accumulates for T + d/2, then unwinds for d/2 + T.
  LambdaParams p;
  p.delta_zeeman = 2.0 * kPi * 7e3;
  const PulseSpec idle{2e-6, 0.0, 0.0, 0.0, 0.0, PulseLabel::kRephasePi};
  SequenceSpec seq;
  seq.segments = {Wait{30e-6}, idle, Wait{30e-6}};
  const DensityMatrix3 plus = DensityMatrix3::pure(embed(bright_ket()));
  const Trajectory refocused = run_sequence(plus, p, seq);
  EXPECT_NEAR(std::abs(refocused.final_state()(0, 1) - 0.5), 0.0, 1e-9);

  PulseSpec custom = idle;
  custom.label = PulseLabel::kCustom;
  seq.segments = {Wait{30e-6}, custom, Wait{30e-6}};
  const Complex expected = 0.5 * std::exp(Complex(0.0, -p.delta_zeeman * 62e-6));
  EXPECT_NEAR(std::abs(run_sequence(plus, p, seq).final_state()(0, 1) - expected), 0.0, 1e-9);
}

TEST(RunSequence, StaticDetuningIsNotFlipped) {
  LambdaParams p;
  p.delta_spin = 2.0 * kPi * 7e3;
  SequenceSpec seq;
  seq.segments = {Wait{30e-6}, PulseSpec{2e-6, 0.0, 0.0, 0.0, 0.0, PulseLabel::kRephasePi}, Wait{30e-6}};
  const DensityMatrix3 plus = DensityMatrix3::pure(embed(bright_ket()));
  const Complex expected = 0.5 * std::exp(Complex(0.0, -p.delta_spin * 62e-6));
  EXPECT_NEAR(std::abs(run_sequence(plus, p, seq).final_state()(0, 1) - expected), 0.0, 1e-9);
}

TEST(RunSequence, ConservesTrace) {
  std::mt19937_64 rng(31);
  SequenceSpec seq;
  seq.segments = {PulseSpec{2e-6, 1.2e6, 0.9e6, 0.3, 0.0, PulseLabel::kInitPiHalf}, Wait{7e-6},
                  PulseSpec{2e-6, 1.2e6, 1.2e6, 0.0, 0.0, PulseLabel::kRephasePi}, Wait{7e-6},
                  PulseSpec{1e-6, 1.2e6, 0.0, 0.0, 0.0, PulseLabel::kReadout}};
  seq.wait_sample_step = 1e-6;
  const Trajectory traj = run_sequence(DensityMatrix3::from_matrix(oracle::random_density3(rng)), lossy(), seq);
  for (const auto& s : traj.states) EXPECT_NEAR(s.trace(), 1.0, 1e-9);
}

TEST(RunSequence, ClosedSystemPreservesSpectrum) {
  std::mt19937_64 rng(37);
  const Matrix3c rho0 = oracle::random_density3(rng);
  SequenceSpec seq;
  seq.segments = {PulseSpec{3e-6, 1.5e6, 0.7e6, 0.2, -1.0, PulseLabel::kCustom}, Wait{4e-6}};
  LambdaParams p;
  p.delta_opt = 3e5;
  p.delta_spin = 4e4;
  const Trajectory traj = run_sequence(DensityMatrix3::from_matrix(rho0), p, seq);
  Eigen::SelfAdjointEigenSolver<Matrix3c> before(rho0);
  Eigen::SelfAdjointEigenSolver<Matrix3c> after(traj.final_state().matrix());
  EXPECT_LT((before.eigenvalues() - after.eigenvalues()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(RunSequence, ClosedResonantEchoKeepsCoherence) {
  SequenceSpec seq;
  const double rabi = kPi / (std::numbers::sqrt2 * 2e-6);
  seq.segments = {PulseSpec{2e-6, rabi, rabi, 0.0, 0.0, PulseLabel::kInitPiHalf}, Wait{39e-6},
                  PulseSpec{2e-6, 2.0 * rabi, 2.0 * rabi, 0.0, 0.0, PulseLabel::kRephasePi}, Wait{37e-6}};
  const Trajectory traj = run_sequence(mixed_ground_state(), LambdaParams{}, seq);
  const SegmentSpan* init = traj.find(PulseLabel::kInitPiHalf);
  EXPECT_NEAR(std::abs(traj.final_state()(0, 1)), std::abs(traj.states[init->end](0, 1)), 1e-6);
}

// A common optical shift is a one-photon detuning. It cannot touch the
// ground manifold while no light is on, nor a dark state while it is.
TEST(Gauge, OpticalShiftLeavesGroundObservablesDuringWaits) {
  std::mt19937_64 rng(41);
  LambdaParams a = lossy();
  LambdaParams b = a;
  b.delta_opt += 7.3e6;
  for (int k = 0; k < 10; ++k) {
    const DensityMatrix3 rho = DensityMatrix3::from_matrix(oracle::random_density3(rng));
    const Matrix2c ga = free_evolve(rho, a, 12e-6).ground_block().matrix();
    const Matrix2c gb = free_evolve(rho, b, 12e-6).ground_block().matrix();
    EXPECT_LT((ga - gb).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Gauge, OpticalShiftLeavesDrivenDarkStateAlone) {
  const PulseSpec pulse{3e-6, 2e6, 2e6, 0.6, 0.0, PulseLabel::kCustom};
  const DensityMatrix3 dark = DensityMatrix3::pure(embed(dark_ket(0.6)));
  LambdaParams shifted;
  shifted.delta_opt = 5e5;
  const Trajectory a = propagate(dark, LambdaParams{}, pulse, 1e-9);
  const Trajectory b = propagate(dark, shifted, pulse, 1e-9);
  EXPECT_LT((a.final_state().ground_block().matrix() - b.final_state().ground_block().matrix()).cwiseAbs().maxCoeff(),
            1e-9);
}

TEST(Sequence, ValidateRejectsBadLayouts) {
  SequenceSpec seq;
  EXPECT_THROW(seq.validate(), ValidationError);
  seq.segments = {PulseSpec{1e-6, 1.0, 1.0, 0.0, 0.0, PulseLabel::kReadout}, Wait{1e-6}};
  EXPECT_THROW(seq.validate(), ValidationError);
  seq.segments = {Wait{-1e-6}};
  EXPECT_THROW(seq.validate(), ValidationError);
  PulseSpec bad{0.0, 1.0, 1.0, 0.0, 0.0, PulseLabel::kCustom};
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = PulseSpec{1e-6, -1.0, 1.0, 0.0, 0.0, PulseLabel::kCustom};
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Bandwidth, RectangularPulse) {
  EXPECT_NEAR(bandwidth(PulseSpec{2e-6, 1.0, 1.0, 0.0, 0.0, PulseLabel::kCustom}), 159.15e3, 0.01e3);
  EXPECT_NEAR(bandwidth(PulseSpec{1.0, 1.0, 1.0, 0.0, 0.0, PulseLabel::kCustom}), 0.318, 1e-3);
  EXPECT_NEAR(bandwidth(PulseSpec{6.4e-9, 1.0, 1.0, 0.0, 0.0, PulseLabel::kCustom}), 49.7e6, 0.05e6);
  EXPECT_DOUBLE_EQ(bandwidth(PulseSpec{2e-6, 1.0, 1.0, 0.0, 0.0, PulseLabel::kCustom}), 1.0 / (kPi * 2e-6));
}

TEST(Csv, TrajectoryAndBlochPathHaveOneRowPerSample) {
  SequenceSpec seq;
  seq.segments = {PulseSpec{1e-6, 1e6, 1e6, 0.0, 0.0, PulseLabel::kInitPiHalf}, Wait{2e-6}};
  const Trajectory traj = run_sequence(mixed_ground_state(), LambdaParams{}, seq);
  std::ostringstream a;
  write_trajectory_csv(a, traj);
  std::ostringstream b;
  write_bloch_path_csv(b, traj);
  auto lines = [](const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); };
  EXPECT_EQ(lines(a.str()), traj.times.size() + 1);
  EXPECT_EQ(lines(b.str()), traj.times.size() + 1);
  EXPECT_EQ(a.str().substr(0, 4), "time");
}

TEST(Labels, HaveNames) {
  EXPECT_EQ(to_string(PulseLabel::kRephasePi), "rephase_pi");
  EXPECT_EQ(to_string(PulseLabel::kReadout), "readout");
}

}  // namespace
}  // namespace eitecho
