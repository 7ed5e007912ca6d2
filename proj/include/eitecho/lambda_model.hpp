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

// Rotating-frame physics of a driven Λ-system (|0>, |1>) <-> |e>.
//
// Conventions (hbar = 1, all frequencies in rad/s):
//   <e|H|0> = rabi0/2 * exp(i phase0),  <e|H|1> = rabi1/2 * exp(i phase1)
//   H_00 = +s/2, H_11 = -s/2, H_ee = delta_opt,  s = delta_spin + delta_zeeman
// so a resonant single-color pulse with rabi * t = pi inverts its transition.

#ifndef EITECHO_LAMBDA_MODEL_HPP
#define EITECHO_LAMBDA_MODEL_HPP

#include "eitecho/qstate.hpp"

namespace eitecho {

struct LambdaParams {
  double rabi0 = 0.0;
  double rabi1 = 0.0;
  double phase0 = 0.0;
  double phase1 = 0.0;
  double delta_opt = 0.0;
  /// Static two-photon detuning. Refocused by a spin echo.
  double delta_spin = 0.0;
  /// Zeeman-branch detuning. Its sign is reversed by every rephasing pulse
  /// (see run_sequence), so an echo does not refocus it.
  double delta_zeeman = 0.0;
  /// 1/T1 of |e>.
  double gamma_opt_decay = 0.0;
  /// Optical pure dephasing; optical coherences decay at gamma_opt_decay/2 + this.
  double gamma_opt_deph = 0.0;
  /// Ground-coherence pure dephasing, 1/T2 of the spin.
  double gamma_spin_deph = 0.0;
  /// Phenomenological excitation-induced spin dephasing, added to gamma_spin_deph.
  double gamma_excitation_deph = 0.0;
  /// Fraction of |e> decay that lands in |0>.
  double branch0 = 0.5;

  double spin_detuning() const { return delta_spin + delta_zeeman; }
  double spin_dephasing() const { return gamma_spin_deph + gamma_excitation_deph; }
  double optical_coherence_decay() const { return 0.5 * gamma_opt_decay + gamma_opt_deph; }
  /// Largest rate or frequency entering the generator; sets the RK4 step limit.
  double max_rate() const;

  void validate() const;
};

/// Unitary change of basis on the ground manifold. Columns are the bright and
/// dark kets of the drive in `LambdaParams`.
struct BrightDarkBasis {
  Matrix2c columns;

  Vector2c bright() const { return columns.col(0); }
  Vector2c dark() const { return columns.col(1); }
};

struct Couplings {
  Complex bright;
  Complex dark;
};

Matrix3c hamiltonian(const LambdaParams& p);

/// <e|H|B> and <e|H|D> for the fixed pair B, D = (|0> +- |1>)/sqrt(2).
Couplings coupling_strengths(const LambdaParams& p);

/// Bright/dark pair of the actual drive. Falls back to the equal-phase pair
/// when both Rabi frequencies vanish.
BrightDarkBasis bright_dark_basis(const LambdaParams& p);

/// Precomputed master-equation generator for fixed parameters.
class LindbladGenerator {
 public:
  explicit LindbladGenerator(const LambdaParams& p);

  /// d rho / dt = -i[H, rho] + sum_k D[L_k] rho, evaluated elementwise.
  Matrix3c operator()(const Matrix3c& rho) const;

  const Matrix3c& hamiltonian() const { return h_; }

 private:
  Matrix3c h_;
  double decay_to0_;
  double decay_to1_;
  double optical_coherence_rate_;
  double spin_coherence_rate_;
};

/// Derivative of rho under the driven, dissipative Λ-system. The result is
/// traceless and Hermitian but is not itself a state, hence the raw matrix.
Matrix3c lindblad_rhs(const DensityMatrix3& rho, const LambdaParams& p);

}  // namespace eitecho

#endif  // EITECHO_LAMBDA_MODEL_HPP
