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

#include <algorithm>
#include <cmath>
#include <string>

#include "eitecho/error.hpp"

namespace eitecho {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ValidationError(std::string("LambdaParams.") + name + " is not finite");
}

void require_non_negative(double v, const char* name) {
  require_finite(v, name);
  if (v < 0.0) throw ValidationError(std::string("LambdaParams.") + name + " must be >= 0");
}

}  // namespace

double LambdaParams::max_rate() const {
  return std::max({rabi0, rabi1, std::abs(delta_opt), std::abs(spin_detuning()), gamma_opt_decay,
                   gamma_opt_deph, spin_dephasing()});
}

void LambdaParams::validate() const {
  require_non_negative(rabi0, "rabi0");
  require_non_negative(rabi1, "rabi1");
  require_finite(phase0, "phase0");
  require_finite(phase1, "phase1");
  require_finite(delta_opt, "delta_opt");
  require_finite(delta_spin, "delta_spin");
  require_finite(delta_zeeman, "delta_zeeman");
  require_non_negative(gamma_opt_decay, "gamma_opt_decay");
  require_non_negative(gamma_opt_deph, "gamma_opt_deph");
  require_non_negative(gamma_spin_deph, "gamma_spin_deph");
  require_non_negative(gamma_excitation_deph, "gamma_excitation_deph");
  require_finite(branch0, "branch0");
  if (branch0 < 0.0 || branch0 > 1.0) throw ValidationError("LambdaParams.branch0 must lie in [0, 1]");
}

Matrix3c hamiltonian(const LambdaParams& p) {
  Matrix3c h = Matrix3c::Zero();
  const double s = p.spin_detuning();
  h(0, 0) = 0.5 * s;
  h(1, 1) = -0.5 * s;
  h(2, 2) = p.delta_opt;
  h(2, 0) = 0.5 * p.rabi0 * std::polar(1.0, p.phase0);
  h(2, 1) = 0.5 * p.rabi1 * std::polar(1.0, p.phase1);
  h(0, 2) = std::conj(h(2, 0));
  h(1, 2) = std::conj(h(2, 1));
  return h;
}

Couplings coupling_strengths(const LambdaParams& p) {
  const Matrix3c h = hamiltonian(p);
  const Vector3c b = embed(bright_ket());
  const Vector3c d = embed(dark_ket());
  const Vector3c e = excited_ket();
  return {(e.adjoint() * h * b)(0, 0), (e.adjoint() * h * d)(0, 0)};
}

BrightDarkBasis bright_dark_basis(const LambdaParams& p) {
  const Matrix3c h = hamiltonian(p);
  const Complex c0 = h(2, 0);
  const Complex c1 = h(2, 1);
  const double norm = std::sqrt(std::norm(c0) + std::norm(c1));
  BrightDarkBasis basis;
  if (norm == 0.0) {
    basis.columns.col(0) = bright_ket();
    basis.columns.col(1) = dark_ket();
    return basis;
  }
  // <e|H|psi> = c0 a + c1 b is maximal for psi ~ conj(c0, c1) and zero for
  // psi ~ (c1, -c0).
  basis.columns.col(0) = Vector2c(std::conj(c0), std::conj(c1)) / norm;
  basis.columns.col(1) = Vector2c(c1, -c0) / norm;
  return basis;
}

LindbladGenerator::LindbladGenerator(const LambdaParams& p)
    : h_(eitecho::hamiltonian(p)),
      decay_to0_(p.gamma_opt_decay * p.branch0),
      decay_to1_(p.gamma_opt_decay * (1.0 - p.branch0)),
      optical_coherence_rate_(p.optical_coherence_decay() + 0.25 * p.spin_dephasing()),
      spin_coherence_rate_(p.spin_dephasing()) {}

Matrix3c LindbladGenerator::operator()(const Matrix3c& rho) const {
  const Complex minus_i(0.0, -1.0);
  Matrix3c d = minus_i * (h_ * rho - rho * h_);

  // Spontaneous decay |e> -> |0>, |1> with L = sqrt(g)|k><e|.
  const double pe = rho(2, 2).real();
  const double decay = decay_to0_ + decay_to1_;
  d(0, 0) += decay_to0_ * pe;
  d(1, 1) += decay_to1_ * pe;
  d(2, 2) -= decay * pe;

  // Coherence damping. Optical coherences collect half the decay rate, the
  // optical pure dephasing and a quarter of the spin dephasing (the spin
  // dephasing operator is sqrt(g/2)(|0><0| - |1><1|)).
  for (int k = 0; k < 2; ++k) {
    d(k, 2) -= optical_coherence_rate_ * rho(k, 2);
    d(2, k) -= optical_coherence_rate_ * rho(2, k);
  }
  d(0, 1) -= spin_coherence_rate_ * rho(0, 1);
  d(1, 0) -= spin_coherence_rate_ * rho(1, 0);
  return d;
}

Matrix3c lindblad_rhs(const DensityMatrix3& rho, const LambdaParams& p) {
  p.validate();
  return LindbladGenerator(p)(rho.matrix());
}

}  // namespace eitecho
