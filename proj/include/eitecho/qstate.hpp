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

// Density matrices of one Λ-system member and of its ground-state qubit.
//
// Basis order is fixed as (|0>, |1>, |e>). Both state types may be
// sub-normalized: the ground block of a three-level state carries only the
// population that is still in |0>, |1>.

#ifndef EITECHO_QSTATE_HPP
#define EITECHO_QSTATE_HPP

#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace eitecho {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix3c = Eigen::Matrix3cd;
using Vector2c = Eigen::Vector2cd;
using Vector3c = Eigen::Vector3cd;

inline constexpr int kLevel0 = 0;
inline constexpr int kLevel1 = 1;
inline constexpr int kLevelE = 2;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kPositivityTol = 1e-9;

class GroundQubitState;

/// 3x3 density matrix over (|0>, |1>, |e>).
///
/// `from_matrix` validates Hermiticity, trace range and positivity.
/// `unchecked` skips validation and exists for the integrator's inner loop;
/// trajectories are validated at their boundaries instead.
class DensityMatrix3 {
 public:
  DensityMatrix3() : m_(Matrix3c::Zero()) {}

  static DensityMatrix3 from_matrix(const Matrix3c& m);
  static DensityMatrix3 unchecked(const Matrix3c& m) { return DensityMatrix3(m); }
  /// weight * |psi><psi| for a normalized ket.
  static DensityMatrix3 pure(const Vector3c& psi, double weight = 1.0);

  const Matrix3c& matrix() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }

  double trace() const { return m_.trace().real(); }
  double population(int level) const { return m_(level, level).real(); }
  /// The (|0>, |1>) block, not renormalized.
  GroundQubitState ground_block() const;

  /// Throws ValidationError describing the first violated invariant.
  void validate() const;
  bool is_valid() const;

  DensityMatrix3 operator+(const DensityMatrix3& o) const { return DensityMatrix3(m_ + o.m_); }
  DensityMatrix3 operator*(double s) const { return DensityMatrix3(m_ * s); }

 private:
  explicit DensityMatrix3(const Matrix3c& m) : m_(m) {}
  Matrix3c m_;
};

/// 2x2 density matrix over (|0>, |1>); may be sub-normalized.
class GroundQubitState {
 public:
  GroundQubitState() : m_(Matrix2c::Zero()) {}

  static GroundQubitState from_matrix(const Matrix2c& m);
  static GroundQubitState unchecked(const Matrix2c& m) { return GroundQubitState(m); }
  static GroundQubitState pure(const Vector2c& psi, double weight = 1.0);

  const Matrix2c& matrix() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }
  double trace() const { return m_.trace().real(); }

  void validate() const;
  bool is_valid() const;

 private:
  explicit GroundQubitState(const Matrix2c& m) : m_(m) {}
  Matrix2c m_;
};

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double length() const;
};

// Named kets. The bright and dark kets are the equal-phase pair
// (|0> +- |1>)/sqrt(2); `dark_ket(phi)` is the dark state of a bichromatic
// drive whose relative phase (component 0 minus component 1) is phi.
Vector2c ground_ket(int level);
Vector2c bright_ket();
Vector2c dark_ket();
Vector2c dark_ket(double relative_phase);
Vector2c bright_ket(double relative_phase);
Vector3c embed(const Vector2c& ground_ket);
Vector3c excited_ket();

/// Fully mixed ground population, I/2 on (|0>, |1>).
DensityMatrix3 mixed_ground_state();

/// Pauli matrices on the ground qubit.
Matrix2c pauli_x();
Matrix2c pauli_y();
Matrix2c pauli_z();

/// (tr(X rho), tr(Y rho), tr(Z rho)).
BlochVector bloch_vector(const GroundQubitState& state);

/// <target|rho'|target> where rho' = rho + (1 - tr rho) I/2: the population
/// missing from the ground block is counted as fully mixed ground population.
double fidelity(const GroundQubitState& state, const Vector2c& target);

/// Half the sum of singular values of (a - b). Traces must agree within 1e-9.
double trace_distance(const GroundQubitState& a, const GroundQubitState& b);
double trace_distance(const DensityMatrix3& a, const DensityMatrix3& b);

/// Row-major text dump, one matrix row per line, entries as "re+imi".
std::string to_text(const DensityMatrix3& state);
std::string to_text(const GroundQubitState& state);
DensityMatrix3 density_matrix3_from_text(std::string_view text);
GroundQubitState ground_state_from_text(std::string_view text);

}  // namespace eitecho

#endif  // EITECHO_QSTATE_HPP
