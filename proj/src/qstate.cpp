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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "eitecho/error.hpp"

namespace eitecho {

namespace {

template <typename Matrix>
void check_state(const Matrix& m, const char* what) {
  const auto n = m.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
        throw ValidationError(std::string(what) + ": non-finite element");
      }
      if (std::abs(m(i, j) - std::conj(m(j, i))) > kHermitianTol) {
        throw ValidationError(std::string(what) + ": matrix is not Hermitian");
      }
    }
  }
  const double tr = m.trace().real();
  if (tr < -kTraceTol || tr > 1.0 + kTraceTol) {
    throw ValidationError(std::string(what) + ": trace " + std::to_string(tr) +
                          " outside [0, 1]");
  }
  const Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kPositivityTol) {
    throw ValidationError(std::string(what) + ": negative eigenvalue " +
                          std::to_string(solver.eigenvalues().minCoeff()));
  }
}

template <typename Matrix>
std::string matrix_to_text(const Matrix& m) {
  std::string out;
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g%+.17gi", m(i, j).real(), m(i, j).imag());
      if (j > 0) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Complex parse_complex(const std::string& token) {
  if (token.empty() || token.back() != 'i') {
    throw ValidationError("malformed complex entry '" + token + "'");
  }
  // Split at the sign that starts the imaginary part: the last '+'/'-' that is
  // neither the leading sign nor part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t k = token.size() - 1; k > 0; --k) {
    const char c = token[k];
    if ((c == '+' || c == '-') && token[k - 1] != 'e' && token[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) {
    throw ValidationError("malformed complex entry '" + token + "'");
  }
  const std::string re_str = token.substr(0, split);
  const std::string im_str = token.substr(split, token.size() - split - 1);
  char* end = nullptr;
  const double re = std::strtod(re_str.c_str(), &end);
  if (end != re_str.c_str() + re_str.size()) {
    throw ValidationError("malformed real part in '" + token + "'");
  }
  const double im = std::strtod(im_str.c_str(), &end);
  if (end != im_str.c_str() + im_str.size()) {
    throw ValidationError("malformed imaginary part in '" + token + "'");
  }
  return {re, im};
}

template <typename Matrix>
Matrix matrix_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<Complex> values;
  std::string token;
  while (in >> token) values.push_back(parse_complex(token));
  const auto n = Matrix::RowsAtCompileTime;
  if (values.size() != static_cast<std::size_t>(n * n)) {
    throw ValidationError("expected " + std::to_string(n * n) + " entries, got " +
                          std::to_string(values.size()));
  }
  Matrix m;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = values[static_cast<std::size_t>(i * n + j)];
  }
  return m;
}

}  // namespace

DensityMatrix3 DensityMatrix3::from_matrix(const Matrix3c& m) {
  check_state(m, "DensityMatrix3");
  return DensityMatrix3(m);
}

DensityMatrix3 DensityMatrix3::pure(const Vector3c& psi, double weight) {
  return from_matrix(weight * psi * psi.adjoint());
}

GroundQubitState DensityMatrix3::ground_block() const {
  return GroundQubitState::unchecked(m_.topLeftCorner<2, 2>());
}

void DensityMatrix3::validate() const { check_state(m_, "DensityMatrix3"); }

bool DensityMatrix3::is_valid() const {
  try {
    validate();
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

GroundQubitState GroundQubitState::from_matrix(const Matrix2c& m) {
  check_state(m, "GroundQubitState");
  return GroundQubitState(m);
}

GroundQubitState GroundQubitState::pure(const Vector2c& psi, double weight) {
  return from_matrix(weight * psi * psi.adjoint());
}

void GroundQubitState::validate() const { check_state(m_, "GroundQubitState"); }

bool GroundQubitState::is_valid() const {
  try {
    validate();
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

double BlochVector::length() const { return std::sqrt(x * x + y * y + z * z); }

Vector2c ground_ket(int level) {
  Vector2c v = Vector2c::Zero();
  v(level) = 1.0;
  return v;
}

Vector2c bright_ket() { return bright_ket(0.0); }
Vector2c dark_ket() { return dark_ket(0.0); }

Vector2c dark_ket(double relative_phase) {
  const double s = 1.0 / std::sqrt(2.0);
  return Vector2c(s, -s * std::polar(1.0, relative_phase));
}

Vector2c bright_ket(double relative_phase) {
  const double s = 1.0 / std::sqrt(2.0);
  return Vector2c(s, s * std::polar(1.0, relative_phase));
}

Vector3c embed(const Vector2c& g) { return Vector3c(g(0), g(1), 0.0); }

Vector3c excited_ket() { return Vector3c(0.0, 0.0, 1.0); }

DensityMatrix3 mixed_ground_state() {
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  return DensityMatrix3::from_matrix(m);
}

Matrix2c pauli_x() {
  Matrix2c m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix2c pauli_y() {
  const Complex i(0.0, 1.0);
  Matrix2c m;
  m << 0.0, -i, i, 0.0;
  return m;
}

Matrix2c pauli_z() {
  Matrix2c m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

BlochVector bloch_vector(const GroundQubitState& state) {
  state.validate();
  const Matrix2c& r = state.matrix();
  return {(pauli_x() * r).trace().real(), (pauli_y() * r).trace().real(),
          (pauli_z() * r).trace().real()};
}

double fidelity(const GroundQubitState& state, const Vector2c& target) {
  state.validate();
  if (std::abs(target.norm() - 1.0) > 1e-9) {
    throw ValidationError("fidelity: target ket is not normalized");
  }
  const double tr = state.trace();
  if (tr <= kTraceTol) {
    throw NumericalError("fidelity: undefined for a zero-trace state");
  }
  const Matrix2c embedded = state.matrix() + 0.5 * (1.0 - tr) * Matrix2c::Identity();
  const double f = (target.adjoint() * embedded * target)(0, 0).real();
  return std::clamp(f, 0.0, 1.0);
}

double trace_distance(const GroundQubitState& a, const GroundQubitState& b) {
  if (std::abs(a.trace() - b.trace()) > kTraceTol) {
    throw ValidationError("trace_distance: traces differ");
  }
  const Matrix2c diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix2c> solver(0.5 * (diff + diff.adjoint()),
                                                Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityMatrix3& a, const DensityMatrix3& b) {
  if (std::abs(a.trace() - b.trace()) > kTraceTol) {
    throw ValidationError("trace_distance: traces differ");
  }
  const Matrix3c diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix3c> solver(0.5 * (diff + diff.adjoint()),
                                                Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

std::string to_text(const DensityMatrix3& state) { return matrix_to_text(state.matrix()); }
std::string to_text(const GroundQubitState& state) { return matrix_to_text(state.matrix()); }

DensityMatrix3 density_matrix3_from_text(std::string_view text) {
  return DensityMatrix3::from_matrix(matrix_from_text<Matrix3c>(text));
}

GroundQubitState ground_state_from_text(std::string_view text) {
  return GroundQubitState::from_matrix(matrix_from_text<Matrix2c>(text));
}

}  // namespace eitecho
