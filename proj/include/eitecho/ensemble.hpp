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

// Inhomogeneous averaging over optical and spin detunings.

#ifndef EITECHO_ENSEMBLE_HPP
#define EITECHO_ENSEMBLE_HPP

#include <vector>

#include "eitecho/dynamics.hpp"

namespace eitecho {

struct ZeemanBranch {
  /// Spin-detuning offset of the branch, Hz.
  double offset = 0.0;
  double weight = 1.0;
};

struct EnsembleSpec {
  /// Gaussian FWHM of the optical detuning distribution, Hz.
  double optical_fwhm = 170e3;
  /// Gaussian FWHM of the static spin detuning distribution, Hz.
  double spin_fwhm = 0.0;
  int n_optical = 1;
  int n_spin = 1;
  /// Discrete Zeeman branches; empty means a single unshifted branch.
  std::vector<ZeemanBranch> zeeman_branches;

  void validate() const;
  std::size_t size() const;
};

/// One grid point. Detunings in rad/s.
struct EnsembleMember {
  double delta_opt = 0.0;
  double delta_spin = 0.0;
  double delta_zeeman = 0.0;
  double weight = 1.0;
};

/// Tensor grid (optical x spin x branch), midpoint rule over +-3 sigma,
/// weights normalized to 1. Ordering is optical-major and fixed.
std::vector<EnsembleMember> detuning_grid(const EnsembleSpec& spec);

/// `base` with the member's detunings added.
LambdaParams member_params(const LambdaParams& base, const EnsembleMember& member);

/// Step that satisfies every member's RK4 limit for every pulse in `seq`.
double common_step(const SequenceSpec& seq, const LambdaParams& base,
                   const std::vector<EnsembleMember>& members);

struct EnsembleOptions {
  DensityMatrix3 rho0 = mixed_ground_state();
  unsigned threads = 1;
  WaitMethod waits = WaitMethod::kExact;
};

/// Weighted average of the members' trajectories on a shared time grid.
/// Members are summed in fixed blocks and the block sums are combined in
/// grid order, so the result is bit-identical for any thread count.
Trajectory ensemble_average(const SequenceSpec& seq, const LambdaParams& base,
                            const EnsembleSpec& spec, const EnsembleOptions& options = {});

}  // namespace eitecho

#endif  // EITECHO_ENSEMBLE_HPP
