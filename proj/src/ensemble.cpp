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

#include "eitecho/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eitecho/error.hpp"
#include "eitecho/parallel.hpp"

namespace eitecho {

namespace {

constexpr std::size_t kBlockSize = 8;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// FWHM = 2 sqrt(2 ln 2) sigma.
const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::log(2.0));

struct Node {
  double value;
  double weight;
};

std::vector<Node> gaussian_nodes(double fwhm, int n) {
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(n));
  if (n == 1 || fwhm == 0.0) {
    nodes.push_back({0.0, 1.0});
    return nodes;
  }
  const double sigma = fwhm / kFwhmPerSigma;
  const double width = 6.0 * sigma / n;
  for (int i = 0; i < n; ++i) {
    // Midpoints mirrored about the centre so the grid is exactly symmetric.
    const double x = (i - 0.5 * (n - 1)) * width;
    nodes.push_back({x, std::exp(-0.5 * (x / sigma) * (x / sigma))});
  }
  return nodes;
}

struct Accumulator {
  std::vector<Matrix3c> sum;

  void add(const Trajectory& t, double w) {
    if (sum.empty()) sum.assign(t.states.size(), Matrix3c::Zero());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += w * t.states[i].matrix();
  }
  void add(const Accumulator& o) {
    if (o.sum.empty()) return;
    if (sum.empty()) {
      sum = o.sum;
      return;
    }
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += o.sum[i];
  }
};

}  // namespace

void EnsembleSpec::validate() const {
  if (!(optical_fwhm >= 0.0) || !std::isfinite(optical_fwhm)) {
    throw ValidationError("EnsembleSpec.optical_fwhm must be >= 0");
  }
  if (!(spin_fwhm >= 0.0) || !std::isfinite(spin_fwhm)) {
    throw ValidationError("EnsembleSpec.spin_fwhm must be >= 0");
  }
  if (n_optical < 1 || n_optical % 2 == 0) throw ValidationError("EnsembleSpec.n_optical must be odd and >= 1");
  if (n_spin < 1 || n_spin % 2 == 0) throw ValidationError("EnsembleSpec.n_spin must be odd and >= 1");
  double total = 0.0;
  for (const auto& b : zeeman_branches) {
    if (!(b.weight >= 0.0) || !std::isfinite(b.offset)) {
      throw ValidationError("EnsembleSpec.zeeman_branches: weights must be >= 0, offsets finite");
    }
    total += b.weight;
  }
  if (!zeeman_branches.empty() && std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("EnsembleSpec.zeeman_branches: weights must sum to 1");
  }
}

std::size_t EnsembleSpec::size() const {
  const std::size_t branches = zeeman_branches.empty() ? 1 : zeeman_branches.size();
  return static_cast<std::size_t>(n_optical) * static_cast<std::size_t>(n_spin) * branches;
}

std::vector<EnsembleMember> detuning_grid(const EnsembleSpec& spec) {
  spec.validate();
  const auto optical = gaussian_nodes(spec.optical_fwhm, spec.n_optical);
  const auto spin = gaussian_nodes(spec.spin_fwhm, spec.n_spin);
  std::vector<ZeemanBranch> branches = spec.zeeman_branches;
  if (branches.empty()) branches.push_back({0.0, 1.0});

  std::vector<EnsembleMember> members;
  members.reserve(optical.size() * spin.size() * branches.size());
  double total = 0.0;
  for (const auto& o : optical) {
    for (const auto& s : spin) {
      for (const auto& b : branches) {
        const double w = o.weight * s.weight * b.weight;
        members.push_back({kTwoPi * o.value, kTwoPi * s.value, kTwoPi * b.offset, w});
        total += w;
      }
    }
  }
  for (auto& m : members) m.weight /= total;
  return members;
}

LambdaParams member_params(const LambdaParams& base, const EnsembleMember& member) {
  LambdaParams p = base;
  p.delta_opt += member.delta_opt;
  p.delta_spin += member.delta_spin;
  p.delta_zeeman += member.delta_zeeman;
  return p;
}

double common_step(const SequenceSpec& seq, const LambdaParams& base,
                   const std::vector<EnsembleMember>& members) {
  double step = seq.step;
  for (const auto& m : members) {
    LambdaParams p = member_params(base, m);
    LambdaParams flipped = p;
    flipped.delta_zeeman = -p.delta_zeeman;
    for (const auto& segment : seq.segments) {
      if (const auto* pulse = std::get_if<PulseSpec>(&segment)) {
        // Rephasing pulses run as two halves; the Zeeman sign flips in between.
        PulseSpec piece = *pulse;
        if (pulse->label == PulseLabel::kRephasePi) piece.duration *= 0.5;
        step = std::min({step, stable_step(p, piece), stable_step(flipped, piece)});
      }
    }
  }
  return step;
}

Trajectory ensemble_average(const SequenceSpec& seq, const LambdaParams& base,
                            const EnsembleSpec& spec, const EnsembleOptions& options) {
  seq.validate();
  base.validate();
  const auto members = detuning_grid(spec);
  SequenceSpec shared = seq;
  shared.step = common_step(seq, base, members);

  const std::size_t blocks = (members.size() + kBlockSize - 1) / kBlockSize;
  std::vector<Accumulator> partial(blocks);
  Trajectory layout;
  parallel_for(blocks, options.threads, [&](std::size_t b) {
    const std::size_t end = std::min(members.size(), (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) {
      Trajectory t = run_sequence(options.rho0, member_params(base, members[i]), shared, options.waits);
      partial[b].add(t, members[i].weight);
      if (i == 0) layout = std::move(t);
    }
  });

  Accumulator total;
  for (const auto& p : partial) total.add(p);
  if (total.sum.size() != layout.states.size()) {
    throw NumericalError("ensemble_average: members produced different time grids");
  }
  for (std::size_t i = 0; i < total.sum.size(); ++i) {
    const Matrix3c& m = total.sum[i];
    layout.states[i] = DensityMatrix3::unchecked(0.5 * (m + m.adjoint()));
  }
  return layout;
}

}  // namespace eitecho
