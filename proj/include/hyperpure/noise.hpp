// Copyright 2026 The hyperpure Authors
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

#ifndef HYPERPURE_NOISE_HPP
#define HYPERPURE_NOISE_HPP

#include <string>
#include <vector>

#include "hyperpure/circuit.hpp"
#include "hyperpure/common.hpp"
#include "hyperpure/qstate.hpp"

namespace hyperpure {

enum class ErrorKind { none, bf_pol, bf_spa, bf_both, pf_pol, pf_spa, pf_both };

std::string to_string(ErrorKind kind);
ErrorKind error_kind_from_string(const std::string& s);

/// Idler-side unitary of an error kind, compiled from the matching EGC configuration.
Matrix4 error_unitary(ErrorKind kind);

struct ChannelBranch {
  double probability = 0.0;
  ErrorKind kind = ErrorKind::none;
  Matrix4 idler = Matrix4::Identity();
  Matrix4 signal = Matrix4::Identity();
};

/// Convex mixture of unitary error operations (the time-binned EGC switching).
/// Probabilities sum to 1 within 1e-12 and every unitary is checked.
class ChannelMix {
 public:
  explicit ChannelMix(std::vector<ChannelBranch> branches);

  static ChannelMix identity();
  /// Builds branches from kinds; zero-probability entries are dropped.
  static ChannelMix from_kinds(const std::vector<std::pair<double, ErrorKind>>& weights);

  const std::vector<ChannelBranch>& branches() const { return branches_; }
  std::size_t size() const { return branches_.size(); }

 private:
  std::vector<ChannelBranch> branches_;
};

/// Independent flips of the spatial and polarization bits with probability p each:
/// weights (1-p)^2, p(1-p), p(1-p), p^2 on {none, pol, spa, both}.
ChannelMix bf_channel_mix(double p);
ChannelMix pf_channel_mix(double p);

/// sum_k p_k U_k rho U_k^dagger, U_k = signal_k (x) idler_k.
JointDensityMatrix apply_channel_mix(const JointDensityMatrix& rho, const ChannelMix& mix);

/// Draws a branch index with the mix probabilities.
std::size_t sample_branch(const ChannelMix& mix, Rng& rng);

class WernerParam {
 public:
  explicit WernerParam(double fidelity);
  double fidelity() const { return f_; }

 private:
  double f_;
};

/// F |Phi+><Phi+| + (1-F)/3 (|Phi-><Phi-| + |Psi+><Psi+| + |Psi-><Psi-|).
JointDensityMatrix werner_state(WernerParam param);

/// Uncorrelated accidental coincidences at detection: rho -> (1-l) rho + l I/d.
JointDensityMatrix apply_white_noise(const JointDensityMatrix& rho, double weight);
/// White-noise weight that brings a pure Bell pair down to fidelity f0 (two qubits).
double white_noise_for_fidelity(double f0);

}  // namespace hyperpure

#endif  // HYPERPURE_NOISE_HPP
