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

#ifndef HYPERPURE_PURIFY_HPP
#define HYPERPURE_PURIFY_HPP

#include <optional>
#include <string>
#include <vector>

#include "hyperpure/common.hpp"
#include "hyperpure/qstate.hpp"

namespace hyperpure {

/// Which output waveguides feed the detectors. Pair {0,1} is relabeled to the
/// qubit basis {0,1} (= H, V); pair {2,3} likewise maps 2 -> 0, 3 -> 1.
enum class Collection { first_pair, second_pair, both_parallel };

std::string to_string(Collection c);

struct PurificationOutcome {
  std::optional<JointDensityMatrix> post_state;  // empty when no coincidences survive
  double success_probability = 0.0;
  Collection collection = Collection::first_pair;

  bool has_coincidences() const { return post_state.has_value(); }
};

/// Probability below which a post-selection counts as "no coincidences".
inline constexpr double kMinSuccess = 1e-12;

/// Projects both photons onto the collected waveguide pair(s) without any circuit;
/// success_probability is the trace before renormalization.
PurificationOutcome collect(const JointDensityMatrix& rho16, Collection collection);

/// Purification permutation on both photons, then collection and renormalization.
PurificationOutcome purify(const JointDensityMatrix& rho16, Collection collection = Collection::first_pair);

/// Hadamard layer on both photons (phase flips become bit flips), then purify.
PurificationOutcome purify_pf(const JointDensityMatrix& rho16, Collection collection = Collection::first_pair);

/// Post-purification fidelity under bit-flip noise, F1 F2 / (F1 F2 + (1-F1)(1-F2)).
double theoretical_fidelity_bf(double f1, double f2);

/// The same protocol against Werner (white) noise on both degrees of freedom:
/// (F^2 + (1-F)^2/9) / (F^2 + 2F(1-F)/3 + 5(1-F)^2/9).
double theoretical_fidelity_werner(double f);

struct SyndromeRow {
  BellKind spatial_bell = BellKind::phi_plus;
  BellKind polar_bell = BellKind::phi_plus;
  double probability = 0.0;
  bool coincidence = false;
  std::string post_label;  // path-basis state after purification, e.g. "|11>+|33>+|22>+|00>"
  std::optional<BellKind> collected;  // Bell state on the first pair when coincidence
};

/// Sixteen rows, spatial-major in the order phi+, phi-, psi+, psi-, both DOFs
/// Werner-distributed with weight F.
std::vector<SyndromeRow> syndrome_table(double f);

/// Fidelity to Phi+ of the post-selected mixture described by the rows.
double syndrome_fidelity(const std::vector<SyndromeRow>& rows);

}  // namespace hyperpure

#endif  // HYPERPURE_PURIFY_HPP
