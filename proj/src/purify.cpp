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

#include "hyperpure/purify.hpp"

#include <cmath>

#include "hyperpure/circuit.hpp"

namespace hyperpure {

std::string to_string(Collection c) {
  switch (c) {
    case Collection::first_pair: return "first_pair";
    case Collection::second_pair: return "second_pair";
    case Collection::both_parallel: return "both_parallel";
  }
  throw std::invalid_argument("unknown collection");
}

namespace {

// Unnormalized two-qubit block of rho16 on waveguides {base, base+1} for both photons.
Matrix pair_block(const Matrix& rho, int base) {
  Matrix out(4, 4);
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 2; ++i)
      for (int s2 = 0; s2 < 2; ++s2)
        for (int i2 = 0; i2 < 2; ++i2)
          out(s * 2 + i, s2 * 2 + i2) = rho((base + s) * 4 + base + i, (base + s2) * 4 + base + i2);
  return out;
}

void check16(const JointDensityMatrix& rho) {
  if (rho.signal_dim() != 4 || rho.idler_dim() != 4)
    throw std::invalid_argument("purification expects a 16-dim two-ququart state");
}

}  // namespace

PurificationOutcome collect(const JointDensityMatrix& rho16, Collection collection) {
  check16(rho16);
  Matrix block;
  switch (collection) {
    case Collection::first_pair: block = pair_block(rho16.matrix(), 0); break;
    case Collection::second_pair: block = pair_block(rho16.matrix(), 2); break;
    case Collection::both_parallel:
      block = pair_block(rho16.matrix(), 0) + pair_block(rho16.matrix(), 2);
      break;
  }
  PurificationOutcome out;
  out.collection = collection;
  out.success_probability = std::max(0.0, block.trace().real());
  if (out.success_probability >= kMinSuccess) {
    Matrix m = block / out.success_probability;
    m = 0.5 * (m + m.adjoint());
    out.post_state.emplace(m, 2, 2, JointDensityMatrix::Unchecked{});
  }
  return out;
}

PurificationOutcome purify(const JointDensityMatrix& rho16, Collection collection) {
  check16(rho16);
  const Matrix p = purification_permutation();
  return collect(apply_unitary(rho16, p, p), collection);
}

PurificationOutcome purify_pf(const JointDensityMatrix& rho16, Collection collection) {
  check16(rho16);
  const Matrix h = hadamard_layer();
  return purify(apply_unitary(rho16, h, h), collection);
}

double theoretical_fidelity_bf(double f1, double f2) {
  if (!(f1 >= 0.0 && f1 <= 1.0 && f2 >= 0.0 && f2 <= 1.0))
    throw std::invalid_argument("theoretical_fidelity_bf: fidelities must be in [0,1]");
  const double good = f1 * f2;
  const double den = good + (1.0 - f1) * (1.0 - f2);
  if (den <= 0.0) throw NumericalError("theoretical_fidelity_bf: no coincidences survive (denominator 0)");
  return good / den;
}

double theoretical_fidelity_werner(double f) {
  if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("theoretical_fidelity_werner: F must be in (0,1]");
  const double e = 1.0 - f;
  return (f * f + e * e / 9.0) / (f * f + 2.0 / 3.0 * f * e + 5.0 / 9.0 * e * e);
}

std::vector<SyndromeRow> syndrome_table(double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("syndrome_table: F must be in [0,1]");
  const Matrix4 perm = purification_permutation();
  auto weight = [f](BellKind k) { return k == BellKind::phi_plus ? f : (1.0 - f) / 3.0; };
  std::vector<SyndromeRow> rows;
  for (BellKind spa : kAllBellKinds)
    for (BellKind pol : kAllBellKinds) {
      SyndromeRow row;
      row.spatial_bell = spa;
      row.polar_bell = pol;
      row.probability = weight(spa) * weight(pol);

      // Walk the product expansion term by term (spatial pair outer, polarization
      // pair inner) and send each path pair through the permutation.
      const Vector sv = bell_state(spa).amplitudes();
      const Vector pv = bell_state(pol).amplitudes();
      Vector collected = Vector::Zero(4);
      bool first_term = true;
      for (int sa = 0; sa < 4; ++sa) {
        if (std::abs(sv(sa)) == 0.0) continue;
        for (int pa = 0; pa < 4; ++pa) {
          if (std::abs(pv(pa)) == 0.0) continue;
          const Complex amp = sv(sa) * pv(pa);
          const int s_in = ModeIndex::from_bits(sa / 2, pa / 2).value();
          const int i_in = ModeIndex::from_bits(sa % 2, pa % 2).value();
          int s_out = 0, i_out = 0;
          for (int r = 0; r < 4; ++r) {
            if (std::abs(perm(r, s_in)) > 0.5) s_out = r;
            if (std::abs(perm(r, i_in)) > 0.5) i_out = r;
          }
          const bool negative = amp.real() < 0.0;
          if (!first_term || negative) row.post_label += negative ? "-" : "+";
          row.post_label += "|" + std::to_string(s_out) + std::to_string(i_out) + ">";
          first_term = false;
          if (s_out < 2 && i_out < 2) collected(s_out * 2 + i_out) += amp;
        }
      }
      const double kept = collected.squaredNorm();
      row.coincidence = kept > kMinSuccess;
      if (row.coincidence) {
        const Vector c = collected / std::sqrt(kept);
        for (BellKind b : kAllBellKinds)
          if (std::abs(std::abs(bell_state(b).amplitudes().dot(c)) - 1.0) < 1e-12) row.collected = b;
      }
      rows.push_back(row);
    }
  return rows;
}

double syndrome_fidelity(const std::vector<SyndromeRow>& rows) {
  double kept = 0.0, good = 0.0;
  for (const auto& r : rows) {
    if (!r.coincidence) continue;
    kept += r.probability;
    if (r.collected == BellKind::phi_plus) good += r.probability;
  }
  if (kept <= 0.0) throw NumericalError("syndrome_fidelity: no coincidence rows");
  return good / kept;
}

}  // namespace hyperpure
