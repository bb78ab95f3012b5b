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

#ifndef HYPERPURE_ANALYSIS_HPP
#define HYPERPURE_ANALYSIS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hyperpure/common.hpp"
#include "hyperpure/qstate.hpp"

namespace hyperpure {

/// Single-photon polarization states: H, V, D = (H+V)/sqrt2, A = (H-V)/sqrt2,
/// R = (H-iV)/sqrt2, L = (H+iV)/sqrt2.
Eigen::Vector2cd polarization_state(char label);
/// cos(x) H + sin(x) V.
Eigen::Vector2cd linear_polarization(double angle_rad);

/// Sixteen two-photon projectors |b_nu><b_nu| and their dual matrices M_nu, so
/// that rho = sum_nu M_nu <b_nu|rho|b_nu> for every two-qubit rho.
class TomographyBasisSet {
 public:
  /// Labels are two characters (signal, idler) from {H,V,D,A,R,L}. The first four
  /// must form a complete product basis; they carry the count normalization.
  explicit TomographyBasisSet(const std::array<std::string, 16>& labels);

  /// HH, HV, VV, VH, RH, RV, DV, DH, DR, DD, RD, HD, VD, VL, HL, RL.
  static const TomographyBasisSet& standard();

  const std::array<std::string, 16>& labels() const { return labels_; }
  const Eigen::Vector4cd& state(int nu) const { return states_[nu]; }
  const Matrix& dual(int nu) const { return duals_[nu]; }
  double condition_number() const { return condition_; }

  /// <b_nu|rho|b_nu> for all nu.
  std::array<double, 16> probabilities(const JointDensityMatrix& rho) const;

 private:
  std::array<std::string, 16> labels_;
  std::array<Eigen::Vector4cd, 16> states_;
  std::array<Matrix, 16> duals_;
  double condition_ = 0.0;
};

struct CoincidenceTable {
  std::array<std::string, 16> labels;
  std::array<uint64_t, 16> counts{};
  double integration_time = 0.0;  // seconds

  static CoincidenceTable for_basis(const TomographyBasisSet& basis);
};

/// Linear inversion sum_nu M_nu n_nu / (n_1 + ... + n_4), then eigenvalue clipping to
/// the nearest unit-trace PSD matrix. Throws NumericalError on zero normalization.
JointDensityMatrix qst_reconstruct(const CoincidenceTable& table,
                                   const TomographyBasisSet& basis = TomographyBasisSet::standard());

/// Noise-free counts round(N p_nu) for a known state.
CoincidenceTable expected_table(const JointDensityMatrix& rho, double pairs_per_setting,
                                const TomographyBasisSet& basis = TomographyBasisSet::standard());

struct FidelityEstimate {
  double fidelity = 0.0;  // bootstrap mean
  double std = 0.0;
  double point = 0.0;     // fidelity of the reconstruction of the table itself
};

/// Poisson bootstrap: every resample redraws each count from Poisson(n_nu), is
/// reconstructed and scored against the target. Resample r uses substream r of
/// `seed`; serial and parallel runs agree bit for bit.
FidelityEstimate fidelity_with_error(const CoincidenceTable& table, const JointDensityMatrix& target,
                                     int resamples, uint64_t seed,
                                     Execution exec = Execution::parallel,
                                     const TomographyBasisSet& basis = TomographyBasisSet::standard());

/// Polarizer angles in degrees; perpendiculars are angle + 90.
struct ChshSettings {
  double a = 0.0;
  double a_prime = 45.0;
  double b = 22.5;
  double b_prime = 67.5;

  static double perp(double angle_deg) { return angle_deg + 90.0; }
};

/// Tr(rho sigma(a) (x) sigma(b)), sigma(x) = cos 2x Z + sin 2x X the +-1 observable
/// of a linear polarizer at x (degrees).
double correlation_E(const JointDensityMatrix& rho, double a_deg, double b_deg);

/// Coincidences at (a,b), (a,b_perp), (a_perp,b), (a_perp,b_perp).
struct CorrelationCounts {
  uint64_t ab = 0, ab_perp = 0, aperp_b = 0, aperp_bperp = 0;
};
double correlation_E(const CorrelationCounts& cc);

struct ChshResult {
  double S = 0.0;
  std::array<double, 4> E{};  // E(a,b), E(a,b'), E(a',b), E(a',b')
  ChshSettings settings;
};

ChshResult chsh_S(const JointDensityMatrix& rho, const ChshSettings& settings = {});

/// Counts for the four correlation terms in ChshResult::E order.
struct ChshCounts {
  std::array<CorrelationCounts, 4> terms;
};
ChshResult chsh_S(const ChshCounts& counts, const ChshSettings& settings = {});

/// The sixteen (alice, bob) polarizer angles behind ChshCounts, term-major, each
/// term ordered (a,b), (a,b_perp), (a_perp,b), (a_perp,b_perp).
std::array<std::pair<double, double>, 16> chsh_angle_pairs(const ChshSettings& settings);

}  // namespace hyperpure

#endif  // HYPERPURE_ANALYSIS_HPP
