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

#include "hyperpure/analysis.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SVD>

namespace hyperpure {

Eigen::Vector2cd polarization_state(char label) {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i{0.0, 1.0};
  Eigen::Vector2cd v;
  switch (label) {
    case 'H': v << 1, 0; break;
    case 'V': v << 0, 1; break;
    case 'D': v << r, r; break;
    case 'A': v << r, -r; break;
    case 'R': v << r, -i * r; break;
    case 'L': v << r, i * r; break;
    default: throw std::invalid_argument(std::string("unknown polarization label '") + label + "'");
  }
  return v;
}

Eigen::Vector2cd linear_polarization(double angle_rad) {
  Eigen::Vector2cd v;
  v << std::cos(angle_rad), std::sin(angle_rad);
  return v;
}

namespace {

Matrix2 pauli(int k) {
  const Complex i{0.0, 1.0};
  Matrix2 m;
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -i, i, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

// Orthonormal Hermitian operator basis sigma_j (x) sigma_k / 2.
const std::array<Matrix, 16>& pauli_basis() {
  static const std::array<Matrix, 16> basis = [] {
    std::array<Matrix, 16> b;
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) b[j * 4 + k] = kron(pauli(j), pauli(k)) / 2.0;
    return b;
  }();
  return basis;
}

}  // namespace

TomographyBasisSet::TomographyBasisSet(const std::array<std::string, 16>& labels) : labels_(labels) {
  for (int nu = 0; nu < 16; ++nu) {
    if (labels_[nu].size() != 2) throw std::invalid_argument("tomography label must have two characters");
    const Eigen::Vector2cd s = polarization_state(labels_[nu][0]);
    const Eigen::Vector2cd i = polarization_state(labels_[nu][1]);
    states_[nu] << s(0) * i(0), s(0) * i(1), s(1) * i(0), s(1) * i(1);
  }
  Matrix completeness = Matrix::Zero(4, 4);
  for (int nu = 0; nu < 4; ++nu) completeness += states_[nu] * states_[nu].adjoint();
  if ((completeness - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("tomography basis: the first four projectors must resolve the identity");

  // B(nu, k) = Tr(P_nu Gamma_k) = <b_nu|Gamma_k|b_nu>, real for Hermitian Gamma_k.
  const auto& gamma = pauli_basis();
  Eigen::MatrixXd b(16, 16);
  for (int nu = 0; nu < 16; ++nu)
    for (int k = 0; k < 16; ++k) b(nu, k) = states_[nu].dot(gamma[k] * states_[nu]).real();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
  const auto& sv = svd.singularValues();
  condition_ = sv(0) / sv(sv.size() - 1);
  if (!std::isfinite(condition_) || condition_ > 1e12)
    throw NumericalError("tomography basis set is not tomographically complete");
  const Eigen::MatrixXd b_inv = b.inverse();
  for (int nu = 0; nu < 16; ++nu) {
    duals_[nu] = Matrix::Zero(4, 4);
    for (int k = 0; k < 16; ++k) duals_[nu] += b_inv(k, nu) * gamma[k];
  }
}

const TomographyBasisSet& TomographyBasisSet::standard() {
  static const TomographyBasisSet james({"HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH", "DR", "DD", "RD",
                                         "HD", "VD", "VL", "HL", "RL"});
  return james;
}

std::array<double, 16> TomographyBasisSet::probabilities(const JointDensityMatrix& rho) const {
  if (rho.dim() != 4) throw std::invalid_argument("tomography expects a two-qubit state");
  std::array<double, 16> p{};
  for (int nu = 0; nu < 16; ++nu) p[nu] = std::max(0.0, states_[nu].dot(rho.matrix() * states_[nu]).real());
  return p;
}

CoincidenceTable CoincidenceTable::for_basis(const TomographyBasisSet& basis) {
  CoincidenceTable t;
  t.labels = basis.labels();
  return t;
}

namespace {

void check_labels(const CoincidenceTable& table, const TomographyBasisSet& basis) {
  if (table.labels != basis.labels())
    throw std::invalid_argument("coincidence table labels do not match the basis set");
}

Matrix linear_inversion(const std::array<double, 16>& n, const TomographyBasisSet& basis) {
  const double norm = n[0] + n[1] + n[2] + n[3];
  if (!(norm > 0.0)) throw NumericalError("tomography: zero normalization counts");
  Matrix rho = Matrix::Zero(4, 4);
  for (int nu = 0; nu < 16; ++nu) rho += basis.dual(nu) * n[nu];
  return rho / norm;
}

}  // namespace

JointDensityMatrix qst_reconstruct(const CoincidenceTable& table, const TomographyBasisSet& basis) {
  check_labels(table, basis);
  std::array<double, 16> n{};
  for (int nu = 0; nu < 16; ++nu) n[nu] = static_cast<double>(table.counts[nu]);
  return {clip_to_physical(linear_inversion(n, basis)), 2, 2};
}

CoincidenceTable expected_table(const JointDensityMatrix& rho, double pairs_per_setting,
                                const TomographyBasisSet& basis) {
  if (!(pairs_per_setting > 0.0)) throw std::invalid_argument("expected_table: N must be positive");
  CoincidenceTable t = CoincidenceTable::for_basis(basis);
  const auto p = basis.probabilities(rho);
  for (int nu = 0; nu < 16; ++nu) t.counts[nu] = static_cast<uint64_t>(std::llround(pairs_per_setting * p[nu]));
  return t;
}

FidelityEstimate fidelity_with_error(const CoincidenceTable& table, const JointDensityMatrix& target,
                                     int resamples, uint64_t seed, Execution exec,
                                     const TomographyBasisSet& basis) {
  if (resamples < 100) throw std::invalid_argument("fidelity_with_error: at least 100 resamples required");
  check_labels(table, basis);
  FidelityEstimate out;
  out.point = fidelity(qst_reconstruct(table, basis), target);

  std::vector<double> f(static_cast<std::size_t>(resamples), 0.0);
  std::vector<int> failed(static_cast<std::size_t>(resamples), 0);
  auto one = [&](int r) {
    Rng rng(substream_seed(seed, static_cast<uint64_t>(r)));
    CoincidenceTable t = table;
    for (int nu = 0; nu < 16; ++nu) {
      const auto mean = static_cast<double>(table.counts[nu]);
      if (mean <= 0.0) continue;
      std::poisson_distribution<long long> pois(mean);
      t.counts[nu] = static_cast<uint64_t>(pois(rng));
    }
    try {
      f[r] = fidelity(qst_reconstruct(t, basis), target);
    } catch (const NumericalError&) {
      failed[r] = 1;
    }
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < resamples; ++r) one(r);
  } else {
    for (int r = 0; r < resamples; ++r) one(r);
  }
  for (int flag : failed)
    if (flag) throw NumericalError("fidelity_with_error: a resample has zero normalization counts");

  double mean = 0.0;
  for (double x : f) mean += x;
  mean /= resamples;
  double var = 0.0;
  for (double x : f) var += (x - mean) * (x - mean);
  out.fidelity = mean;
  out.std = std::sqrt(var / (resamples - 1));
  return out;
}

namespace {

Matrix2 polarizer_observable(double angle_deg) {
  const double x = 2.0 * angle_deg * kPi / 180.0;
  return std::cos(x) * pauli(3) + std::sin(x) * pauli(1);
}

}  // namespace

double correlation_E(const JointDensityMatrix& rho, double a_deg, double b_deg) {
  if (rho.dim() != 4) throw std::invalid_argument("correlation_E expects a two-qubit state");
  if (!std::isfinite(a_deg) || !std::isfinite(b_deg)) throw std::invalid_argument("correlation_E: bad angle");
  const Matrix obs = kron(polarizer_observable(a_deg), polarizer_observable(b_deg));
  return (rho.matrix() * obs).trace().real();
}

double correlation_E(const CorrelationCounts& cc) {
  const double sum = static_cast<double>(cc.ab) + cc.ab_perp + cc.aperp_b + cc.aperp_bperp;
  if (sum <= 0.0) throw NumericalError("correlation_E: no coincidences");
  return (static_cast<double>(cc.ab) - static_cast<double>(cc.ab_perp) - static_cast<double>(cc.aperp_b) +
          static_cast<double>(cc.aperp_bperp)) /
         sum;
}

namespace {

ChshResult combine(std::array<double, 4> e, const ChshSettings& s) {
  ChshResult r;
  r.E = e;
  r.S = e[0] - e[1] + e[2] + e[3];
  r.settings = s;
  return r;
}

}  // namespace

ChshResult chsh_S(const JointDensityMatrix& rho, const ChshSettings& s) {
  return combine({correlation_E(rho, s.a, s.b), correlation_E(rho, s.a, s.b_prime),
                  correlation_E(rho, s.a_prime, s.b), correlation_E(rho, s.a_prime, s.b_prime)},
                 s);
}

ChshResult chsh_S(const ChshCounts& counts, const ChshSettings& s) {
  std::array<double, 4> e{};
  for (int k = 0; k < 4; ++k) e[k] = correlation_E(counts.terms[k]);
  return combine(e, s);
}

std::array<std::pair<double, double>, 16> chsh_angle_pairs(const ChshSettings& s) {
  const std::array<std::pair<double, double>, 4> terms = {
      std::pair{s.a, s.b}, {s.a, s.b_prime}, {s.a_prime, s.b}, {s.a_prime, s.b_prime}};
  std::array<std::pair<double, double>, 16> out;
  for (int k = 0; k < 4; ++k) {
    const auto [x, y] = terms[k];
    out[k * 4 + 0] = {x, y};
    out[k * 4 + 1] = {x, ChshSettings::perp(y)};
    out[k * 4 + 2] = {ChshSettings::perp(x), y};
    out[k * 4 + 3] = {ChshSettings::perp(x), ChshSettings::perp(y)};
  }
  return out;
}

}  // namespace hyperpure
