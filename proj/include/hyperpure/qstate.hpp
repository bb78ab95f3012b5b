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

#ifndef HYPERPURE_QSTATE_HPP
#define HYPERPURE_QSTATE_HPP

#include <array>
#include <string>

#include "hyperpure/common.hpp"

namespace hyperpure {

// Joint two-photon states use signal-major, idler-minor ordering:
// joint index = signal_mode * idler_dim + idler_mode.

/// Waveguide path mode 0..3. The grating couplers identify mode m with the
/// fiber label (spatial m/2, polarization m%2): 0 <-> 0H, 1 <-> 0V, 2 <-> 1H, 3 <-> 1V.
class ModeIndex {
 public:
  constexpr explicit ModeIndex(int value) : value_(value) {
    if (value < 0 || value > 3) throw std::out_of_range("ModeIndex: path mode must be in [0,3]");
  }
  static constexpr ModeIndex from_bits(int spatial_bit, int polarization_bit) {
    if ((spatial_bit & ~1) != 0 || (polarization_bit & ~1) != 0)
      throw std::out_of_range("ModeIndex: bits must be 0 or 1");
    return ModeIndex(2 * spatial_bit + polarization_bit);
  }
  constexpr int value() const { return value_; }
  constexpr int spatial_bit() const { return value_ / 2; }
  // H = 0, V = 1.
  constexpr int polarization_bit() const { return value_ % 2; }
  std::string label() const;  // "0H", "1V", ...

  friend constexpr bool operator==(ModeIndex, ModeIndex) = default;

 private:
  int value_;
};

enum class Dof { polarization, spatial };

enum class BellKind { phi_plus, phi_minus, psi_plus, psi_minus };

inline constexpr std::array<BellKind, 4> kAllBellKinds = {
    BellKind::phi_plus, BellKind::phi_minus, BellKind::psi_plus, BellKind::psi_minus};

/// Bell-state name; polarization states are capitalized ("Phi+"), spatial
/// ones lower-case ("phi+"), matching the usual hyperentanglement notation.
std::string bell_name(BellKind kind, Dof dof);

/// Pure two-photon state on a d_signal x d_idler mode space.
class JointState {
 public:
  struct Unnormalized {};

  JointState(Vector amplitudes, int signal_dim, int idler_dim);
  // Post-selection residues keep their norm; the flag records that.
  JointState(Vector amplitudes, int signal_dim, int idler_dim, Unnormalized);

  const Vector& amplitudes() const { return amplitudes_; }
  int signal_dim() const { return signal_dim_; }
  int idler_dim() const { return idler_dim_; }
  int dim() const { return signal_dim_ * idler_dim_; }
  bool normalized() const { return normalized_; }
  Complex amplitude(int signal_mode, int idler_mode) const {
    return amplitudes_(signal_mode * idler_dim_ + idler_mode);
  }
  double squared_norm() const { return amplitudes_.squaredNorm(); }
  Complex inner(const JointState& other) const;  // <this|other>

 private:
  Vector amplitudes_;
  int signal_dim_;
  int idler_dim_;
  bool normalized_ = true;
};

/// Density operator on the joint mode space. The checked constructor enforces
/// Hermiticity and unit trace (kStructuralTol) and lambda_min >= -kPsdSlack.
class JointDensityMatrix {
 public:
  struct Unchecked {};

  JointDensityMatrix(Matrix matrix, int signal_dim, int idler_dim);
  JointDensityMatrix(Matrix matrix, int signal_dim, int idler_dim, Unchecked);

  static JointDensityMatrix from_state(const JointState& psi);
  static JointDensityMatrix maximally_mixed(int signal_dim, int idler_dim);

  const Matrix& matrix() const { return matrix_; }
  int signal_dim() const { return signal_dim_; }
  int idler_dim() const { return idler_dim_; }
  int dim() const { return signal_dim_ * idler_dim_; }
  Complex operator()(int row, int col) const { return matrix_(row, col); }
  double trace() const { return matrix_.trace().real(); }
  double purity() const;
  // <psi|rho|psi>
  double expectation(const JointState& psi) const;

 private:
  Matrix matrix_;
  int signal_dim_;
  int idler_dim_;
};

/// Throws std::invalid_argument unless `m` is a valid density matrix.
void validate_density_matrix(const Matrix& m);

JointState bell_state(BellKind kind);

/// |spatial Bell> (x) |polarization Bell>, expressed on the 16-dim path basis
/// through the ModeIndex relabeling.
JointState hyper_product(BellKind spatial, BellKind polarization);

/// (|00> + |11> + |22> + |33>)/2.
JointState hyper_state();

/// Uhlmann fidelity (Tr sqrt(sqrt(rho0) rho sqrt(rho0)))^2. Pure arguments are
/// detected (purity > 1 - 1e-12) and use <psi|rho|psi> directly.
double fidelity(const JointDensityMatrix& rho, const JointDensityMatrix& rho0);
double fidelity(const JointDensityMatrix& rho, const JointState& target);

/// Keeps one degree of freedom of both photons of a 16-dim state; the result is
/// the two-qubit state on (signal bit, idler bit).
JointDensityMatrix partial_trace(const JointDensityMatrix& rho, Dof keep);

enum class Photon { signal, idler };
/// Single-photon reduced state (dimension d x d, stored as d x 1).
JointDensityMatrix reduce_to_photon(const JointDensityMatrix& rho, Photon keep);

/// (U_s (x) U_i)|psi> and (U_s (x) U_i) rho (U_s (x) U_i)^dagger.
JointState apply_unitary(const JointState& psi, const Matrix& u_signal, const Matrix& u_idler);
JointDensityMatrix apply_unitary(const JointDensityMatrix& rho, const Matrix& u_signal,
                                 const Matrix& u_idler);

Matrix kron(const Matrix& a, const Matrix& b);
bool is_unitary(const Matrix& u, double tol = kStructuralTol);

/// Square root of a Hermitian PSD matrix; eigenvalues clamped at 0 first.
Matrix hermitian_sqrt(const Matrix& m);

/// Nearest physical state by eigenvalue clipping: Hermitize, clamp negative
/// eigenvalues to 0, renormalize the trace.
Matrix clip_to_physical(const Matrix& m);

}  // namespace hyperpure

#endif  // HYPERPURE_QSTATE_HPP
