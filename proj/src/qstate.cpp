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

#include "hyperpure/qstate.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace hyperpure {

std::string ModeIndex::label() const {
  return std::to_string(spatial_bit()) + (polarization_bit() == 0 ? "H" : "V");
}

std::string bell_name(BellKind kind, Dof dof) {
  const bool upper = dof == Dof::polarization;
  switch (kind) {
    case BellKind::phi_plus: return upper ? "Phi+" : "phi+";
    case BellKind::phi_minus: return upper ? "Phi-" : "phi-";
    case BellKind::psi_plus: return upper ? "Psi+" : "psi+";
    case BellKind::psi_minus: return upper ? "Psi-" : "psi-";
  }
  throw std::invalid_argument("bell_name: unknown kind");
}

namespace {

void check_dims(int signal_dim, int idler_dim, Eigen::Index size) {
  if (signal_dim <= 0 || idler_dim <= 0)
    throw std::invalid_argument("joint state: dimensions must be positive");
  if (static_cast<Eigen::Index>(signal_dim) * idler_dim != size)
    throw std::invalid_argument("joint state: size does not match signal_dim * idler_dim");
}

}  // namespace

JointState::JointState(Vector amplitudes, int signal_dim, int idler_dim)
    : amplitudes_(std::move(amplitudes)), signal_dim_(signal_dim), idler_dim_(idler_dim) {
  check_dims(signal_dim_, idler_dim_, amplitudes_.size());
  if (std::abs(amplitudes_.squaredNorm() - 1.0) > 1e-12)
    throw std::invalid_argument("JointState: amplitudes are not normalized");
}

JointState::JointState(Vector amplitudes, int signal_dim, int idler_dim, Unnormalized)
    : amplitudes_(std::move(amplitudes)),
      signal_dim_(signal_dim),
      idler_dim_(idler_dim),
      normalized_(false) {
  check_dims(signal_dim_, idler_dim_, amplitudes_.size());
}

Complex JointState::inner(const JointState& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("JointState::inner: dimension mismatch");
  return amplitudes_.dot(other.amplitudes_);
}

void validate_density_matrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("density matrix must be square and non-empty");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kStructuralTol)
    throw std::invalid_argument("density matrix is not Hermitian");
  const Complex tr = m.trace();
  if (std::abs(tr.real() - 1.0) > kStructuralTol || std::abs(tr.imag()) > kStructuralTol)
    throw std::invalid_argument("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdSlack)
    throw std::invalid_argument("density matrix is not positive semidefinite");
}

JointDensityMatrix::JointDensityMatrix(Matrix matrix, int signal_dim, int idler_dim)
    : matrix_(std::move(matrix)), signal_dim_(signal_dim), idler_dim_(idler_dim) {
  check_dims(signal_dim_, idler_dim_, matrix_.rows());
  validate_density_matrix(matrix_);
}

JointDensityMatrix::JointDensityMatrix(Matrix matrix, int signal_dim, int idler_dim, Unchecked)
    : matrix_(std::move(matrix)), signal_dim_(signal_dim), idler_dim_(idler_dim) {
  check_dims(signal_dim_, idler_dim_, matrix_.rows());
}

JointDensityMatrix JointDensityMatrix::from_state(const JointState& psi) {
  Vector v = psi.amplitudes() / std::sqrt(psi.squared_norm());
  return {v * v.adjoint(), psi.signal_dim(), psi.idler_dim(), Unchecked{}};
}

JointDensityMatrix JointDensityMatrix::maximally_mixed(int signal_dim, int idler_dim) {
  const int d = signal_dim * idler_dim;
  return {Matrix::Identity(d, d) / static_cast<double>(d), signal_dim, idler_dim, Unchecked{}};
}

double JointDensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

double JointDensityMatrix::expectation(const JointState& psi) const {
  if (psi.dim() != dim()) throw std::invalid_argument("expectation: dimension mismatch");
  return psi.amplitudes().dot(matrix_ * psi.amplitudes()).real();
}

JointState bell_state(BellKind kind) {
  const double r = 1.0 / std::sqrt(2.0);
  Vector v = Vector::Zero(4);
  switch (kind) {
    case BellKind::phi_plus: v << r, 0, 0, r; break;
    case BellKind::phi_minus: v << r, 0, 0, -r; break;
    case BellKind::psi_plus: v << 0, r, r, 0; break;
    case BellKind::psi_minus: v << 0, r, -r, 0; break;
  }
  return {v, 2, 2};
}

JointState hyper_product(BellKind spatial, BellKind polarization) {
  const Vector spa = bell_state(spatial).amplitudes();
  const Vector pol = bell_state(polarization).amplitudes();
  Vector v = Vector::Zero(16);
  for (int as = 0; as < 2; ++as)
    for (int ai = 0; ai < 2; ++ai)
      for (int bs = 0; bs < 2; ++bs)
        for (int bi = 0; bi < 2; ++bi) {
          const int s = ModeIndex::from_bits(as, bs).value();
          const int i = ModeIndex::from_bits(ai, bi).value();
          v(s * 4 + i) = spa(as * 2 + ai) * pol(bs * 2 + bi);
        }
  return {v, 4, 4};
}

JointState hyper_state() {
  Vector v = Vector::Zero(16);
  for (int k = 0; k < 4; ++k) v(k * 4 + k) = 0.5;
  return {v, 4, 4};
}

Matrix hermitian_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix clip_to_physical(const Matrix& m) {
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(0.0);
  const double total = lambda.sum();
  if (!(total > 0.0)) throw NumericalError("clip_to_physical: no positive eigenvalues");
  lambda /= total;
  Matrix out = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

namespace {

// Dominant eigenvector of a (numerically) pure state.
Vector dominant_vector(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvectors().col(m.rows() - 1);
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

double fidelity(const JointDensityMatrix& rho, const JointDensityMatrix& rho0) {
  if (rho.dim() != rho0.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  constexpr double kPure = 1.0 - 1e-12;
  if (rho0.purity() > kPure) {
    const Vector psi = dominant_vector(rho0.matrix());
    return clamp01(psi.dot(rho.matrix() * psi).real());
  }
  if (rho.purity() > kPure) {
    const Vector psi = dominant_vector(rho.matrix());
    return clamp01(psi.dot(rho0.matrix() * psi).real());
  }
  // Nuclear norm of sqrt(rho) sqrt(rho0): symmetric, and null directions stay near zero.
  const Matrix product = hermitian_sqrt(rho.matrix()) * hermitian_sqrt(rho0.matrix());
  Eigen::JacobiSVD<Matrix> svd(product);
  const double root_trace = svd.singularValues().sum();
  return clamp01(root_trace * root_trace);
}

double fidelity(const JointDensityMatrix& rho, const JointState& target) {
  if (rho.dim() != target.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const Vector psi = target.amplitudes() / std::sqrt(target.squared_norm());
  return clamp01(psi.dot(rho.matrix() * psi).real());
}

JointDensityMatrix partial_trace(const JointDensityMatrix& rho, Dof keep) {
  if (rho.signal_dim() != 4 || rho.idler_dim() != 4)
    throw std::invalid_argument("partial_trace: expects a 16-dim two-ququart state");
  if (keep != Dof::polarization && keep != Dof::spatial)
    throw std::invalid_argument("partial_trace: invalid degree-of-freedom tag");
  const bool keep_pol = keep == Dof::polarization;
  auto path = [keep_pol](int kept, int traced) {
    return keep_pol ? ModeIndex::from_bits(traced, kept).value()
                    : ModeIndex::from_bits(kept, traced).value();
  };
  Matrix out = Matrix::Zero(4, 4);
  for (int ks = 0; ks < 2; ++ks)
    for (int ki = 0; ki < 2; ++ki)
      for (int ks2 = 0; ks2 < 2; ++ks2)
        for (int ki2 = 0; ki2 < 2; ++ki2) {
          Complex acc = 0;
          for (int ts = 0; ts < 2; ++ts)
            for (int ti = 0; ti < 2; ++ti)
              acc += rho(path(ks, ts) * 4 + path(ki, ti), path(ks2, ts) * 4 + path(ki2, ti));
          out(ks * 2 + ki, ks2 * 2 + ki2) = acc;
        }
  return {out, 2, 2, JointDensityMatrix::Unchecked{}};
}

JointDensityMatrix reduce_to_photon(const JointDensityMatrix& rho, Photon keep) {
  const int ds = rho.signal_dim();
  const int di = rho.idler_dim();
  const int d = keep == Photon::signal ? ds : di;
  Matrix out = Matrix::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Complex acc = 0;
      if (keep == Photon::signal) {
        for (int t = 0; t < di; ++t) acc += rho(a * di + t, b * di + t);
      } else {
        for (int t = 0; t < ds; ++t) acc += rho(t * di + a, t * di + b);
      }
      out(a, b) = acc;
    }
  return {out, d, 1, JointDensityMatrix::Unchecked{}};
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u * u.adjoint() - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

namespace {

Matrix joint_unitary(int signal_dim, int idler_dim, const Matrix& u_signal, const Matrix& u_idler) {
  if (u_signal.rows() != signal_dim || u_idler.rows() != idler_dim)
    throw std::invalid_argument("apply_unitary: unitary size does not match the mode space");
  if (!is_unitary(u_signal) || !is_unitary(u_idler))
    throw std::invalid_argument("apply_unitary: operator is not unitary");
  return kron(u_signal, u_idler);
}

}  // namespace

JointState apply_unitary(const JointState& psi, const Matrix& u_signal, const Matrix& u_idler) {
  const Matrix u = joint_unitary(psi.signal_dim(), psi.idler_dim(), u_signal, u_idler);
  Vector out = u * psi.amplitudes();
  if (psi.normalized()) return {out, psi.signal_dim(), psi.idler_dim()};
  return {out, psi.signal_dim(), psi.idler_dim(), JointState::Unnormalized{}};
}

JointDensityMatrix apply_unitary(const JointDensityMatrix& rho, const Matrix& u_signal,
                                 const Matrix& u_idler) {
  const Matrix u = joint_unitary(rho.signal_dim(), rho.idler_dim(), u_signal, u_idler);
  return {u * rho.matrix() * u.adjoint(), rho.signal_dim(), rho.idler_dim(),
          JointDensityMatrix::Unchecked{}};
}

}  // namespace hyperpure
