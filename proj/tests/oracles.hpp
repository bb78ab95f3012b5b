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

// Independent reference constructions for the tests. Nothing here calls the
// library routine it is used to check.

#ifndef HYPERPURE_TESTS_ORACLES_HPP
#define HYPERPURE_TESTS_ORACLES_HPP

#include <array>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
inline const double kPi = 3.14159265358979323846;

inline Mat random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) g(r, c) = C(n(rng), n(rng));
  Eigen::HouseholderQR<Mat> qr(g);
  return qr.householderQ();
}

// Ginibre-style random state, rank `rank` (full rank when rank == d).
inline Mat random_density(int d, std::mt19937_64& rng, int rank = -1) {
  if (rank < 0) rank = d;
  std::normal_distribution<double> n(0.0, 1.0);
  Mat g(d, rank);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < rank; ++c) g(r, c) = C(n(rng), n(rng));
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

// |s, i> on a d x d mode space, signal-major.
inline Vec ket(int s, int i, int d) {
  Vec v = Vec::Zero(d * d);
  v(s * d + i) = 1.0;
  return v;
}

// Two-qubit Bell vectors over {00, 01, 10, 11}, written out by hand.
inline Vec bell(int k) {
  const double r = 1.0 / std::sqrt(2.0);
  Vec v = Vec::Zero(4);
  switch (k) {
    case 0: v << r, 0, 0, r; break;    // Phi+
    case 1: v << r, 0, 0, -r; break;   // Phi-
    case 2: v << 0, r, r, 0; break;    // Psi+
    default: v << 0, r, -r, 0; break;  // Psi-
  }
  return v;
}

// Hyper-Bell product |spatial k> (x) |polarization l> on the 16-dim path basis,
// using path mode m = 2 * spatial_bit + polarization_bit.
inline Vec hyper_bell(int spatial, int polar) {
  const Vec s = bell(spatial), p = bell(polar);
  Vec out = Vec::Zero(16);
  for (int a = 0; a < 2; ++a)      // signal spatial bit
    for (int b = 0; b < 2; ++b)    // idler spatial bit
      for (int c = 0; c < 2; ++c)  // signal polarization bit
        for (int e = 0; e < 2; ++e)
          out((2 * a + c) * 4 + (2 * b + e)) += s(2 * a + b) * p(2 * c + e);
  return out;
}

// Permutation matrix with P(to[j], j) = 1.
inline Mat permutation(const std::array<int, 4>& to) {
  Mat p = Mat::Zero(4, 4);
  for (int j = 0; j < 4; ++j) p(to[j], j) = 1.0;
  return p;
}

// Linear-polarizer correlation of a Werner state: p cos 2(a - b), p = (4F - 1)/3.
inline double werner_correlation(double f, double a_deg, double b_deg) {
  return (4 * f - 1) / 3 * std::cos(2 * (a_deg - b_deg) * kPi / 180.0);
}

// Thermal pairs P(n) = (1 - x) x^n, x = xi^2, independent detection eta per photon:
// probabilities of a click on one side, and on both sides of the same pulse.
inline double thermal_generating(double z, double x) { return (1 - x) / (1 - x * z); }
inline double thermal_single_click(double eta, double xi) {
  return 1 - thermal_generating(1 - eta, xi * xi);
}
inline double thermal_double_click(double eta_s, double eta_i, double xi) {
  const double x = xi * xi;
  return 1 - thermal_generating(1 - eta_s, x) - thermal_generating(1 - eta_i, x) +
         thermal_generating((1 - eta_s) * (1 - eta_i), x);
}

}  // namespace oracle

#endif  // HYPERPURE_TESTS_ORACLES_HPP
