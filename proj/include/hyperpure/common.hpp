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

#ifndef HYPERPURE_COMMON_HPP
#define HYPERPURE_COMMON_HPP

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hyperpure {

inline constexpr const char* kVersion = "0.3.0";

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;

inline constexpr double kPi = std::numbers::pi;

// Structural tolerance (Hermiticity, trace, unitarity) and PSD slack.
inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kPsdSlack = 1e-8;

/// Thrown when a computation cannot produce a meaningful number
/// (zero normalization, empty post-selection, no root).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Selects the serial reference loop or the OpenMP kernel. Both consume the
/// same per-block random substreams, so their results are bit-identical.
enum class Execution { serial, parallel };

// SplitMix64 finalizer; used to derive independent substream seeds.
inline constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for substream (a, b) of a run seeded with `seed`.
inline constexpr uint64_t substream_seed(uint64_t seed, uint64_t a, uint64_t b = 0) {
  return mix64(mix64(mix64(seed) ^ (a + 0x632be59bd9b4e019ULL)) ^ (b + 0x8cb92ba72f3d8dd7ULL));
}

using Rng = std::mt19937_64;

}  // namespace hyperpure

#endif  // HYPERPURE_COMMON_HPP
