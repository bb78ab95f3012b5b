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

#ifndef HYPERPURE_CIRCUIT_HPP
#define HYPERPURE_CIRCUIT_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "hyperpure/common.hpp"
#include "hyperpure/qstate.hpp"

namespace hyperpure {

/// MZI phases in radians, wrapped to [0, 2pi). theta is the outer phase on the
/// upper output arm, psi the internal phase: psi = pi is bar, psi = 0 is cross.
class PhaseSetting {
 public:
  PhaseSetting() = default;
  PhaseSetting(double theta, double psi);

  double theta() const { return theta_; }
  double psi() const { return psi_; }

  static PhaseSetting bar() { return {kPi, kPi}; }  // theta = pi cancels the bar-state sign
  static PhaseSetting cross() { return {0.0, 0.0}; }
  static PhaseSetting balanced() { return {0.0, kPi / 2}; }

 private:
  double theta_ = kPi;
  double psi_ = kPi;
};

/// U(theta, psi) = P(theta) C P(psi) C with C = [[1, i], [i, 1]]/sqrt2 and
/// P(x) = diag(e^{ix}, 1). |U|^2 is the identity at psi = pi and a swap at psi = 0.
Matrix2 mzi_unitary(const PhaseSetting& setting);

enum class ElementKind { mzi, crossing, phase_shift, identity };

struct CircuitElement {
  ElementKind kind = ElementKind::identity;
  std::array<int, 2> ports{0, 0};  // phase_shift uses ports[0] only
  double theta = 0.0;              // MZI outer phase, or the phase-shift value
  double psi = 0.0;

  static CircuitElement mzi(int upper, int lower, const PhaseSetting& s);
  static CircuitElement crossing(int a, int b);
  static CircuitElement phase_shift(int port, double phase);
  static CircuitElement identity() { return {}; }
};

std::string to_string(ElementKind kind);
ElementKind element_kind_from_string(const std::string& s);

struct NamedCircuit {
  std::string name;
  std::vector<CircuitElement> elements;
};

/// Which degree of freedom an error-generation circuit acts on.
enum class ErrorCase { none, polarization, spatial, both };
std::string to_string(ErrorCase e);

/// Per-photon 4x4 unitary: the ordered product of the element unitaries, the
/// first element acting first. Throws std::invalid_argument on bad ports.
Matrix4 compile(const NamedCircuit& circuit);

/// Path mode <-> fiber (spatial, polarization) labels of the 2D grating couplers.
struct GcRelabelMap {
  std::pair<int, int> forward(ModeIndex m) const { return {m.spatial_bit(), m.polarization_bit()}; }
  ModeIndex inverse(int spatial_bit, int polarization_bit) const {
    return ModeIndex::from_bits(spatial_bit, polarization_bit);
  }
};
GcRelabelMap gc_relabel_map();

/// Permutation 0->1, 1->3, 2->2, 3->0 applied to both photons by the
/// purification crossings (|0H>->|0V>, |0V>->|1V>, |1H>->|1H>, |1V>->|0H>).
Matrix4 purification_permutation();

/// Two-level Hadamard: pairs (0,1),(2,3) first, then (0,2),(1,3). Equals H (x) H
/// on (spatial, polarization), entries (-1)^popcount(j&k)/2.
Matrix4 hadamard_layer();

// Named configurations of the reconfigurable circuits.

/// Heaters on the four idler paths: pi on the V paths (polarization), on the
/// spatial-1 paths (spatial), or on paths 1 and 2 (both).
NamedCircuit pf_egc(ErrorCase e);
/// Four MZIs: the first pair acts on (0,1),(2,3) and flips polarization, the
/// second pair acts on (0,2),(1,3) through crossings and flips the spatial bit.
NamedCircuit bf_egc(ErrorCase e);
/// The BF EGC mesh with all four MZIs at the balanced point.
NamedCircuit hadamard_circuit(Photon photon);
/// Five-MZI mesh [MZI(0,1), MZI(2,3)] [MZI(1,2)] [MZI(0,1), MZI(2,3)] plus output trims.
NamedCircuit purification_on();
NamedCircuit purification_off();
/// Purification off with the middle MZI crossed: paths 0 (0H) and 2 (1H) are routed
/// to outputs 0 and 1 so the collected pair carries the spatial qubit.
NamedCircuit purification_off_spatial();

/// Purification mesh settings in column order (M0..M4).
std::array<PhaseSetting, 5> purification_mesh_settings(bool on);
NamedCircuit purification_mesh(const std::array<PhaseSetting, 5>& settings,
                               const std::array<double, 4>& output_trims, const std::string& name);

/// Analyzer realized by PhaseShift(0, theta) followed by MZI(0,1) at psi; a click
/// at output port 0 projects onto the returned state (H, V amplitudes).
/// Linear polarizer angle x is (theta = 0, psi = pi - 2x); D/A/L/R use psi = pi/2
/// with theta = 0, pi, pi/2, -pi/2.
Eigen::Vector2cd analyzer_state(const PhaseSetting& setting);
PhaseSetting analyzer_setting_linear(double angle_rad);
/// One of 'H','V','D','A','R','L'.
PhaseSetting analyzer_setting(char label);
NamedCircuit measurement_circuit(const PhaseSetting& setting);

}  // namespace hyperpure

#endif  // HYPERPURE_CIRCUIT_HPP
