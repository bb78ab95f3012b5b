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

#include "hyperpure/circuit.hpp"

#include <cmath>

namespace hyperpure {

namespace {

double wrap_2pi(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("PhaseSetting: phase must be finite");
  double r = std::fmod(x, 2 * kPi);
  if (r < 0) r += 2 * kPi;
  return r;
}

const Complex kI{0.0, 1.0};

}  // namespace

PhaseSetting::PhaseSetting(double theta, double psi) : theta_(wrap_2pi(theta)), psi_(wrap_2pi(psi)) {}

Matrix2 mzi_unitary(const PhaseSetting& setting) {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix2 coupler;
  coupler << r, kI * r, kI * r, r;
  Matrix2 inner = Matrix2::Identity();
  inner(0, 0) = std::polar(1.0, setting.psi());
  Matrix2 outer = Matrix2::Identity();
  outer(0, 0) = std::polar(1.0, setting.theta());
  return outer * coupler * inner * coupler;
}

CircuitElement CircuitElement::mzi(int upper, int lower, const PhaseSetting& s) {
  return {ElementKind::mzi, {upper, lower}, s.theta(), s.psi()};
}

CircuitElement CircuitElement::crossing(int a, int b) { return {ElementKind::crossing, {a, b}, 0.0, 0.0}; }

CircuitElement CircuitElement::phase_shift(int port, double phase) {
  return {ElementKind::phase_shift, {port, port}, phase, 0.0};
}

std::string to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::mzi: return "mzi";
    case ElementKind::crossing: return "crossing";
    case ElementKind::phase_shift: return "phase_shift";
    case ElementKind::identity: return "identity";
  }
  throw std::invalid_argument("unknown element kind");
}

ElementKind element_kind_from_string(const std::string& s) {
  if (s == "mzi") return ElementKind::mzi;
  if (s == "crossing") return ElementKind::crossing;
  if (s == "phase_shift") return ElementKind::phase_shift;
  if (s == "identity") return ElementKind::identity;
  throw std::invalid_argument("unknown element kind '" + s + "'");
}

std::string to_string(ErrorCase e) {
  switch (e) {
    case ErrorCase::none: return "none";
    case ErrorCase::polarization: return "pol";
    case ErrorCase::spatial: return "spa";
    case ErrorCase::both: return "both";
  }
  throw std::invalid_argument("unknown error case");
}

namespace {

void check_port(int p) {
  if (p < 0 || p > 3) throw std::invalid_argument("circuit element port out of range [0,3]");
}

void check_pair(const std::array<int, 2>& ports) {
  check_port(ports[0]);
  check_port(ports[1]);
  if (ports[0] == ports[1]) throw std::invalid_argument("circuit element ports must be distinct");
}

Matrix4 element_unitary(const CircuitElement& e) {
  Matrix4 u = Matrix4::Identity();
  switch (e.kind) {
    case ElementKind::identity: break;
    case ElementKind::phase_shift:
      check_port(e.ports[0]);
      if (!std::isfinite(e.theta)) throw std::invalid_argument("phase shift must be finite");
      u(e.ports[0], e.ports[0]) = std::polar(1.0, e.theta);
      break;
    case ElementKind::crossing: {
      check_pair(e.ports);
      const int a = e.ports[0], b = e.ports[1];
      u(a, a) = 0;
      u(b, b) = 0;
      u(a, b) = 1;
      u(b, a) = 1;
      break;
    }
    case ElementKind::mzi: {
      check_pair(e.ports);
      const Matrix2 m = mzi_unitary(PhaseSetting(e.theta, e.psi));
      const int a = e.ports[0], b = e.ports[1];
      u(a, a) = m(0, 0);
      u(a, b) = m(0, 1);
      u(b, a) = m(1, 0);
      u(b, b) = m(1, 1);
      break;
    }
  }
  return u;
}

}  // namespace

Matrix4 compile(const NamedCircuit& circuit) {
  Matrix4 u = Matrix4::Identity();
  for (const auto& e : circuit.elements) u = element_unitary(e) * u;
  return u;
}

GcRelabelMap gc_relabel_map() { return {}; }

Matrix4 purification_permutation() {
  Matrix4 p = Matrix4::Zero();
  p(1, 0) = 1;
  p(3, 1) = 1;
  p(2, 2) = 1;
  p(0, 3) = 1;
  return p;
}

Matrix4 hadamard_layer() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix4 first = Matrix4::Zero();
  Matrix4 second = Matrix4::Zero();
  for (int base : {0, 2}) {  // (0,1), (2,3)
    first(base, base) = r;
    first(base, base + 1) = r;
    first(base + 1, base) = r;
    first(base + 1, base + 1) = -r;
  }
  for (int base : {0, 1}) {  // (0,2), (1,3)
    second(base, base) = r;
    second(base, base + 2) = r;
    second(base + 2, base) = r;
    second(base + 2, base + 2) = -r;
  }
  return second * first;
}

NamedCircuit pf_egc(ErrorCase e) {
  std::array<double, 4> phase{0, 0, 0, 0};
  switch (e) {
    case ErrorCase::none: break;
    case ErrorCase::polarization: phase = {0, kPi, 0, kPi}; break;
    case ErrorCase::spatial: phase = {0, 0, kPi, kPi}; break;
    case ErrorCase::both: phase = {0, kPi, kPi, 0}; break;
  }
  NamedCircuit c{"pf_egc_" + to_string(e), {}};
  for (int p = 0; p < 4; ++p) c.elements.push_back(CircuitElement::phase_shift(p, phase[p]));
  return c;
}

namespace {

NamedCircuit four_mzi_block(const std::string& name, const PhaseSetting& first,
                            const PhaseSetting& second) {
  return {name,
          {CircuitElement::mzi(0, 1, first), CircuitElement::mzi(2, 3, first),
           CircuitElement::crossing(1, 2), CircuitElement::mzi(0, 1, second),
           CircuitElement::mzi(2, 3, second), CircuitElement::crossing(1, 2)}};
}

}  // namespace

NamedCircuit bf_egc(ErrorCase e) {
  const bool pol = e == ErrorCase::polarization || e == ErrorCase::both;
  const bool spa = e == ErrorCase::spatial || e == ErrorCase::both;
  return four_mzi_block("bf_egc_" + to_string(e), pol ? PhaseSetting::cross() : PhaseSetting::bar(),
                        spa ? PhaseSetting::cross() : PhaseSetting::bar());
}

NamedCircuit hadamard_circuit(Photon photon) {
  return four_mzi_block(photon == Photon::signal ? "hadamard_signal" : "hadamard_idler",
                        PhaseSetting::balanced(), PhaseSetting::balanced());
}

std::array<PhaseSetting, 5> purification_mesh_settings(bool on) {
  if (!on) return {PhaseSetting::bar(), PhaseSetting::bar(), PhaseSetting::bar(), PhaseSetting::bar(),
                   PhaseSetting::bar()};
  return {PhaseSetting::bar(), PhaseSetting::cross(), PhaseSetting::cross(), PhaseSetting::cross(),
          PhaseSetting::cross()};
}

NamedCircuit purification_mesh(const std::array<PhaseSetting, 5>& s,
                               const std::array<double, 4>& output_trims, const std::string& name) {
  NamedCircuit c{name,
                 {CircuitElement::mzi(0, 1, s[0]), CircuitElement::mzi(2, 3, s[1]),
                  CircuitElement::mzi(1, 2, s[2]), CircuitElement::mzi(0, 1, s[3]),
                  CircuitElement::mzi(2, 3, s[4])}};
  for (int p = 0; p < 4; ++p)
    if (output_trims[p] != 0.0) c.elements.push_back(CircuitElement::phase_shift(p, output_trims[p]));
  return c;
}

NamedCircuit purification_on() {
  // Each cross contributes a factor i. Paths 3->0, 0->1, 1->3, 2->2 see 3, 1, 2, 2
  // crosses; the trims make every transfer amplitude real and positive.
  return purification_mesh(purification_mesh_settings(true), {kPi / 2, -kPi / 2, kPi, kPi},
                           "purification_on");
}

NamedCircuit purification_off() {
  return purification_mesh(purification_mesh_settings(false), {0, 0, 0, 0}, "purification_off");
}

NamedCircuit purification_off_spatial() {
  auto s = purification_mesh_settings(false);
  s[2] = PhaseSetting::cross();
  return purification_mesh(s, {0, -kPi / 2, -kPi / 2, 0}, "purification_off_spatial");
}

Eigen::Vector2cd analyzer_state(const PhaseSetting& setting) {
  const Matrix2 u = mzi_unitary(PhaseSetting(0.0, setting.psi()));
  Eigen::RowVector2cd row = u.row(0);
  row(0) *= std::polar(1.0, setting.theta());
  Eigen::Vector2cd a = row.adjoint();
  a.normalize();
  // Fix the global phase: first nonzero component real and positive.
  const Complex lead = std::abs(a(0)) > 1e-12 ? a(0) : a(1);
  a *= std::conj(lead) / std::abs(lead);
  return a;
}

PhaseSetting analyzer_setting_linear(double angle_rad) { return {0.0, kPi - 2.0 * angle_rad}; }

PhaseSetting analyzer_setting(char label) {
  switch (label) {
    case 'H': return {0.0, kPi};
    case 'V': return {0.0, 0.0};
    case 'D': return {0.0, kPi / 2};
    case 'A': return {kPi, kPi / 2};
    case 'L': return {kPi / 2, kPi / 2};
    case 'R': return {-kPi / 2, kPi / 2};
    default: throw std::invalid_argument(std::string("unknown analyzer label '") + label + "'");
  }
}

NamedCircuit measurement_circuit(const PhaseSetting& setting) {
  return {"measurement",
          {CircuitElement::phase_shift(0, setting.theta()),
           CircuitElement::mzi(0, 1, PhaseSetting(0.0, setting.psi()))}};
}

}  // namespace hyperpure
