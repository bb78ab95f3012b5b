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

#include "hyperpure/noise.hpp"

#include <cmath>

namespace hyperpure {

std::string to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::none: return "none";
    case ErrorKind::bf_pol: return "bf_pol";
    case ErrorKind::bf_spa: return "bf_spa";
    case ErrorKind::bf_both: return "bf_both";
    case ErrorKind::pf_pol: return "pf_pol";
    case ErrorKind::pf_spa: return "pf_spa";
    case ErrorKind::pf_both: return "pf_both";
  }
  throw std::invalid_argument("unknown error kind");
}

ErrorKind error_kind_from_string(const std::string& s) {
  for (ErrorKind k : {ErrorKind::none, ErrorKind::bf_pol, ErrorKind::bf_spa, ErrorKind::bf_both,
                      ErrorKind::pf_pol, ErrorKind::pf_spa, ErrorKind::pf_both})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown error kind '" + s + "'");
}

Matrix4 error_unitary(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::none: return Matrix4::Identity();
    case ErrorKind::bf_pol: return compile(bf_egc(ErrorCase::polarization));
    case ErrorKind::bf_spa: return compile(bf_egc(ErrorCase::spatial));
    case ErrorKind::bf_both: return compile(bf_egc(ErrorCase::both));
    case ErrorKind::pf_pol: return compile(pf_egc(ErrorCase::polarization));
    case ErrorKind::pf_spa: return compile(pf_egc(ErrorCase::spatial));
    case ErrorKind::pf_both: return compile(pf_egc(ErrorCase::both));
  }
  throw std::invalid_argument("unknown error kind");
}

ChannelMix::ChannelMix(std::vector<ChannelBranch> branches) : branches_(std::move(branches)) {
  if (branches_.empty()) throw std::invalid_argument("ChannelMix: no branches");
  double total = 0.0;
  for (const auto& b : branches_) {
    if (!(b.probability >= 0.0 && b.probability <= 1.0))
      throw std::invalid_argument("ChannelMix: branch probability outside [0,1]");
    if (!is_unitary(b.idler) || !is_unitary(b.signal))
      throw std::invalid_argument("ChannelMix: branch operator is not unitary");
    total += b.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("ChannelMix: probabilities do not sum to 1");
}

ChannelMix ChannelMix::identity() { return ChannelMix({ChannelBranch{1.0, ErrorKind::none}}); }

ChannelMix ChannelMix::from_kinds(const std::vector<std::pair<double, ErrorKind>>& weights) {
  std::vector<ChannelBranch> branches;
  for (const auto& [p, kind] : weights) {
    if (p == 0.0) continue;
    branches.push_back({p, kind, error_unitary(kind), Matrix4::Identity()});
  }
  return ChannelMix(std::move(branches));
}

namespace {

void check_rate(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("flip probability must be in [0,1]");
}

}  // namespace

ChannelMix bf_channel_mix(double p) {
  check_rate(p);
  const double q = 1.0 - p;
  return ChannelMix::from_kinds({{q * q, ErrorKind::none},
                                 {p * q, ErrorKind::bf_pol},
                                 {p * q, ErrorKind::bf_spa},
                                 {p * p, ErrorKind::bf_both}});
}

ChannelMix pf_channel_mix(double p) {
  check_rate(p);
  const double q = 1.0 - p;
  return ChannelMix::from_kinds({{q * q, ErrorKind::none},
                                 {p * q, ErrorKind::pf_pol},
                                 {p * q, ErrorKind::pf_spa},
                                 {p * p, ErrorKind::pf_both}});
}

JointDensityMatrix apply_channel_mix(const JointDensityMatrix& rho, const ChannelMix& mix) {
  if (rho.signal_dim() != 4 || rho.idler_dim() != 4)
    throw std::invalid_argument("apply_channel_mix: expects a 16-dim state");
  Matrix out = Matrix::Zero(16, 16);
  for (const auto& b : mix.branches()) {
    const Matrix u = kron(b.signal, b.idler);
    out += b.probability * (u * rho.matrix() * u.adjoint());
  }
  return {out, 4, 4, JointDensityMatrix::Unchecked{}};
}

std::size_t sample_branch(const ChannelMix& mix, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = u(rng);
  const auto& b = mix.branches();
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    if (x < b[k].probability) return k;
    x -= b[k].probability;
  }
  return b.size() - 1;
}

WernerParam::WernerParam(double fidelity) : f_(fidelity) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) throw std::invalid_argument("Werner F must be in [0,1]");
}

JointDensityMatrix werner_state(WernerParam param) {
  const double f = param.fidelity();
  Matrix out = Matrix::Zero(4, 4);
  for (BellKind k : kAllBellKinds) {
    const Vector v = bell_state(k).amplitudes();
    out += (k == BellKind::phi_plus ? f : (1.0 - f) / 3.0) * (v * v.adjoint());
  }
  return {out, 2, 2, JointDensityMatrix::Unchecked{}};
}

JointDensityMatrix apply_white_noise(const JointDensityMatrix& rho, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw std::invalid_argument("white-noise weight must be in [0,1]");
  const int d = rho.dim();
  Matrix out = (1.0 - weight) * rho.matrix() + (weight / d) * Matrix::Identity(d, d);
  return {out, rho.signal_dim(), rho.idler_dim(), JointDensityMatrix::Unchecked{}};
}

double white_noise_for_fidelity(double f0) {
  if (!(f0 >= 0.25 && f0 <= 1.0)) throw std::invalid_argument("baseline fidelity must be in [0.25,1]");
  return 4.0 * (1.0 - f0) / 3.0;
}

}  // namespace hyperpure
