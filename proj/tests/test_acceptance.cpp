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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"

#include "hyperpure/analysis.hpp"
#include "hyperpure/circuit.hpp"
#include "hyperpure/counting.hpp"
#include "hyperpure/experiments.hpp"
#include "hyperpure/io.hpp"
#include "hyperpure/noise.hpp"
#include "hyperpure/pll.hpp"
#include "hyperpure/purify.hpp"
#include "hyperpure/qstate.hpp"

using namespace hyperpure;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void info(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string num(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

JointDensityMatrix hyper_rho() { return JointDensityMatrix::from_state(hyper_state()); }
JointDensityMatrix phi_rho() { return JointDensityMatrix::from_state(bell_state(BellKind::phi_plus)); }
double fid_phi(const JointDensityMatrix& r) { return fidelity(r, bell_state(BellKind::phi_plus)); }

Outcome criterion1() {
  Outcome o;
  const double f = theoretical_fidelity_bf(0.8, 0.8);
  o.require(std::abs(f - 16.0 / 17.0) < 1e-12, "F'(0.8,0.8) = 16/17");
  o.require(std::abs((f - 0.8) - 0.14118) < 5e-6, "improvement 0.14118");
  double best = -1, at = 0;
  for (int k = 0; k <= 5000; ++k) {
    const double x = 0.5 + k * 1e-4, g = theoretical_fidelity_bf(x, x) - x;
    if (g > best) best = g, at = x;
  }
  o.require(std::abs(at - 0.75) < 1e-3, "argmax at 0.75");
  o.require(std::abs(theoretical_fidelity_bf(at, at) - 0.9) < 1e-6, "F' = 0.9 at argmax");
  o.info("F'(0.8)=" + num(f, 12) + " gain=" + num(f - 0.8) + " argmax=" + num(at) + " F'(argmax)=" + num(theoretical_fidelity_bf(at, at)));
  return o;
}

Outcome criterion2() {
  Outcome o;
  for (double p : {0.0, 0.1, 0.2, 0.5}) {
    const auto out = purify(apply_channel_mix(hyper_rho(), bf_channel_mix(p)), Collection::first_pair);
    const double f = fid_phi(*out.post_state);
    o.require(std::abs(f - theoretical_fidelity_bf(1 - p, 1 - p)) < 1e-10, "fidelity at p=" + num(p));
    const double yes = (1 - p) * (1 - p) + p * p;
    o.require(std::abs(out.success_probability - 0.5 * yes) < 1e-10, "success at p=" + num(p));
    o.info("p=" + num(p) + ":F'=" + num(f));
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto out = purify_pf(apply_channel_mix(hyper_rho(), pf_channel_mix(0.2)));
  const double f = fid_phi(*out.post_state);
  o.require(std::abs(f - 16.0 / 17.0) < 1e-10, "PF fidelity 16/17");
  const auto bf = purify(apply_channel_mix(hyper_rho(), pf_channel_mix(0.2)));
  o.info("F'=" + num(f, 12) + " (without Hadamards " + num(fid_phi(*bf.post_state)) + ")");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const bool printed[16] = {true,  true,  false, false, true,  true,  false, false,
                            false, false, true,  true,  false, false, true,  true};
  for (double f : {0.25, 0.5, 0.8, 1.0}) {
    const auto rows = syndrome_table(f);
    int yes = 0;
    bool pattern = rows.size() == 16;
    for (std::size_t k = 0; pattern && k < 16; ++k) {
      pattern = rows[k].coincidence == printed[k];
      yes += rows[k].coincidence;
    }
    o.require(pattern && yes == 8, "coincidence column at F=" + num(f));
    const double acc = syndrome_fidelity(rows);
    const double e = 1 - f;
    const double closed = (f * f + e * e / 9) / (f * f + 2 * f * e / 3 + 5 * e * e / 9);
    o.require(std::abs(acc - closed) < 1e-12, "accumulated fidelity at F=" + num(f));
    o.require(std::abs(theoretical_fidelity_werner(f) - closed) < 1e-12, "closed form at F=" + num(f));
    if (f == 0.8) {
      o.require(std::abs(acc - 0.83816) < 1e-5, "F=0.8 gives 0.83816");
      o.info("F=0.8 -> " + num(acc, 10));
    }
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  const double s_phi = chsh_S(phi_rho()).S;
  const double s_mix = chsh_S(JointDensityMatrix::maximally_mixed(2, 2)).S;
  o.require(std::abs(s_phi - 2 * std::sqrt(2.0)) < 1e-9, "S(Phi+) = 2 sqrt 2");
  o.require(std::abs(s_mix) < 1e-12, "S(mixed) = 0");

  const auto noisy = apply_channel_mix(hyper_rho(), bf_channel_mix(0.2));
  const auto pre = partial_trace(noisy, Dof::polarization);
  const auto post = *purify(noisy).post_state;
  const double w = white_noise_for_fidelity(0.912);
  const double pre_cal = chsh_S(apply_white_noise(pre, w)).S;
  const double post_cal = chsh_S(apply_white_noise(post, w)).S;
  const double post_ideal = chsh_S(post).S;
  o.require(pre_cal < 2.0 && post_cal > 2.0, "sign of S-2 flips (calibrated pipeline)");
  o.require(post_ideal > 2.6, "ideal purified S > 2.6");
  o.info("calibrated " + num(pre_cal, 4) + " -> " + num(post_cal, 4) + ", ideal " + num(chsh_S(pre).S, 4) +
         " -> " + num(post_ideal, 4));
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(606);
  double worst = 1.0;
  for (int t = 0; t < 200; ++t) {
    const JointDensityMatrix rho(oracle::random_density(4, rng, 1 + t % 4), 2, 2);
    worst = std::min(worst, fidelity(qst_reconstruct(expected_table(rho, 1e12)), rho));
  }
  o.require(worst >= 1 - 1e-6, "analytic round trip");
  const auto model = DetectionModel::ideal();
  const auto setup = CountingSetup::polarization(phi_rho());
  const double duration = 1e6 / model.rep_rate;
  const auto& basis = TomographyBasisSet::standard();
  const auto a = simulate_counts(setup, basis, model, duration, 2024);
  const auto b = simulate_counts(setup, basis, model, duration, 2024);
  const double f = fid_phi(qst_reconstruct(a));
  o.require(f >= 0.99, "Monte-Carlo fidelity >= 0.99");
  o.require(coincidence_csv(a) == coincidence_csv(b), "seed-deterministic counts");
  o.info("worst analytic " + num(worst, 10) + ", Monte-Carlo " + num(f));
  return o;
}

Outcome criterion7() {
  Outcome o;
  const double w = white_noise_for_fidelity(0.912);
  const auto noisy = apply_channel_mix(hyper_rho(), bf_channel_mix(0.2));
  const double base = fid_phi(apply_white_noise(partial_trace(hyper_rho(), Dof::polarization), w));
  const double pre = fid_phi(apply_white_noise(partial_trace(noisy, Dof::polarization), w));
  const double post = fid_phi(apply_white_noise(*purify(noisy).post_state, w));
  o.require(std::abs(base - 0.912) < 1e-12, "baseline tuned to 0.912");
  o.require(std::abs(pre - 0.737) <= 0.03, "before within 0.03 of 0.737");
  o.require(std::abs(post - 0.848) <= 0.03, "after within 0.03 of 0.848");
  const auto rep = run_experiment(ExperimentConfig::parse_text(
      R"({"experiment":"bf_purify","parameters":{"p":0.2,"baseline_fidelity":0.912}})"));
  const std::string label = rep.report["results"]["calibrated"]["label"].get<std::string>();
  o.require(label.find("calibrated consistency check") != std::string::npos, "report labels the check");
  o.info("calibrated consistency check: " + num(pre, 4) + " -> " + num(post, 4));
  return o;
}

Outcome criterion8() {
  Outcome o;
  o.require(purity_from_g2(1.77).purity == 0.77, "P(1.77) = 0.77");
  const auto ms = DetectionModel::measured_setup();
  const double a = 1 - std::sqrt(ms.signal_detection() * ms.idler_detection());
  double worst = 0;
  for (double xi : {0.01, 0.1, 0.3}) worst = std::max(worst, std::abs(xi_from_car(car_from_model(ms, xi), a) - xi));
  o.require(worst < 1e-9, "CAR round trip");
  const auto rep = run_experiment(ExperimentConfig::parse_text(R"({"experiment":"source_metrics"})"));
  bool note = false;
  for (const auto& n : rep.report["notes"]) {
    const std::string s = n.get<std::string>();
    note = note || (s.find("0.1345") != std::string::npos && s.find("0.02") != std::string::npos);
  }
  o.require(note, "discrepancy note in report");
  o.info("xi(56.3) = " + num(xi_from_car(56.3, 1.0), 4) + ", round-trip error " + num(worst, 3));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto one = run_lock(PllConfig::reference(), 3600.0, 1);
  const double hour_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(hour_s < 30.0, "one simulated hour under 30 s");
  const auto locked = run_battery(PllConfig::reference(), 3600.0, 1, 20);
  const auto open = run_battery(PllConfig::open_loop(), 3600.0, 1, 20);
  double worst_locked = 0, best_open = 1e300;
  for (const auto& r : locked) worst_locked = std::max(worst_locked, r.relative_power_std);
  for (const auto& r : open) best_open = std::min(best_open, r.relative_power_std);
  o.require(worst_locked <= 0.05, "locked std <= 5% for all seeds");
  o.require(best_open >= 4 * worst_locked, "open-loop std >= 4x locked");
  const auto again = run_lock(PllConfig::reference(), 3600.0, 1);
  o.require(pll_trace_csv(one.trace) == pll_trace_csv(again.trace), "identical traces for identical seeds");
  o.info("worst locked " + num(worst_locked, 4) + ", best open " + num(best_open, 4) + ", one hour " +
         num(hour_s, 3) + " s");
  return o;
}

Outcome criterion10() {
  Outcome o;
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double tsirelson = 2 * std::sqrt(2.0);
  bool unitary = true, trace = true, tsir = true, mono = true, algebra = true, channels = true, sym = true;
  for (int t = 0; t < 200; ++t) {
    const Matrix us = oracle::random_unitary(4, rng), ui = oracle::random_unitary(4, rng);
    const JointDensityMatrix rho(oracle::random_density(16, rng, 1 + t % 16), 4, 4);
    const auto out = apply_unitary(rho, us, ui);
    trace = trace && std::abs(out.trace() - 1) < 1e-12;
    const JointState psi = apply_unitary(hyper_state(), us, ui);
    trace = trace && std::abs(psi.squared_norm() - 1) < 1e-12;

    const JointDensityMatrix r4(oracle::random_density(4, rng, 1 + t % 4), 2, 2);
    const JointDensityMatrix s4(oracle::random_density(4, rng), 2, 2);
    tsir = tsir && std::abs(chsh_S(r4).S) <= tsirelson + 1e-9;
    const double f1 = fidelity(r4, s4), f2 = fidelity(s4, r4);
    sym = sym && std::abs(f1 - f2) < 1e-9 && f1 >= -1e-12 && f1 <= 1 + 1e-12;

    const double a = 0.5 + 0.5 * u(rng), b = 0.5 + 0.5 * u(rng);
    mono = mono && (a == 0.5 || b == 0.5 || theoretical_fidelity_bf(a, b) > std::min(a, b));

    const double p = u(rng);
    for (const auto& mix : {bf_channel_mix(p), pf_channel_mix(p)}) {
      const auto y = apply_channel_mix(rho, mix);
      Eigen::SelfAdjointEigenSolver<Matrix> es(y.matrix());
      channels = channels && std::abs(y.trace() - 1) < 1e-10 && es.eigenvalues().minCoeff() > -1e-10;
    }
  }
  for (ErrorCase e : {ErrorCase::none, ErrorCase::polarization, ErrorCase::spatial, ErrorCase::both}) {
    unitary = unitary && is_unitary(compile(bf_egc(e))) && is_unitary(compile(pf_egc(e)));
    const Matrix4 m = compile(bf_egc(e));
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        const double x = std::abs(m(r, c));
        algebra = algebra && (x < 1e-12 || std::abs(x - 1) < 1e-12);
      }
  }
  for (const auto& c : {purification_on(), purification_off(), purification_off_spatial(),
                        hadamard_circuit(Photon::signal), hadamard_circuit(Photon::idler)})
    unitary = unitary && is_unitary(compile(c));
  const Matrix4 h = hadamard_layer(), perm = purification_permutation();
  algebra = algebra && (h * h - Matrix4::Identity()).norm() < 1e-12;
  algebra = algebra && (compile(purification_on()) - perm).norm() < 1e-12;
  algebra = algebra && (perm * perm * perm - Matrix4::Identity()).norm() < 1e-12;
  o.require(unitary, "compiled circuits unitary");
  o.require(trace, "trace and norm preservation");
  o.require(tsir, "Tsirelson bound");
  o.require(mono, "purification improves F > 0.5");
  o.require(algebra, "permutation and Hadamard algebra");
  o.require(channels, "channels trace preserving and positive");
  o.require(sym, "fidelity symmetric and bounded");
  if (o.pass) o.info("200 random trials per property");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<double, std::function<Outcome()>>> criteria = {
      {1, criterion1}, {1, criterion2}, {1, criterion3}, {1, criterion4},  {1, criterion5},
      {60, criterion6}, {10, criterion7}, {1, criterion8}, {600, criterion9}, {120, criterion10}};
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < criteria[k].first, "runtime budget " + num(criteria[k].first) + " s");
    failed += !o.pass;
    std::printf("criterion %zu: %s (%.3f s) %s\n", k + 1, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
  }
  return failed == 0 ? 0 : 1;
}
