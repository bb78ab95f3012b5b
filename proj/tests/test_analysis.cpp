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

#include "doctest.h"
#include "oracles.hpp"

#include "hyperpure/analysis.hpp"
#include "hyperpure/noise.hpp"
#include "hyperpure/purify.hpp"

using namespace hyperpure;

namespace {

JointDensityMatrix dm4(const oracle::Mat& m) { return {m, 2, 2}; }

oracle::Vec pol(char c) {
  const double r = 1.0 / std::sqrt(2.0);
  oracle::Vec v(2);
  switch (c) {
    case 'H': v << 1, 0; break;
    case 'V': v << 0, 1; break;
    case 'D': v << r, r; break;
    case 'A': v << r, -r; break;
    case 'R': v << r, oracle::C(0, -r); break;
    default: v << r, oracle::C(0, r); break;
  }
  return v;
}

double min_eigen(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvalues().minCoeff();
}

// Tr(rho sigma(a) (x) sigma(b)) with sigma(x) = |x><x| - |x+90><x+90|.
double oracle_E(const oracle::Mat& rho, double a_deg, double b_deg) {
  auto sigma = [](double deg) {
    const double t = deg * oracle::kPi / 180;
    oracle::Vec u(2), w(2);
    u << std::cos(t), std::sin(t);
    w << -std::sin(t), std::cos(t);
    return oracle::Mat(u * u.adjoint() - w * w.adjoint());
  };
  oracle::Mat s = sigma(a_deg), t = sigma(b_deg), obs(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) obs.block(2 * i, 2 * j, 2, 2) = s(i, j) * t;
  return (rho * obs).trace().real();
}

}  // namespace

TEST_CASE("standard basis set is tomographically complete") {
  const auto& b = TomographyBasisSet::standard();
  const std::array<std::string, 16> james = {"HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
                                             "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL"};
  CHECK(b.labels() == james);
  CHECK(std::isfinite(b.condition_number()));
  CHECK(b.condition_number() < 100.0);

  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const oracle::Mat rho = oracle::random_density(4, rng);
    oracle::Mat sum = oracle::Mat::Zero(4, 4);
    for (int nu = 0; nu < 16; ++nu) {
      const oracle::Vec s = pol(james[nu][0]), i = pol(james[nu][1]);
      oracle::Vec v(4);
      v << s(0) * i(0), s(0) * i(1), s(1) * i(0), s(1) * i(1);
      CHECK((b.state(nu) - v).norm() < 1e-15);
      sum += b.dual(nu) * (v.adjoint() * rho * v)(0).real();
    }
    CHECK((sum - rho).norm() < 1e-12);
  }

  // A set that misses the circular states cannot see Im(rho).
  CHECK_THROWS_AS(TomographyBasisSet({"HH", "HV", "VV", "VH", "DH", "DV", "DD", "DA", "AH", "AV", "AD", "AA",
                                      "HD", "HA", "VD", "VA"}),
                  NumericalError);
  CHECK_THROWS_AS(TomographyBasisSet({"HH", "HV", "DD", "VH", "RH", "RV", "DV", "DH", "DR", "DD", "RD", "HD",
                                      "VD", "VL", "HL", "RL"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(polarization_state('Q'), std::invalid_argument);
}

TEST_CASE("reconstruction examples") {
  const auto phi = JointDensityMatrix::from_state(bell_state(BellKind::phi_plus));
  const auto t = expected_table(phi, 1e6);
  CHECK(fidelity(qst_reconstruct(t), phi) >= 0.9999);

  const auto mixed = JointDensityMatrix::maximally_mixed(2, 2);
  const auto tm = expected_table(mixed, 4e4);
  for (auto c : tm.counts) CHECK(c == 10000);
  CHECK((qst_reconstruct(tm).matrix() - oracle::Mat::Identity(4, 4) / 4.0).norm() < 1e-12);

  auto bumped = t;
  bumped.counts[7] += 1;
  const auto r = qst_reconstruct(bumped);
  CHECK(r.trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(min_eigen(r.matrix()) > -1e-12);

  auto zero = CoincidenceTable::for_basis(TomographyBasisSet::standard());
  zero.counts[5] = 10;
  CHECK_THROWS_AS(qst_reconstruct(zero), NumericalError);
  CoincidenceTable wrong = t;
  wrong.labels[0] = "VV";
  CHECK_THROWS_AS(qst_reconstruct(wrong), std::invalid_argument);
}

TEST_CASE("round trip over random states") {
  std::mt19937_64 rng(77);
  std::poisson_distribution<int> dummy(1.0);
  for (int t = 0; t < 200; ++t) {
    const int rank = 1 + t % 4;
    const auto rho = dm4(oracle::random_density(4, rng, rank));
    const auto rec = qst_reconstruct(expected_table(rho, 1e12));
    CHECK(fidelity(rec, rho) >= 1 - 1e-6);
    CHECK(rec.trace() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(min_eigen(rec.matrix()) >= -1e-8);
  }

  // Noisy counts still give a physical state.
  std::mt19937_64 noise(5);
  for (int t = 0; t < 50; ++t) {
    const auto rho = dm4(oracle::random_density(4, rng, 1));
    auto table = expected_table(rho, 200);
    for (auto& c : table.counts) c = std::poisson_distribution<long long>(static_cast<double>(c) + 0.5)(noise);
    table.counts[0] += 1;
    const auto rec = qst_reconstruct(table);
    CHECK(rec.trace() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(min_eigen(rec.matrix()) >= -1e-8);
  }
}

TEST_CASE("bootstrap fidelity error") {
  const auto phi = JointDensityMatrix::from_state(bell_state(BellKind::phi_plus));
  const auto exact = fidelity_with_error(expected_table(phi, 1e13), phi, 200, 3);
  CHECK(exact.point == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(exact.std < 1e-5);

  Rng rng(99);
  auto table = expected_table(phi, 1e4);
  for (auto& c : table.counts)
    if (c > 0) c = std::poisson_distribution<long long>(static_cast<double>(c))(rng);
  const auto est = fidelity_with_error(table, phi, 400, 7);
  CHECK(est.std > 0.0);
  CHECK(est.std < 0.02);
  const auto serial = fidelity_with_error(table, phi, 400, 7, Execution::serial);
  CHECK(serial.fidelity == est.fidelity);
  CHECK(serial.std == est.std);
  CHECK_THROWS_AS(fidelity_with_error(table, phi, 50, 7), std::invalid_argument);

  // Scaling on a full-rank state against a different target, so the fidelity is
  // linear in the count fluctuations (at rho == target it is quadratic instead).
  const auto w = werner_state(WernerParam(0.9));
  std::vector<double> stds;
  for (double n : {1e3, 1e5, 1e7}) stds.push_back(fidelity_with_error(expected_table(w, n), phi, 400, 11).std);
  CHECK(stds[0] / stds[1] == doctest::Approx(10.0).epsilon(0.3));
  CHECK(stds[1] / stds[2] == doctest::Approx(10.0).epsilon(0.3));
}

TEST_CASE("correlation and CHSH from density matrices") {
  const auto phi = JointDensityMatrix::from_state(bell_state(BellKind::phi_plus));
  CHECK(correlation_E(phi, 30.0, 30.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(correlation_E(phi, 0.0, 45.0)) < 1e-12);
  const auto w = werner_state(WernerParam(0.8));
  CHECK(correlation_E(w, 0.0, 22.5) == doctest::Approx(oracle_E(w.matrix(), 0.0, 22.5)).epsilon(1e-12));
  CHECK(correlation_E(w, 0.0, 22.5) == doctest::Approx(oracle::werner_correlation(0.8, 0.0, 22.5)).epsilon(1e-12));

  const auto s = chsh_S(phi);
  CHECK(std::abs(s.S - 2 * std::sqrt(2.0)) < 1e-9);
  CHECK(std::abs(chsh_S(JointDensityMatrix::maximally_mixed(2, 2)).S) < 1e-12);

  const auto h = JointDensityMatrix::from_state(hyper_state());
  const auto noisy = apply_channel_mix(h, bf_channel_mix(0.2));
  const double pre = chsh_S(partial_trace(noisy, Dof::polarization)).S;
  const double post = chsh_S(*purify(noisy).post_state).S;
  // The flip admixture is Psi+, which contributes nothing at the default angles.
  CHECK(pre == doctest::Approx(0.8 * 2 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(post > pre);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ang(-180.0, 180.0);
  for (int t = 0; t < 500; ++t) {
    const auto rho = dm4(oracle::random_density(4, rng, 1 + t % 4));
    const double a = ang(rng), b = ang(rng);
    const double e = correlation_E(rho, a, b);
    CHECK(std::abs(e) <= 1.0 + 1e-12);
    CHECK(e == doctest::Approx(oracle_E(rho.matrix(), a, b)).epsilon(1e-10));
    CHECK(std::abs(chsh_S(rho).S) <= 2 * std::sqrt(2.0) + 1e-9);
  }
  double last = -10.0;
  for (int k = 0; k <= 750; ++k) {
    const double f = 0.25 + k * 1e-3;
    const double v = chsh_S(werner_state(WernerParam(f))).S;
    CHECK(v > last);
    last = v;
  }
  CHECK_THROWS_AS(correlation_E(JointDensityMatrix::maximally_mixed(4, 4), 0, 0), std::invalid_argument);
}

TEST_CASE("correlation and CHSH from counts") {
  CorrelationCounts cc{40, 10, 10, 40};
  CHECK(correlation_E(cc) == doctest::Approx(0.6));
  CHECK_THROWS_AS(correlation_E(CorrelationCounts{}), NumericalError);

  // Counts following the Werner correlation reproduce its S.
  const double f = 0.9;
  const ChshSettings s;
  const auto pairs = chsh_angle_pairs(s);
  CHECK(pairs[0] == std::pair{0.0, 22.5});
  CHECK(pairs[1] == std::pair{0.0, 112.5});
  CHECK(pairs[6] == std::pair{90.0, 67.5});
  CHECK(pairs[15] == std::pair{135.0, 157.5});
  ChshCounts counts;
  for (int k = 0; k < 4; ++k) {
    const auto [a, b] = pairs[4 * k];
    const double e = oracle::werner_correlation(f, a, b);
    const double n = 1e8;
    const auto same = static_cast<uint64_t>(std::llround(n * (1 + e) / 4));
    const auto diff = static_cast<uint64_t>(std::llround(n * (1 - e) / 4));
    counts.terms[k] = {same, diff, diff, same};
  }
  const auto r = chsh_S(counts, s);
  CHECK(r.S == doctest::Approx(2 * std::sqrt(2.0) * (4 * f - 1) / 3).epsilon(1e-7));
  CHECK(r.E[1] < 0.0);
}
