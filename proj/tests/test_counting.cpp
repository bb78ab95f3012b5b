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
#include "hyperpure/circuit.hpp"
#include "hyperpure/counting.hpp"
#include "hyperpure/noise.hpp"

using namespace hyperpure;

namespace {

JointDensityMatrix phi_plus() { return JointDensityMatrix::from_state(bell_state(BellKind::phi_plus)); }

// <b|rho|b> for the standard labels, with the polarization vectors written out here.
std::array<double, 16> born(const TomographyBasisSet& basis, const oracle::Mat& rho) {
  const double r = 1.0 / std::sqrt(2.0);
  auto pol = [r](char c) {
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
  };
  std::array<double, 16> p{};
  for (int nu = 0; nu < 16; ++nu) {
    const oracle::Vec s = pol(basis.labels()[nu][0]), i = pol(basis.labels()[nu][1]);
    oracle::Vec v(4);
    v << s(0) * i(0), s(0) * i(1), s(1) * i(0), s(1) * i(1);
    p[nu] = (v.adjoint() * rho * v)(0).real();
  }
  return p;
}

double thermal_car(double eta_s, double eta_i, double xi, double pd) {
  const double x = xi * xi;
  auto g = [x](double z) { return oracle::thermal_generating(z, x); };
  const double ns = g(1 - eta_s) * (1 - pd), ni = g(1 - eta_i) * (1 - pd);
  const double none = g((1 - eta_s) * (1 - eta_i)) * (1 - pd) * (1 - pd);
  const double both = 1 - ns - ni + none;
  return both / ((1 - ns) * (1 - ni));
}

}  // namespace

TEST_CASE("dB conversion") {
  CHECK(db_to_linear(0.0) == 1.0);
  CHECK(db_to_linear(3.0103) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(db_to_linear(5.3) == doctest::Approx(0.2951).epsilon(1e-4));
  CHECK_THROWS_AS(db_to_linear(-1.0), std::invalid_argument);
}

TEST_CASE("detection model validation and presets") {
  DetectionModel m = DetectionModel::ideal();
  CHECK_NOTHROW(m.validate());
  CHECK(m.mean_pairs_per_pulse() == 1.0);
  m.coincidence_window = 1.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = DetectionModel::ideal();
  m.signal_efficiency = 1.2;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = DetectionModel::ideal();
  m.dark_rate = -1;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  const auto ms = DetectionModel::measured_setup();
  CHECK(ms.signal_detection() == doctest::Approx(db_to_linear(24.8)).epsilon(1e-12));
  CHECK(ms.idler_detection() == doctest::Approx(db_to_linear(47.0)).epsilon(1e-12));
  CHECK(raw_coincidence_rate(ms) == doctest::Approx(10.38).epsilon(1e-12));
  CHECK(ms.dark_probability() == doctest::Approx(200 * 50e-12).epsilon(1e-6));
  CHECK(signal_singles_rate(ms) > raw_coincidence_rate(ms));
  SourceParams sp{0.5, 0.9};
  CHECK_THROWS_AS(sp.validate(), std::invalid_argument);
}

TEST_CASE("expected counts follow the Born rule and scale with duration") {
  const auto& basis = TomographyBasisSet::standard();
  const auto setup = CountingSetup::polarization(phi_plus());
  const auto model = DetectionModel::ideal();
  const double duration = 1e-6;
  const double pairs = duration * model.pair_rate;
  for (auto scheme : {DetectorScheme::four_detector, DetectorScheme::two_detector}) {
    const auto e = expected_counts(setup, basis, model, duration, scheme);
    CHECK(e[0] == doctest::Approx(pairs * 0.5).epsilon(1e-12));
    const auto p = born(basis, phi_plus().matrix());
    for (int nu = 0; nu < 16; ++nu) CHECK(e[nu] == doctest::Approx(pairs * p[nu]).epsilon(1e-9));
    const auto e2 = expected_counts(setup, basis, model, 2 * duration, scheme);
    for (int nu = 0; nu < 16; ++nu) CHECK(e2[nu] == doctest::Approx(2 * e[nu]).epsilon(1e-12));
  }

  // The measured setup gives about 10 Hz over the normalization bases.
  const auto ms = DetectionModel::measured_setup();
  const auto e = expected_counts(setup, basis, ms, 1.0);
  CHECK(e[0] + e[1] + e[2] + e[3] == doctest::Approx(10.38).epsilon(1e-3));
}

TEST_CASE("Monte-Carlo counts converge to Born probabilities") {
  const auto& basis = TomographyBasisSet::standard();
  std::mt19937_64 rng(12);
  const auto model = DetectionModel::ideal();
  const double duration = 2e5 / model.rep_rate;
  for (int t = 0; t < 4; ++t) {
    const oracle::Mat rho = oracle::random_density(4, rng, 1 + t);
    const auto setup = CountingSetup::polarization(JointDensityMatrix(rho, 2, 2));
    const auto p = born(basis, rho);
    for (auto scheme : {DetectorScheme::four_detector, DetectorScheme::two_detector}) {
      CountingOptions opt;
      opt.scheme = scheme;
      const auto table = simulate_counts(setup, basis, model, duration, 100 + t, opt);
      for (int nu = 0; nu < 16; ++nu) {
        const double n = 2e5, mean = n * p[nu], sigma = std::sqrt(n * p[nu] * (1 - p[nu])) + 1;
        CHECK(std::abs(static_cast<double>(table.counts[nu]) - mean) < 5 * sigma);
      }
    }
  }
}

TEST_CASE("tomography through counting") {
  const auto& basis = TomographyBasisSet::standard();
  const auto model = DetectionModel::ideal();
  const double duration = 1e6 / model.rep_rate;
  const auto setup = CountingSetup::polarization(phi_plus());
  const auto table = simulate_counts(setup, basis, model, duration, 42);
  CHECK(table.integration_time == duration);
  CHECK(fidelity(qst_reconstruct(table), phi_plus()) >= 0.99);

  const auto again = simulate_counts(setup, basis, model, duration, 42);
  CHECK(again.counts == table.counts);
  CountingOptions serial;
  serial.exec = Execution::serial;
  CHECK(simulate_counts(setup, basis, model, duration, 42, serial).counts == table.counts);
  CHECK(simulate_counts(setup, basis, model, duration, 43).counts != table.counts);
}

TEST_CASE("hyperentangled counting pipeline") {
  const auto& basis = TomographyBasisSet::standard();
  const auto h = JointDensityMatrix::from_state(hyper_state());
  const Matrix4 p = purification_permutation();
  const auto model = DetectionModel::ideal();
  const double duration = 1e6 / model.rep_rate;
  for (auto c : {Collection::first_pair, Collection::second_pair, Collection::both_parallel}) {
    const auto setup = CountingSetup::hyper(h, bf_channel_mix(0.2), p, p, c);
    const auto e = expected_counts(setup, basis, model, duration);
    CoincidenceTable t = CoincidenceTable::for_basis(basis);
    for (int nu = 0; nu < 16; ++nu) t.counts[nu] = static_cast<uint64_t>(std::llround(e[nu] * 1e6));
    CHECK(fidelity(qst_reconstruct(t), phi_plus()) == doctest::Approx(16.0 / 17.0).epsilon(1e-6));
    // Kept fraction: 0.68 of the pairs, half of them per collected pair.
    const double kept = (e[0] + e[1] + e[2] + e[3]) / (duration * model.pair_rate);
    CHECK(kept == doctest::Approx(c == Collection::both_parallel ? 0.68 : 0.34).epsilon(1e-9));
    const auto mc = simulate_counts(setup, basis, model, duration, 7);
    CHECK(fidelity(qst_reconstruct(mc), phi_plus()) == doctest::Approx(16.0 / 17.0).epsilon(0.02));
  }
  CHECK_THROWS_AS(CountingSetup::hyper(phi_plus(), bf_channel_mix(0.2), p, p, Collection::first_pair),
                  std::invalid_argument);
}

TEST_CASE("accidentals lower the reconstructed fidelity") {
  const auto& basis = TomographyBasisSet::standard();
  const auto setup = CountingSetup::polarization(phi_plus());
  auto fid = [&](const DetectionModel& m) {
    const auto e = expected_counts(setup, basis, m, 1.0);
    double scale = 1e9 / (e[0] + e[1] + e[2] + e[3]);
    CoincidenceTable t = CoincidenceTable::for_basis(basis);
    for (int nu = 0; nu < 16; ++nu) t.counts[nu] = static_cast<uint64_t>(std::llround(e[nu] * scale));
    return fidelity(qst_reconstruct(t), phi_plus());
  };
  DetectionModel m;
  m.pair_rate = 1e8;
  m.signal_efficiency = m.idler_efficiency = 0.2;
  double last = 1.1;
  for (double xi : {0.0, 0.05, 0.1, 0.2}) {
    m.multi_pair_xi = xi;
    const double f = fid(m);
    CHECK(f < last);
    last = f;
  }
  m.multi_pair_xi = 0.0;
  last = 1.1;
  for (double dark : {0.0, 1e5, 1e6, 1e7}) {
    m.dark_rate = dark;
    const double f = fid(m);
    CHECK(f < last);
    last = f;
  }

  // Monte-Carlo agrees with the expectation including darks and extra pairs.
  m.dark_rate = 5e6;
  m.multi_pair_xi = 0.2;
  const auto e = expected_counts(setup, basis, m, 1e-3);
  const auto mc = simulate_counts(setup, basis, m, 1e-3, 5);
  for (int nu = 0; nu < 16; ++nu)
    CHECK(std::abs(static_cast<double>(mc.counts[nu]) - e[nu]) < 5 * std::sqrt(e[nu]) + 3);
}

TEST_CASE("CHSH counts") {
  const auto setup = CountingSetup::polarization(phi_plus());
  const auto model = DetectionModel::ideal();
  const double duration = 1e6 / model.rep_rate;
  for (auto scheme : {DetectorScheme::four_detector, DetectorScheme::two_detector}) {
    CountingOptions opt;
    opt.scheme = scheme;
    const auto counts = simulate_chsh_counts(setup, ChshSettings{}, model, duration, 3, opt);
    CHECK(chsh_S(counts).S == doctest::Approx(2 * std::sqrt(2.0)).epsilon(0.01));
    opt.exec = Execution::serial;
    const auto again = simulate_chsh_counts(setup, ChshSettings{}, model, duration, 3, opt);
    CHECK(chsh_S(again).S == chsh_S(counts).S);
  }
}

TEST_CASE("CAR formula and inversion") {
  CHECK(xi_from_car(56.3, 1.0) == doctest::Approx(std::sqrt(1.0 / 55.3)).epsilon(1e-9));
  CHECK(xi_from_car(56.3, 1.0) == doctest::Approx(0.1344).epsilon(5e-4));
  CHECK(car_formula(1e-4, 0.5) > 1e7);
  CHECK(car_formula(0.3, 1.0) == doctest::Approx(1 + 1 / 0.09).epsilon(1e-12));
  const auto ms = DetectionModel::measured_setup();
  const double a = 1 - std::sqrt(ms.signal_detection() * ms.idler_detection());
  for (double xi : {0.01, 0.1, 0.3}) CHECK(std::abs(xi_from_car(car_from_model(ms, xi), a) - xi) < 1e-9);
  double last = 1e300;
  for (double xi = 0.01; xi < 0.9; xi += 0.01) {
    const double c = car_formula(xi, 0.3);
    CHECK(c < last);
    last = c;
  }
  CHECK_THROWS_AS(xi_from_car(1.5, 1.0), NumericalError);
  CHECK_THROWS_AS(xi_from_car(0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(car_formula(0.0, 0.5), std::invalid_argument);

  // With equal efficiencies the formula is the exact thermal-statistics ratio.
  for (double eta : {0.05, 0.5, 0.9})
    for (double xi : {0.05, 0.2, 0.5}) {
      const double ref = thermal_car(eta, eta, xi, 0.0);
      // The oracle subtracts nearly equal probabilities at low efficiency.
      CHECK(car_formula(xi, 1 - eta) == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("CAR Monte-Carlo") {
  DetectionModel m;
  m.pair_rate = 1e6;
  m.signal_efficiency = m.idler_efficiency = 0.5;
  const uint64_t pulses = 4'000'000;

  const double xi = 0.3;
  const auto r = simulate_car(m, xi, pulses, 9);
  CHECK(r.pulses == pulses);
  const double ref = thermal_car(0.5, 0.5, xi, 0.0);
  // Adjacent pairs never straddle a block, so slightly fewer than pulses - 1 chances.
  const double sigma = ref * std::sqrt(1.0 / r.adjacent + 1.0 / r.central);
  CHECK(std::abs(r.car() - ref) < 5 * sigma);
  CHECK(std::abs(car_from_model(m, xi) - ref) < 1e-9 * ref);
  const auto serial = simulate_car(m, xi, pulses, 9, Execution::serial);
  CHECK(serial.central == r.central);
  CHECK(serial.adjacent == r.adjacent);

  double last = 1e300;
  for (double x : {0.1, 0.2, 0.3}) {
    const double c = simulate_car(m, x, pulses, 21).car();
    CHECK(c < last);
    last = c;
  }
  last = 1e300;
  for (double dark : {0.0, 4e7, 2e8}) {
    m.dark_rate = dark;
    const auto d = simulate_car(m, 0.1, pulses, 21);
    CHECK(d.car() < last);
    const double expect = thermal_car(0.5, 0.5, 0.1, m.dark_probability());
    CHECK(std::abs(d.car() - expect) < 5 * expect * std::sqrt(1.0 / d.adjacent + 1.0 / d.central));
    last = d.car();
  }
  CHECK_THROWS_AS(CarMeasurement{}.car(), NumericalError);
}

TEST_CASE("spectral purity from g2") {
  CHECK(purity_from_g2(1.77).purity == 0.77);
  CHECK(purity_from_g2(1.77).schmidt_K == doctest::Approx(1 / 0.77).epsilon(1e-12));
  CHECK(purity_from_g2(2.0).purity == 1.0);
  CHECK(purity_from_g2(2.0).schmidt_K == 1.0);
  CHECK(purity_from_g2(1.5).purity == 0.5);
  CHECK_THROWS_AS(purity_from_g2(1.0), std::invalid_argument);
  CHECK_THROWS_AS(purity_from_g2(2.1), std::invalid_argument);
  CHECK(g2_adjacent_corrected(177, 100, 100, 100) == doctest::Approx(1.77));
  CHECK(g2_adjacent_corrected(177, 108.5, 108.5, 100) == doctest::Approx(1.94));
  CHECK_THROWS_AS(g2_adjacent_corrected(1, 1, 1, 0), NumericalError);
}
