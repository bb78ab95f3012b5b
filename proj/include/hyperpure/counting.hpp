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

#ifndef HYPERPURE_COUNTING_HPP
#define HYPERPURE_COUNTING_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "hyperpure/analysis.hpp"
#include "hyperpure/common.hpp"
#include "hyperpure/noise.hpp"
#include "hyperpure/purify.hpp"
#include "hyperpure/qstate.hpp"

namespace hyperpure {

double db_to_linear(double loss_db);

struct DetectionModel {
  double pair_rate = 1.0e6;          // Hz, pairs leaving the source
  double signal_efficiency = 1.0;    // channel transmission, detector excluded
  double idler_efficiency = 1.0;
  double dark_rate = 0.0;            // Hz per detector
  double detector_efficiency = 1.0;
  double coincidence_window = 50e-12;  // s, timing jitter folded in
  double rep_rate = 9.95e9;          // Hz, pump pulses
  double multi_pair_xi = 0.0;        // probability of a second pair is xi^2

  void validate() const;  // throws std::invalid_argument

  double mean_pairs_per_pulse() const { return pair_rate / rep_rate; }
  double signal_detection() const { return signal_efficiency * detector_efficiency; }
  double idler_detection() const { return idler_efficiency * detector_efficiency; }
  /// Probability of a dark click inside one coincidence window.
  double dark_probability() const;

  /// Unit efficiency, no darks, one pair in every pulse.
  static DetectionModel ideal();
  /// Loss budgets 24.8 dB / 47.0 dB including the 90% detectors, 200 Hz darks,
  /// 9.95 GHz pump, pair rate calibrated to a 10.38 Hz raw coincidence rate.
  static DetectionModel measured_setup();
};

struct SourceParams {
  double xi = 0.0;
  double schmidt_K = 1.0;
  void validate() const;
};

/// Raw signal-idler coincidence rate with every photon routed to a detector.
double raw_coincidence_rate(const DetectionModel& model);
double signal_singles_rate(const DetectionModel& model);
double idler_singles_rate(const DetectionModel& model);
/// pair_rate that makes raw_coincidence_rate equal `coincidence_rate`.
double calibrate_pair_rate(const DetectionModel& model, double coincidence_rate);

/// What reaches the analyzers. A 2-qubit state is analyzed directly; a
/// hyperentangled 16-dim state goes through the noise mix and the per-photon
/// circuits, and only the modes chosen by `collection` carry analyzers.
struct CountingSetup {
  JointDensityMatrix state = JointDensityMatrix::maximally_mixed(2, 2);
  ChannelMix noise = ChannelMix::identity();
  Matrix signal_circuit;  // empty means identity
  Matrix idler_circuit;
  Collection collection = Collection::first_pair;

  static CountingSetup polarization(const JointDensityMatrix& rho4);
  static CountingSetup hyper(const JointDensityMatrix& rho16, const ChannelMix& noise,
                             const Matrix4& signal_circuit, const Matrix4& idler_circuit,
                             Collection collection);
};

/// two_detector: one analyzer port per photon, the 16 projectors are measured
/// one after another. four_detector: both ports per photon, 9 basis pairs.
enum class DetectorScheme { two_detector, four_detector };

struct CountingOptions {
  DetectorScheme scheme = DetectorScheme::four_detector;
  Execution exec = Execution::parallel;
  int blocks_per_setting = 64;  // independent substreams per setting
};

/// Coincidence counts for each tomography projector. `duration` is the
/// integration time of every measurement setting. Pair emission is Bernoulli per
/// pulse, the branch and photon fates are multinomial, dark clicks add accidentals
/// to first order in the dark probability, and each extra pair adds one genuine and
/// two cross (uncorrelated) coincidence chances.
CoincidenceTable simulate_counts(const CountingSetup& setup, const TomographyBasisSet& basis,
                                 const DetectionModel& model, double duration, uint64_t seed,
                                 const CountingOptions& options = {});

/// Mean of simulate_counts, entry by entry.
std::array<double, 16> expected_counts(const CountingSetup& setup, const TomographyBasisSet& basis,
                                       const DetectionModel& model, double duration,
                                       DetectorScheme scheme = DetectorScheme::four_detector);

/// CHSH coincidences. two_detector scheme measures the 16 angle pairs of
/// chsh_angle_pairs in sequence, four_detector measures the 4 terms with both ports.
ChshCounts simulate_chsh_counts(const CountingSetup& setup, const ChshSettings& settings,
                                const DetectionModel& model, double duration, uint64_t seed,
                                const CountingOptions& options = {});

/// 1/CAR = (1 - a^2 xi^2) xi^2 / ((1 + a xi^2)(1 - a xi^2)).
double car_formula(double xi, double a);
/// a = 1 - eta with eta the geometric mean of the two total detection efficiencies.
double car_from_model(const DetectionModel& model, double xi);
/// Bisection on xi in (0,1). Throws NumericalError when no root exists.
double xi_from_car(double car, double a);

struct CarMeasurement {
  uint64_t central = 0;   // coincidences within one pulse
  uint64_t adjacent = 0;  // signal in pulse j, idler in pulse j+1
  uint64_t pulses = 0;
  double car() const;
};

/// Thermal pair statistics P(n) = (1 - xi^2) xi^(2n) per pulse, independent
/// photon detection with the model efficiencies and dark clicks.
CarMeasurement simulate_car(const DetectionModel& model, double xi, uint64_t pulses, uint64_t seed,
                            Execution exec = Execution::parallel);

struct SpectralPurity {
  double schmidt_K = 1.0;
  double purity = 1.0;
};
/// g2 = 1 + 1/K and P = 1/K. Requires 1 < g2 <= 2.
SpectralPurity purity_from_g2(double g2);

/// Adjacent-peak correction of an unheralded g2 histogram: the jitter-spread
/// excess of the two neighbours over the reference peak is returned to the
/// central peak, g2 = (central + (left - ref) + (right - ref)) / ref.
double g2_adjacent_corrected(double central, double left, double right, double reference);

}  // namespace hyperpure

#endif  // HYPERPURE_COUNTING_HPP
