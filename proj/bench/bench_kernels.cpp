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

// Serial reference vs OpenMP paths of the data-parallel kernels.

#include <benchmark/benchmark.h>

#include "hyperpure/analysis.hpp"
#include "hyperpure/circuit.hpp"
#include "hyperpure/counting.hpp"
#include "hyperpure/noise.hpp"
#include "hyperpure/pll.hpp"

namespace hp = hyperpure;

namespace {

hp::Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? hp::Execution::serial : hp::Execution::parallel;
}

void BM_SimulateCounts(benchmark::State& state) {
  const auto rho = hp::JointDensityMatrix::from_state(hp::hyper_state());
  const hp::Matrix4 on = hp::compile(hp::purification_on());
  const auto setup = hp::CountingSetup::hyper(rho, hp::bf_channel_mix(0.2), on, on, hp::Collection::first_pair);
  hp::DetectionModel model = hp::DetectionModel::measured_setup();
  model.multi_pair_xi = 0.13;
  hp::CountingOptions opt;
  opt.exec = mode(state);
  opt.blocks_per_setting = 256;
  uint64_t seed = 1;
  for (auto _ : state) {
    auto t = hp::simulate_counts(setup, hp::TomographyBasisSet::standard(), model, 600.0, seed++, opt);
    benchmark::DoNotOptimize(t.counts);
  }
}
BENCHMARK(BM_SimulateCounts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Bootstrap(benchmark::State& state) {
  const auto phi = hp::JointDensityMatrix::from_state(hp::bell_state(hp::BellKind::phi_plus));
  const auto table = hp::expected_table(hp::apply_white_noise(phi, 0.1), 1e4);
  for (auto _ : state) {
    auto e = hp::fidelity_with_error(table, phi, 1000, 7, mode(state));
    benchmark::DoNotOptimize(e.std);
  }
}
BENCHMARK(BM_Bootstrap)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CarMonteCarlo(benchmark::State& state) {
  hp::DetectionModel m = hp::DetectionModel::ideal();
  m.signal_efficiency = m.idler_efficiency = 0.3;
  for (auto _ : state) {
    auto r = hp::simulate_car(m, 0.13, 4'000'000, 3, mode(state));
    benchmark::DoNotOptimize(r.central);
  }
}
BENCHMARK(BM_CarMonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PllBattery(benchmark::State& state) {
  const auto cfg = hp::PllConfig::reference();
  for (auto _ : state) {
    auto r = hp::run_battery(cfg, 60.0, 1, 8, mode(state));
    benchmark::DoNotOptimize(r.data());
  }
}
BENCHMARK(BM_PllBattery)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
