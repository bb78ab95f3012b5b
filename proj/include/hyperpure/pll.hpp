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

#ifndef HYPERPURE_PLL_HPP
#define HYPERPURE_PLL_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "hyperpure/common.hpp"

namespace hyperpure {

/// Chip-to-chip phase lock: Wiener phase drift on one fiber, a tap-and-interfere
/// power monitor, and a PID whose output increments the phase-shifter setting.
struct PllConfig {
  double kp = 0.0;  // rad per watt of error
  double ki = 0.0;  // rad per watt-second
  double kd = 0.0;  // rad per watt per second
  double sample_interval = 1e-3;   // s, controller period
  double record_interval = 0.1;    // s, trace cadence
  double drift_diffusion = kPi * kPi / 10.0;  // rad^2/s, ~10 s to drift by pi
  double tap_ratio = 0.11;
  double max_power = 1.38e-7;      // W at constructive interference
  double setpoint_fraction = 0.5;  // of the monitor maximum
  double integrator_clamp = 0.0;   // bound on the integral state, W s
  double lock_band = 0.15;         // locked when |P - setpoint| <= band * setpoint
  double relock_timeout = 2.0;     // s
  double monitor_noise = 0.0;      // W, additive Gaussian on the measured power
  double settle_time = 5.0;        // s excluded from lock statistics

  void validate() const;  // throws std::invalid_argument
  double monitor_max() const { return tap_ratio * max_power; }
  double setpoint() const { return setpoint_fraction * monitor_max(); }

  /// Documented reference gains: proportional loop gain 0.3 per sample, a slow
  /// overdamped integral term, no derivative action.
  static PllConfig reference();
  /// Same plant with all gains at zero.
  static PllConfig open_loop();
};

/// tap_ratio * max_power * (1 + cos(phi)) / 2.
double monitor_power(double phi_net, const PllConfig& config);

/// Gaussian increment with variance diffusion * dt.
double drift_step(double dt, double diffusion, Rng& rng);

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  bool has_prev = false;
};

/// Discrete PID on error = setpoint - measured power, returning the phase
/// increment kp e + ki I + kd (e - e_prev) / dt with I clamped to the bound.
double pid_update(double error, PidState& state, const PllConfig& config);

struct PllSample {
  double t = 0.0;
  double drift_phase = 0.0;
  double control_phase = 0.0;
  double monitor_power = 0.0;
  bool locked = false;
};

struct LockReport {
  double relative_power_std = 0.0;  // std / mean of recorded power after settling
  double mean_power = 0.0;
  double locked_fraction = 0.0;
  int relock_events = 0;
  double max_unlock_duration = 0.0;  // s
  bool relocked_within_timeout = true;
  std::size_t samples = 0;
};

struct PllRun {
  std::vector<PllSample> trace;
  LockReport report;
};

/// Optional phase step added to the drift at a given time.
struct PhaseStep {
  double time = 0.0;
  double phase = 0.0;
};

PllRun run_lock(const PllConfig& config, double duration, uint64_t seed,
                std::optional<PhaseStep> step = std::nullopt);

/// Independent runs for seeds base_seed + i, i < count; the serial and parallel
/// paths return identical reports.
std::vector<LockReport> run_battery(const PllConfig& config, double duration, uint64_t base_seed, int count,
                                    Execution exec = Execution::parallel);

}  // namespace hyperpure

#endif  // HYPERPURE_PLL_HPP
