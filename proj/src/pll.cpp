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

#include "hyperpure/pll.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace hyperpure {

void PllConfig::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(kp) || !finite(ki) || !finite(kd)) throw std::invalid_argument("PllConfig: gains must be finite");
  if (!(tap_ratio > 0.0 && tap_ratio < 1.0)) throw std::invalid_argument("PllConfig: tap_ratio must lie in (0,1)");
  if (!(sample_interval > 0.0) || !finite(sample_interval))
    throw std::invalid_argument("PllConfig: sample_interval must be > 0");
  if (!(record_interval >= sample_interval)) throw std::invalid_argument("PllConfig: record_interval < sample_interval");
  if (!(drift_diffusion >= 0.0) || !finite(drift_diffusion))
    throw std::invalid_argument("PllConfig: drift_diffusion must be >= 0");
  if (!(max_power > 0.0)) throw std::invalid_argument("PllConfig: max_power must be > 0");
  if (!(setpoint_fraction > 0.0 && setpoint_fraction < 1.0))
    throw std::invalid_argument("PllConfig: setpoint_fraction must lie in (0,1)");
  if (!(integrator_clamp >= 0.0)) throw std::invalid_argument("PllConfig: integrator_clamp must be >= 0");
  if (!(lock_band > 0.0)) throw std::invalid_argument("PllConfig: lock_band must be > 0");
  if (!(relock_timeout > 0.0)) throw std::invalid_argument("PllConfig: relock_timeout must be > 0");
  if (!(monitor_noise >= 0.0)) throw std::invalid_argument("PllConfig: monitor_noise must be >= 0");
  if (!(settle_time >= 0.0)) throw std::invalid_argument("PllConfig: settle_time must be >= 0");
}

PllConfig PllConfig::reference() {
  PllConfig c;
  const double tm = c.monitor_max();
  // The slope at half maximum is tm/2 per radian, so kp*tm/2 is the loop gain.
  c.kp = 0.6 / tm;
  c.ki = 0.01 / (c.sample_interval * tm);
  c.kd = 0.0;
  c.integrator_clamp = 0.5 / c.ki;
  return c;
}

PllConfig PllConfig::open_loop() {
  PllConfig c;
  c.kp = c.ki = c.kd = 0.0;
  return c;
}

double monitor_power(double phi_net, const PllConfig& config) {
  if (!std::isfinite(phi_net)) throw std::invalid_argument("monitor_power: phase must be finite");
  return config.monitor_max() * (1.0 + std::cos(phi_net)) / 2.0;
}

double drift_step(double dt, double diffusion, Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("drift_step: dt must be > 0");
  if (diffusion <= 0.0) return 0.0;
  std::normal_distribution<double> n(0.0, std::sqrt(diffusion * dt));
  return n(rng);
}

double pid_update(double error, PidState& state, const PllConfig& config) {
  const double dt = config.sample_interval;
  state.integral += error * dt;
  if (config.integrator_clamp > 0.0)
    state.integral = std::clamp(state.integral, -config.integrator_clamp, config.integrator_clamp);
  else
    state.integral = 0.0;
  const double deriv = state.has_prev ? (error - state.prev_error) / dt : 0.0;
  state.prev_error = error;
  state.has_prev = true;
  return config.kp * error + config.ki * state.integral + config.kd * deriv;
}

PllRun run_lock(const PllConfig& config, double duration, uint64_t seed, std::optional<PhaseStep> step) {
  config.validate();
  if (!(duration > 0.0) || !std::isfinite(duration)) throw std::invalid_argument("run_lock: duration must be > 0");
  const double dt = config.sample_interval;
  const auto steps = static_cast<long long>(std::llround(duration / dt));
  const auto every = std::max<long long>(1, std::llround(config.record_interval / dt));
  const long long settle = std::llround(config.settle_time / dt);
  const long long step_at = step ? std::llround(step->time / dt) : -1;
  const double setpoint = config.setpoint();
  const double band = config.lock_band * setpoint;

  Rng drift_rng(substream_seed(seed, 1));
  Rng noise_rng(substream_seed(seed, 2));
  std::normal_distribution<double> noise(0.0, config.monitor_noise > 0.0 ? config.monitor_noise : 1.0);
  // Same law as drift_step, with the distribution hoisted out of the loop.
  const bool drifting = config.drift_diffusion > 0.0;
  std::normal_distribution<double> drift_dist(0.0, drifting ? std::sqrt(config.drift_diffusion * dt) : 1.0);
  PidState pid;
  double drift = 0.0, control = 0.0;

  PllRun run;
  run.trace.reserve(static_cast<std::size_t>(steps / every + 1));
  long long locked_steps = 0, counted = 0, unlock_run = 0, max_unlock = 0;
  bool prev_locked = true;
  // Welford accumulators; the lock is tight enough that sum-of-squares cancels.
  double mean = 0.0, m2 = 0.0;
  std::size_t recorded_stats = 0;

  for (long long n = 0; n <= steps; ++n) {
    if (n == step_at) drift += step->phase;
    const double power = monitor_power(drift + control, config);
    const bool locked = std::abs(power - setpoint) <= band;
    if (n % every == 0) {
      run.trace.push_back({static_cast<double>(n) * dt, drift, control, power, locked});
      if (n >= settle) {
        ++recorded_stats;
        const double delta = power - mean;
        mean += delta / static_cast<double>(recorded_stats);
        m2 += delta * (power - mean);
      }
    }
    if (n >= settle) {
      ++counted;
      if (locked) {
        ++locked_steps;
        if (!prev_locked) ++run.report.relock_events;
        unlock_run = 0;
      } else {
        max_unlock = std::max(max_unlock, ++unlock_run);
      }
      prev_locked = locked;
    }
    if (n == steps) break;
    const double measured = config.monitor_noise > 0.0 ? power + noise(noise_rng) : power;
    control += pid_update(setpoint - measured, pid, config);
    if (drifting) drift += drift_dist(drift_rng);
  }

  LockReport& r = run.report;
  r.samples = recorded_stats;
  if (recorded_stats > 1) {
    const double var = m2 / static_cast<double>(recorded_stats - 1);
    r.mean_power = mean;
    r.relative_power_std = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
  }
  r.locked_fraction = counted > 0 ? static_cast<double>(locked_steps) / counted : 0.0;
  r.max_unlock_duration = static_cast<double>(max_unlock) * dt;
  r.relocked_within_timeout = r.max_unlock_duration <= config.relock_timeout;
  return run;
}

std::vector<LockReport> run_battery(const PllConfig& config, double duration, uint64_t base_seed, int count,
                                    Execution exec) {
  if (count < 0) throw std::invalid_argument("run_battery: count must be >= 0");
  config.validate();
  std::vector<LockReport> out(static_cast<std::size_t>(count));
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) out[i] = run_lock(config, duration, base_seed + i).report;
  } else {
    for (int i = 0; i < count; ++i) out[i] = run_lock(config, duration, base_seed + i).report;
  }
  return out;
}

}  // namespace hyperpure
