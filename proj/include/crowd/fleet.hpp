#pragma once

// Simulated worker fleet: device profiles, synthetic telemetry, the execution
// speed model and disconnect/reconnect schedules.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "crowd/error.hpp"
#include "crowd/random.hpp"

namespace crowd::fleet {

struct DeviceProfile {
  std::string id;
  int cores = 1;
  double freq_ghz = 1.0;
  double ram_gb = 1.0;
  double background_load = 0.1;
  double churn_rate_per_min = 0.0;
  double reconnect_min_s = 0.0;
  double reconnect_max_s = 0.0;

  bool operator==(const DeviceProfile&) const = default;
};

inline void validate(const DeviceProfile& p) {
  auto finite = [](double x) { return std::isfinite(x); };
  if (p.id.empty()) fail(ErrorCode::InvalidInput, "device profile needs an id");
  if (p.cores < 1) fail(ErrorCode::InvalidInput, p.id + ": cores must be positive");
  if (!finite(p.freq_ghz) || p.freq_ghz <= 0.0) fail(ErrorCode::InvalidInput, p.id + ": freq_ghz must be positive");
  if (!finite(p.ram_gb) || p.ram_gb <= 0.0) fail(ErrorCode::InvalidInput, p.id + ": ram_gb must be positive");
  if (!finite(p.background_load) || p.background_load < 0.0 || p.background_load >= 1.0) {
    fail(ErrorCode::InvalidInput, p.id + ": background_load must be in [0,1)");
  }
  if (!finite(p.churn_rate_per_min) || p.churn_rate_per_min < 0.0) {
    fail(ErrorCode::InvalidInput, p.id + ": churn_rate_per_min must be non-negative");
  }
  if (!finite(p.reconnect_min_s) || !finite(p.reconnect_max_s) || p.reconnect_min_s < 0.0 ||
      p.reconnect_min_s > p.reconnect_max_s) {
    fail(ErrorCode::InvalidInput, p.id + ": reconnect delay must satisfy 0 <= min <= max");
  }
}

inline void validate_fleet(const std::vector<DeviceProfile>& fleet) {
  if (fleet.empty()) fail(ErrorCode::InvalidInput, "fleet is empty");
  std::set<std::string> ids;
  for (const auto& p : fleet) {
    validate(p);
    if (!ids.insert(p.id).second) fail(ErrorCode::InvalidInput, "duplicate device id " + p.id);
  }
}

/// The six heterogeneous Android handsets used as the reference fleet.
inline std::vector<DeviceProfile> default_fleet() {
  auto make = [](std::string id, double freq, double ram) {
    DeviceProfile p;
    p.id = std::move(id);
    p.cores = 8;
    p.freq_ghz = freq;
    p.ram_gb = ram;
    return p;
  };
  return {
      make("A34", 2.00, 7.3), make("A32", 1.80, 5.5),     make("A51", 1.74, 7.4),
      make("E40", 1.82, 3.4), make("S6 Lite", 2.00, 3.6), make("A9+", 1.80, 3.3),
  };
}

struct TelemetrySnapshot {
  std::string worker_id;
  double cpu_util = 0.0;
  double free_mem_gb = 0.0;
  double battery = 1.0;
  double latency_ms = 20.0;
  double thermal = 0.0;
  double timestamp_s = 0.0;

  bool operator==(const TelemetrySnapshot&) const = default;
};

/// Constants of the synthetic telemetry dynamics. All are scenario-overridable.
struct TelemetryModel {
  double cpu_reversion_per_s = 0.5;
  double cpu_noise_sigma = 0.05;  // scaled by sqrt(dt)
  double battery_drain_per_min = 0.01;
  double battery_busy_drain_per_min = 0.05;
  double busy_threshold = 0.5;
  double thermal_rate_per_s = 0.1;
  double latency_base_ms = 20.0;
  double latency_jitter_mean_ms = 5.0;
  double mem_load_factor = 0.3;
  double mem_noise_gb = 0.1;
};

inline TelemetrySnapshot initial_snapshot(const DeviceProfile& profile, const TelemetryModel& model = {}) {
  TelemetrySnapshot s;
  s.worker_id = profile.id;
  s.cpu_util = profile.background_load;
  s.free_mem_gb = profile.ram_gb * (1.0 - model.mem_load_factor * profile.background_load);
  s.battery = 1.0;
  s.latency_ms = model.latency_base_ms + model.latency_jitter_mean_ms;
  s.thermal = profile.background_load;
  s.timestamp_s = 0.0;
  return s;
}

/// Advances one worker's telemetry by dt seconds. CPU load follows an
/// Ornstein-Uhlenbeck walk toward the background load, thermal state lags CPU
/// load, battery drains linearly (faster under heavy load).
inline TelemetrySnapshot step_telemetry(const DeviceProfile& profile, const TelemetrySnapshot& prev, double dt_s,
                                        Rng& rng, const TelemetryModel& model = {}) {
  if (!(dt_s > 0.0) || !std::isfinite(dt_s)) fail(ErrorCode::InvalidInput, "telemetry step needs dt > 0");
  if (prev.worker_id != profile.id) fail(ErrorCode::InvalidInput, "telemetry does not belong to " + profile.id);

  // Fixed draw count per step regardless of which noise terms are switched off.
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double z = gauss(rng);
  const double e = expo(rng);
  const double u = unit(rng);

  TelemetrySnapshot next = prev;
  const double decay = std::exp(-model.cpu_reversion_per_s * dt_s);
  const double cpu = profile.background_load + (prev.cpu_util - profile.background_load) * decay +
                     model.cpu_noise_sigma * std::sqrt(dt_s) * z;
  next.cpu_util = std::clamp(cpu, 0.0, 1.0);

  double drain = model.battery_drain_per_min * dt_s / 60.0;
  if (next.cpu_util > model.busy_threshold) drain += model.battery_busy_drain_per_min * dt_s / 60.0;
  next.battery = std::clamp(prev.battery - drain, 0.0, 1.0);

  const double thermal_decay = std::exp(-model.thermal_rate_per_s * dt_s);
  next.thermal = std::clamp(next.cpu_util + (prev.thermal - next.cpu_util) * thermal_decay, 0.0, 1.0);

  next.latency_ms = model.latency_base_ms + model.latency_jitter_mean_ms * e;
  if (!(next.latency_ms > 0.0)) next.latency_ms = 1e-3;

  const double mem = profile.ram_gb * (1.0 - model.mem_load_factor * next.cpu_util) + model.mem_noise_gb * u;
  next.free_mem_gb = std::max(0.0, mem);
  next.timestamp_s = prev.timestamp_s + dt_s;
  return next;
}

/// Work units per second a device delivers given its current load.
inline double effective_throughput(const DeviceProfile& profile, const TelemetrySnapshot& snap,
                                   double unit_scale = 1.0) {
  const double idle = 1.0 - std::clamp(snap.cpu_util, 0.0, 1.0);
  return std::max(0.0, double(profile.cores) * profile.freq_ghz * idle * unit_scale);
}

enum class ChurnKind { Disconnect, Reconnect };

struct ChurnEvent {
  std::string worker_id;
  ChurnKind kind = ChurnKind::Disconnect;
  double at_s = 0.0;

  bool operator==(const ChurnEvent&) const = default;
};

/// Poisson disconnects per worker, each followed by a reconnect after a
/// uniform delay. A worker cannot disconnect again before it has reconnected.
inline std::vector<ChurnEvent> sample_churn(const std::vector<DeviceProfile>& profiles, double horizon_s, Rng& rng) {
  if (!(horizon_s > 0.0)) fail(ErrorCode::InvalidInput, "churn horizon must be positive");
  struct Keyed {
    ChurnEvent event;
    std::size_t worker_index;
  };
  std::vector<Keyed> events;
  for (std::size_t w = 0; w < profiles.size(); ++w) {
    const auto& p = profiles[w];
    if (p.churn_rate_per_min <= 0.0) continue;
    std::exponential_distribution<double> gap(p.churn_rate_per_min / 60.0);
    std::uniform_real_distribution<double> delay(p.reconnect_min_s, p.reconnect_max_s);
    double t = 0.0;
    while (true) {
      t += gap(rng);
      if (t >= horizon_s) break;
      const double back = t + (p.reconnect_max_s > p.reconnect_min_s ? delay(rng) : p.reconnect_min_s);
      events.push_back({{p.id, ChurnKind::Disconnect, t}, w});
      events.push_back({{p.id, ChurnKind::Reconnect, back}, w});
      t = back;
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const Keyed& a, const Keyed& b) {
    return std::tie(a.event.at_s, a.worker_index) < std::tie(b.event.at_s, b.worker_index);
  });
  std::vector<ChurnEvent> out;
  out.reserve(events.size());
  for (auto& k : events) out.push_back(std::move(k.event));
  return out;
}

}  // namespace crowd::fleet
