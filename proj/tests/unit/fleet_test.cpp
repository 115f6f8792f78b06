#include <gtest/gtest.h>

#include <set>

#include "crowd/fleet.hpp"
#include "support/expect.hpp"

using namespace crowd;
using namespace crowd::fleet;

TEST(DefaultFleet, MatchesReferenceHandsets) {
  const auto f = default_fleet();
  ASSERT_EQ(f.size(), 6u);
  EXPECT_EQ(f[0].id, "A34");
  EXPECT_DOUBLE_EQ(f[0].freq_ghz, 2.00);
  EXPECT_DOUBLE_EQ(f[0].ram_gb, 7.3);
  const std::vector<std::tuple<std::string, double, double>> want = {
      {"A34", 2.00, 7.3}, {"A32", 1.80, 5.5},     {"A51", 1.74, 7.4},
      {"E40", 1.82, 3.4}, {"S6 Lite", 2.00, 3.6}, {"A9+", 1.80, 3.3}};
  std::set<std::string> ids;
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(f[i].id, std::get<0>(want[i]));
    EXPECT_EQ(f[i].cores, 8);
    EXPECT_DOUBLE_EQ(f[i].freq_ghz, std::get<1>(want[i]));
    EXPECT_DOUBLE_EQ(f[i].ram_gb, std::get<2>(want[i]));
    EXPECT_DOUBLE_EQ(f[i].background_load, 0.1);
    EXPECT_DOUBLE_EQ(f[i].churn_rate_per_min, 0.0);
    ids.insert(f[i].id);
  }
  EXPECT_EQ(ids.size(), 6u);
  EXPECT_NO_THROW(validate_fleet(f));
}

TEST(DeviceProfile, ValidationRejectsBadFields) {
  DeviceProfile p{"x", 4, 2.0, 4.0};
  EXPECT_NO_THROW(validate(p));
  auto bad = p;
  bad.cores = 0;
  EXPECT_CROWD_ERROR(validate(bad), ErrorCode::InvalidInput);
  bad = p;
  bad.background_load = 1.0;
  EXPECT_CROWD_ERROR(validate(bad), ErrorCode::InvalidInput);
  bad = p;
  bad.reconnect_min_s = 5;
  bad.reconnect_max_s = 1;
  EXPECT_CROWD_ERROR(validate(bad), ErrorCode::InvalidInput);
  EXPECT_CROWD_ERROR(validate_fleet({p, p}), ErrorCode::InvalidInput);
}

TEST(Telemetry, BatteryClipsAtZero) {
  const auto p = default_fleet()[0];
  auto s = initial_snapshot(p);
  s.battery = 0.0;
  s.cpu_util = 0.9;
  Rng rng(1);
  for (int i = 0; i < 10; ++i) s = step_telemetry(p, s, 2.0, rng);
  EXPECT_EQ(s.battery, 0.0);
}

TEST(Telemetry, MeanReversionFixedPointWithoutNoise) {
  const auto p = default_fleet()[1];
  TelemetryModel quiet;
  quiet.cpu_noise_sigma = 0.0;
  auto s = initial_snapshot(p, quiet);
  Rng rng(3);
  const auto next = step_telemetry(p, s, 1.0, rng, quiet);
  EXPECT_DOUBLE_EQ(next.cpu_util, p.background_load);
  EXPECT_DOUBLE_EQ(next.timestamp_s, 1.0);
}

TEST(Telemetry, SeededTrajectoryIsReproducible) {
  const auto p = default_fleet()[2];
  auto run = [&] {
    Rng rng = make_rng(9, 4);
    auto s = initial_snapshot(p);
    std::vector<TelemetrySnapshot> out;
    for (int i = 0; i < 100; ++i) out.push_back(s = step_telemetry(p, s, 0.5, rng));
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(Telemetry, StaysInBoundsUnderHeavyNoise) {
  TelemetryModel wild;
  wild.cpu_noise_sigma = 2.0;
  wild.mem_noise_gb = 50.0;
  for (const auto& p : default_fleet()) {
    Rng rng = make_rng(77, p.cores);
    auto s = initial_snapshot(p, wild);
    for (int i = 0; i < 2000; ++i) {
      s = step_telemetry(p, s, 0.7, rng, wild);
      ASSERT_GE(s.cpu_util, 0.0);
      ASSERT_LE(s.cpu_util, 1.0);
      ASSERT_GE(s.battery, 0.0);
      ASSERT_LE(s.battery, 1.0);
      ASSERT_GE(s.thermal, 0.0);
      ASSERT_LE(s.thermal, 1.0);
      ASSERT_GE(s.free_mem_gb, 0.0);
      ASSERT_GT(s.latency_ms, 0.0);
    }
  }
}

TEST(Telemetry, RejectsBadStep) {
  const auto f = default_fleet();
  Rng rng(1);
  auto s = initial_snapshot(f[0]);
  EXPECT_CROWD_ERROR(step_telemetry(f[0], s, 0.0, rng), ErrorCode::InvalidInput);
  EXPECT_CROWD_ERROR(step_telemetry(f[1], s, 1.0, rng), ErrorCode::InvalidInput);
}

TEST(Throughput, LinearModel) {
  DeviceProfile p{"x", 8, 2.0, 4.0};
  TelemetrySnapshot s;
  s.cpu_util = 0.0;
  EXPECT_DOUBLE_EQ(effective_throughput(p, s), 16.0);
  s.cpu_util = 1.0;
  EXPECT_DOUBLE_EQ(effective_throughput(p, s), 0.0);
  s.cpu_util = 0.25;
  EXPECT_DOUBLE_EQ(effective_throughput(p, s, 2.0), 24.0);

  const auto f = default_fleet();
  TelemetrySnapshot t;
  t.cpu_util = 0.1;
  EXPECT_GT(effective_throughput(f[0], t), effective_throughput(f[2], t));
}

TEST(Throughput, Monotone) {
  DeviceProfile p{"x", 4, 1.5, 4.0};
  TelemetrySnapshot s;
  double last = INFINITY;
  for (double u = 0.0; u <= 1.0; u += 0.05) {
    s.cpu_util = u;
    const double r = effective_throughput(p, s);
    EXPECT_LE(r, last);
    last = r;
  }
  s.cpu_util = 0.3;
  auto more_cores = p;
  more_cores.cores = 6;
  auto faster = p;
  faster.freq_ghz = 2.0;
  EXPECT_GT(effective_throughput(more_cores, s), effective_throughput(p, s));
  EXPECT_GT(effective_throughput(faster, s), effective_throughput(p, s));
}

TEST(Churn, ZeroRateIsQuiet) {
  Rng rng(3);
  EXPECT_TRUE(sample_churn(default_fleet(), 600.0, rng).empty());
  EXPECT_CROWD_ERROR(sample_churn(default_fleet(), 0.0, rng), ErrorCode::InvalidInput);
}

TEST(Churn, SeededScheduleReplaysAndAlternates) {
  auto f = default_fleet();
  for (auto& p : f) {
    p.churn_rate_per_min = 1.0;
    p.reconnect_min_s = 5.0;
    p.reconnect_max_s = 30.0;
  }
  Rng a = make_rng(3, 7), b = make_rng(3, 7);
  const auto ev = sample_churn(f, 600.0, a);
  EXPECT_EQ(ev, sample_churn(f, 600.0, b));
  EXPECT_FALSE(ev.empty());
  for (std::size_t i = 1; i < ev.size(); ++i) EXPECT_LE(ev[i - 1].at_s, ev[i].at_s);
  for (const auto& p : f) {
    ChurnKind expect = ChurnKind::Disconnect;
    for (const auto& e : ev) {
      if (e.worker_id != p.id) continue;
      EXPECT_EQ(e.kind, expect);
      expect = expect == ChurnKind::Disconnect ? ChurnKind::Reconnect : ChurnKind::Disconnect;
    }
    EXPECT_EQ(expect, ChurnKind::Disconnect) << "unpaired disconnect for " << p.id;
  }
}
