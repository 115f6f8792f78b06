#include <gtest/gtest.h>

#include "crowd/metrics.hpp"
#include "support/expect.hpp"

using namespace crowd;
using namespace crowd::metrics;

namespace {
double jain(std::vector<double> x) { return jains_index(x); }
}  // namespace

TEST(Jain, EqualAllocationIsOne) { EXPECT_DOUBLE_EQ(jain({10, 10, 10, 10, 10, 10}), 1.0); }

TEST(Jain, SingleWorkerExtreme) { EXPECT_NEAR(jain({60, 0, 0, 0, 0, 0}), 1.0 / 6.0, 1e-12); }

TEST(Jain, MatchesDirectFormula) {
  // (12)^2 / (6 * 26)
  const double j = jain({3, 2, 2, 2, 2, 1});
  EXPECT_NEAR(j, 144.0 / 156.0, 1e-12);
  EXPECT_GT(j, 0.85);
  EXPECT_LT(j, 1.0);
}

TEST(Jain, ScaleInvariantAndErrors) {
  EXPECT_NEAR(jain({1, 4, 9}), jain({0.5, 2, 4.5}), 1e-12);
  EXPECT_CROWD_ERROR(jain({0, 0}), ErrorCode::UndefinedFairness);
  EXPECT_CROWD_ERROR(jain({}), ErrorCode::InvalidInput);
  EXPECT_CROWD_ERROR(jain({1, -1}), ErrorCode::InvalidInput);
}

TEST(Speedup, ReferenceRows) {
  EXPECT_NEAR(speedup(192, 37.9), 5.07, 0.005);
  EXPECT_NEAR(speedup(2.06, 1.20), 1.72, 0.005);
  EXPECT_DOUBLE_EQ(speedup(3, 3), 1.0);
  EXPECT_CROWD_ERROR(speedup(0, 1), ErrorCode::InvalidInput);
  EXPECT_CROWD_ERROR(speedup(1, -2), ErrorCode::InvalidInput);
}

TEST(Overhead, ReferenceRows) {
  EXPECT_NEAR(checkpoint_overhead(4.14, 2.06), 2.08, 1e-12);
  EXPECT_NEAR(checkpoint_overhead(4.94, 2.06), 2.88, 1e-12);
  EXPECT_EQ(checkpoint_overhead(2.5, 2.5), 0.0);
}

TEST(MeanSd, SampleStatistics) {
  const std::vector<double> one{4.2};
  EXPECT_EQ(mean_sd(one).sd, 0.0);
  const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
  const auto s = mean_sd(xs);
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_NEAR(s.sd, std::sqrt(32.0 / 7.0), 1e-12);
}

TEST(Csv, ColumnOrderAndBlanks) {
  EXPECT_STREQ(kCsvHeader, "scenario,strategy,interval_s,seed,makespan_s,J,speedup,overhead_s");
  RunSummary r;
  r.scenario = "a,b";
  r.strategy = "wrr";
  r.seed = 3;
  r.makespan_s = 1.5;
  r.fairness = 1;
  r.speedup = 2;
  EXPECT_EQ(to_csv_row(r), "\"a,b\",wrr,,3,1.500000,1.000000,2.000000,");
  r.checkpointing = true;
  r.interval_s = 0.5;
  r.has_overhead = true;
  r.overhead_s = 2.08;
  EXPECT_EQ(to_csv_row(r), "\"a,b\",wrr,0.500,3,1.500000,1.000000,2.000000,2.080000");
}
