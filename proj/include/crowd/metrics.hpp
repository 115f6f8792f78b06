#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "crowd/error.hpp"

namespace crowd::metrics {

/// Jain's fairness index, (sum x)^2 / (m * sum x^2).
inline double jains_index(std::span<const double> alloc) {
  if (alloc.empty()) fail(ErrorCode::InvalidInput, "allocation vector is empty");
  double sum = 0.0, sum_sq = 0.0;
  for (double x : alloc) {
    if (!std::isfinite(x) || x < 0.0) fail(ErrorCode::InvalidInput, "allocations must be finite and non-negative");
    sum += x;
    sum_sq += x * x;
  }
  if (sum_sq == 0.0) fail(ErrorCode::UndefinedFairness, "fairness is undefined for an all-zero allocation");
  return (sum * sum) / (double(alloc.size()) * sum_sq);
}

inline double speedup(double single_s, double distributed_s) {
  if (!(single_s > 0.0) || !(distributed_s > 0.0)) fail(ErrorCode::InvalidInput, "speedup needs positive times");
  return single_s / distributed_s;
}

inline double checkpoint_overhead(double enabled_s, double disabled_s) { return enabled_s - disabled_s; }

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

/// Mean and sample standard deviation; a single sample has SD 0.
inline MeanSd mean_sd(std::span<const double> xs) {
  if (xs.empty()) fail(ErrorCode::InvalidInput, "no samples");
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / double(xs.size());
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / double(xs.size() - 1))};
}

enum class FairnessBasis { Tasks, BusySeconds };

struct RunSummary {
  std::string scenario;
  std::string strategy;
  bool checkpointing = false;
  double interval_s = 0.0;
  std::uint64_t seed = 0;
  double makespan_s = 0.0;
  std::vector<double> allocations;
  double fairness = 0.0;
  double speedup = 0.0;
  /// Filled only by checkpoint sweeps.
  bool has_overhead = false;
  double overhead_s = 0.0;
};

inline const char* kCsvHeader = "scenario,strategy,interval_s,seed,makespan_s,J,speedup,overhead_s";

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string format_number(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

/// One CSV row in the column order of kCsvHeader. interval_s is empty when
/// checkpointing is disabled, overhead_s when not part of a sweep.
inline std::string to_csv_row(const RunSummary& r) {
  std::string row = csv_field(r.scenario) + "," + csv_field(r.strategy) + ",";
  row += r.checkpointing ? format_number(r.interval_s, 3) : "";
  row += "," + std::to_string(r.seed) + "," + format_number(r.makespan_s) + "," + format_number(r.fairness) + "," +
         format_number(r.speedup) + ",";
  if (r.has_overhead) row += format_number(r.overhead_s);
  return row;
}

}  // namespace crowd::metrics
