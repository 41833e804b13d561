#pragma once

#include "icp/engine.hpp"
#include "icp/scenario.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace icp {

struct BenchmarkConfig {
  int scenarios = 1;
  int reps = 1;
  std::uint64_t seed = 0;
  IcpConfig icp;  // icp.seed is replaced per run
  unsigned threads = 0;
};

struct BenchmarkRow {
  int scenario = 0;
  int rep = 0;
  ScenarioParams params;
  bool target_intervened = false;
  IndexSet s_star;  // dataset columns
  IndexSet s_hat;
  bool success = false;  // s_hat == s_star
  bool error = false;    // s_hat not a subset of s_star
  bool model_rejected = false;
  bool failed = false;  // engine threw; message holds the reason
  std::string message;
};

struct Proportion {
  std::int64_t hits = 0;
  std::int64_t total = 0;
  double rate = 0.0;
  double se = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 1.0;
};

/// Binomial proportion with its standard error and 95% Wilson interval.
Proportion proportion(std::int64_t hits, std::int64_t total);

struct BenchmarkReport {
  BenchmarkConfig config;
  std::vector<BenchmarkRow> rows;  // sorted by (scenario, rep)
  Proportion success;              // over runs that did not fail
  Proportion fwer;
  std::int64_t failed = 0;
};

/// Scenario s uses stream s of the seed. Each rep draws fresh data from the
/// same scenario. Failures are recorded in the row, never thrown.
BenchmarkReport run_benchmark(const BenchmarkConfig& cfg);

void write_benchmark_csv(std::ostream& out, const BenchmarkReport& r);

/// Aggregates plus one summary per scenario.
nlohmann::json benchmark_summary_json(const BenchmarkReport& r);

}  // namespace icp
