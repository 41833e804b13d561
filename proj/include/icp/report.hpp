#pragma once

#include "icp/dataset.hpp"
#include "icp/engine.hpp"
#include "icp/scenario.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace icp {

inline constexpr int kSchemaVersion = 1;

/// Rounds to 12 significant digits; non-finite values pass through.
double round12(double v);

struct ReportConfig {
  std::string target;
  std::string environments;  // "column:<name>", "split:<name>" or "none"
  double alpha = 0.05;
  std::string method = "II";  // "I", "II" or "hidden"
  std::optional<int> max_set_size;
  std::optional<int> preselect;
  double gof_cutoff = 0.0;
  int robust_v = 0;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> subsample_cap;
  bool early_stopping = true;

  bool operator==(const ReportConfig&) const = default;
};

struct ReportSet {
  std::vector<std::string> variables;
  double p_value = 0.0;

  bool operator==(const ReportSet&) const = default;
};

struct ReportInterval {
  std::string variable;
  double lo = 0.0;
  double hi = 0.0;
  bool contains_zero = false;
  bool empty = false;
  bool unbounded = false;

  bool operator==(const ReportInterval&) const = default;
};

struct AnalysisReport {
  int schema_version = kSchemaVersion;
  ReportConfig config;
  std::vector<std::string> predictors;
  std::int64_t n = 0;
  std::vector<std::int64_t> environment_sizes;
  std::vector<ReportSet> accepted;
  std::vector<std::string> s_hat;
  std::vector<ReportInterval> intervals;
  bool model_rejected = false;
  bool stopped_early = false;
  double best_p = 0.0;
  std::int64_t tested_count = 0;
  double joint_coverage = 0.95;  // 1 - 2 alpha
  std::vector<std::string> notes;
  std::optional<double> runtime_seconds;

  bool operator==(const AnalysisReport&) const = default;
};

/// All doubles in the report are rounded so that serialization is lossless.
AnalysisReport make_report(const Dataset& d, const IcpResult& r, const ReportConfig& cfg);

nlohmann::json to_json(const AnalysisReport& r);
AnalysisReport analysis_report_from_json(const nlohmann::json& j);

/// Pretty-printed, keys sorted, newline terminated.
std::string serialize(const nlohmann::json& j);

nlohmann::json to_json(const ScenarioParams& p);
ScenarioParams scenario_params_from_json(const nlohmann::json& j);

/// Beta as sparse {child, parent, weight} triplets.
nlohmann::json to_json(const SemSpec& s);

nlohmann::json scenario_to_json(const Scenario& s, std::uint64_t seed);

}  // namespace icp
