#include "icp/benchmark.hpp"
#include "icp/csv.hpp"
#include "icp/dataset.hpp"
#include "icp/engine.hpp"
#include "icp/errors.hpp"
#include "icp/fixtures.hpp"
#include "icp/hidden.hpp"
#include "icp/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct AnalyzeArgs {
  std::string csv;
  std::string target;
  std::optional<std::string> env;
  std::optional<std::string> split_col;
  std::vector<double> cutpoints;
  bool keep_split = false;
  std::optional<std::string> pool;
  double alpha = 0.05;
  int method = 2;
  std::optional<int> max_set_size;
  std::optional<int> preselect;
  double gof_cutoff = 0.0;
  int robust_v = 0;
  bool hidden = false;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
  bool timing = false;
  unsigned threads = 0;
};

struct SimulateArgs {
  int scenarios = 50;
  int reps = 100;
  std::uint64_t seed = 0;
  int method = 2;
  double alpha = 0.05;
  std::optional<std::string> out_csv;
  std::optional<std::string> out_json;
  std::optional<int> preselect;
  std::optional<int> max_set_size;
  unsigned threads = 0;
};

struct ExportArgs {
  std::string name;
  long n = 1000;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

// "1,2;3" groups environments 1 and 2 and keeps 3 alone
icp::EnvironmentGrouping parse_grouping(const std::string& spec) {
  icp::EnvironmentGrouping g;
  std::stringstream blocks(spec);
  std::string block;
  while (std::getline(blocks, block, ';')) {
    std::vector<int> group;
    std::stringstream items(block);
    std::string item;
    while (std::getline(items, item, ',')) {
      try {
        std::size_t used = 0;
        group.push_back(std::stoi(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw icp::Error(icp::ErrorKind::InvalidPartition, "bad --pool entry '" + item + "'");
      }
    }
    g.groups.push_back(std::move(group));
  }
  return g;
}

void emit(const std::optional<std::string>& path, const std::string& text) {
  if (!path) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(*path, std::ios::binary);
  if (!f) throw icp::Error(icp::ErrorKind::MalformedInput, "cannot open " + *path + " for writing");
  f << text;
  if (!f) throw icp::Error(icp::ErrorKind::MalformedInput, "write to " + *path + " failed");
}

int analyze(const AnalyzeArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const icp::RawTable table = icp::read_csv_file(a.csv);
  std::optional<std::string_view> env_col;
  if (a.env) env_col = *a.env;
  icp::Dataset d = icp::validate_dataset(table, a.target, env_col);
  std::string env_source = a.env ? "column:" + *a.env : "none";
  if (a.split_col) {
    d = icp::split_environments_by_variable(d, *a.split_col, a.cutpoints, a.keep_split).data;
    env_source = "split:" + *a.split_col;
  }
  if (a.pool) d = icp::pool_environments(d, parse_grouping(*a.pool));

  icp::IcpConfig cfg;
  cfg.alpha = a.alpha;
  cfg.method = a.method == 1 ? icp::Method::I : icp::Method::II;
  cfg.max_set_size = a.max_set_size;
  cfg.preselect_q = a.preselect;
  cfg.gof_cutoff = a.gof_cutoff;
  cfg.robust_v = a.robust_v;
  cfg.seed = a.seed;
  cfg.threads = a.threads;

  const icp::IcpResult r = a.hidden ? icp::run_hidden_icp(d, cfg) : icp::run_icp(d, cfg);

  icp::ReportConfig rc;
  rc.target = a.target;
  rc.environments = env_source;
  rc.alpha = a.alpha;
  rc.method = a.hidden ? "hidden" : (a.method == 1 ? "I" : "II");
  rc.max_set_size = a.max_set_size;
  rc.preselect = a.preselect;
  rc.gof_cutoff = a.gof_cutoff;
  rc.robust_v = a.robust_v;
  rc.seed = a.seed;
  if (a.method == 1 && !a.hidden && cfg.subsample_cap) rc.subsample_cap = *cfg.subsample_cap;
  rc.early_stopping = cfg.early_stopping;
  auto report = icp::make_report(d, r, rc);
  if (a.timing)
    report.runtime_seconds =
        icp::round12(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  emit(a.out, icp::serialize(icp::to_json(report)));
  return report.model_rejected ? 2 : 0;
}

int simulate(const SimulateArgs& a) {
  icp::BenchmarkConfig cfg;
  cfg.scenarios = a.scenarios;
  cfg.reps = a.reps;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.icp.alpha = a.alpha;
  cfg.icp.method = a.method == 1 ? icp::Method::I : icp::Method::II;
  cfg.icp.preselect_q = a.preselect;
  cfg.icp.max_set_size = a.max_set_size;
  const auto report = icp::run_benchmark(cfg);
  const std::string summary = icp::serialize(icp::benchmark_summary_json(report));
  if (a.out_csv) {
    std::ostringstream csv;
    icp::write_benchmark_csv(csv, report);
    emit(a.out_csv, csv.str());
  }
  emit(a.out_json, summary);
  return 0;
}

int export_fixture(const ExportArgs& a) {
  const auto fx = icp::make_fixture(a.name, a.n, a.seed);
  std::ostringstream csv;
  icp::write_dataset_csv(csv, fx.data);
  emit(a.out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant causal prediction"};
  app.require_subcommand(1);

  AnalyzeArgs aa;
  auto* analyze_cmd = app.add_subcommand("analyze", "Estimate the causal predictors of a target");
  analyze_cmd->add_option("--csv", aa.csv, "input CSV with a header row")->required();
  analyze_cmd->add_option("--target", aa.target, "target column")->required();
  auto* env_opt = analyze_cmd->add_option("--env", aa.env, "environment column");
  auto* split_opt = analyze_cmd->add_option("--split-col", aa.split_col, "form environments by binning this column");
  env_opt->excludes(split_opt);
  analyze_cmd->add_option("--cutpoints", aa.cutpoints, "increasing cutpoints for --split-col")
      ->delimiter(',')
      ->needs(split_opt);
  analyze_cmd->add_flag("--keep-split-column", aa.keep_split, "keep the split column as a predictor")->needs(split_opt);
  analyze_cmd->add_option("--pool", aa.pool, "merge environments, e.g. \"1,2;3\"");
  analyze_cmd->add_option("--alpha", aa.alpha, "significance level")->check(CLI::Range(0.0, 1.0));
  analyze_cmd->add_option("--method", aa.method, "invariance test, 1 or 2")->check(CLI::IsMember({1, 2}));
  analyze_cmd->add_option("--max-set-size", aa.max_set_size, "largest set size searched")->check(CLI::NonNegativeNumber);
  analyze_cmd->add_option("--preselect", aa.preselect, "screen to this many predictors first")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--gof-cutoff", aa.gof_cutoff, "minimum p-value of the best set")->check(CLI::Range(0.0, 1.0));
  analyze_cmd->add_option("--robust-v", aa.robust_v, "tolerate this many non-invariant environments")
      ->check(CLI::NonNegativeNumber);
  analyze_cmd->add_flag("--hidden", aa.hidden, "allow hidden confounding (grid search)");
  analyze_cmd->add_option("--seed", aa.seed, "seed for subsampling");
  analyze_cmd->add_option("--out", aa.out, "write JSON here instead of stdout");
  analyze_cmd->add_flag("--timing", aa.timing, "include runtime in the report");
  analyze_cmd->add_option("--threads", aa.threads, "worker threads, 0 for all cores");

  SimulateArgs sa;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run ICP on random SEM scenarios");
  simulate_cmd->add_option("--scenarios", sa.scenarios, "number of scenarios")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--reps", sa.reps, "datasets per scenario")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sa.seed, "master seed");
  simulate_cmd->add_option("--method", sa.method, "invariance test, 1 or 2")->check(CLI::IsMember({1, 2}));
  simulate_cmd->add_option("--alpha", sa.alpha, "significance level")->check(CLI::Range(0.0, 1.0));
  simulate_cmd->add_option("--out-csv", sa.out_csv, "per-run rows in long format");
  simulate_cmd->add_option("--out-json", sa.out_json, "aggregate JSON (default stdout)");
  simulate_cmd->add_option("--preselect", sa.preselect, "screen to this many predictors first")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--max-set-size", sa.max_set_size, "largest set size searched")
      ->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--threads", sa.threads, "worker threads, 0 for all cores");

  ExportArgs ea;
  auto* export_cmd = app.add_subcommand("export-fixture", "Write a built-in dataset as CSV");
  export_cmd->add_option("name", ea.name, "appendix_a, remark_i, remark_ii or prop5")->required();
  export_cmd->add_option("--n", ea.n, "rows per environment")->check(CLI::PositiveNumber);
  export_cmd->add_option("--seed", ea.seed, "random seed");
  export_cmd->add_option("--out", ea.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*analyze_cmd) return analyze(aa);
    if (*simulate_cmd) return simulate(sa);
    if (*export_cmd) return export_fixture(ea);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
