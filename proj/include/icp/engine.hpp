#pragma once

#include "icp/dataset.hpp"
#include "icp/index_set.hpp"
#include "icp/invariance_tests.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace icp {

struct IcpConfig {
  double alpha = 0.05;
  Method method = Method::II;
  std::optional<int> max_set_size;  // largest |S| considered
  std::optional<int> preselect_q;   // screen to this many candidates first
  double gof_cutoff = 0.0;          // best-fitting set must reach this p-value
  int robust_v = 0;                 // tolerate this many non-invariant environments
  std::uint64_t seed = 0;
  std::optional<Index> subsample_cap = kDefaultSubsampleCap;  // Method I only
  bool early_stopping = true;
  unsigned threads = 0;  // 0 selects std::thread::hardware_concurrency()
};

struct AcceptedSet {
  IndexSet set;
  double p_value = 1.0;

  bool operator==(const AcceptedSet&) const = default;
};

/// Rectangular confidence region of one accepted set, coordinates in set order.
struct SetRegion {
  IndexSet set;
  Eigen::VectorXd center;
  Eigen::VectorXd half_width;

  bool contains(const Eigen::VectorXd& gamma, double tol = 0.0) const;
};

/// Per-variable summary of the union of accepted regions: the interval hull
/// [lo, hi] plus whether 0 is in the exact union. `pieces` keeps the exact
/// union members, one per accepted set ({0} for sets without the variable).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains_zero = false;
  bool empty = false;      // no region to report
  bool unbounded = false;  // search stopped before all regions were known
  std::vector<std::pair<double, double>> pieces;
};

struct ConfidenceRegions {
  std::vector<SetRegion> regions;
  std::vector<Interval> intervals;  // one per predictor
};

struct IcpResult {
  std::vector<AcceptedSet> accepted;
  IndexSet s_hat;
  std::vector<Interval> intervals;
  std::vector<SetRegion> regions;
  IndexSet candidate_pool;
  bool model_rejected = false;
  bool stopped_early = false;
  double best_p = 0.0;
  std::size_t tested_count = 0;

  /// True when gamma lies in the union of accepted regions.
  bool covers(const Eigen::VectorXd& gamma, double tol = 0.0) const;
};

/// Combined p-value of H0,S for a candidate set.
using SetTester = std::function<double(const IndexSet&)>;

struct SearchOptions {
  double alpha = 0.05;
  std::optional<int> max_set_size;
  bool early_stopping = true;
  unsigned threads = 0;
};

struct SearchOutcome {
  std::vector<AcceptedSet> accepted;
  IndexSet s_hat;
  bool model_rejected = false;
  bool stopped_early = false;
  double best_p = 0.0;
  std::size_t tested_count = 0;
};

/// Enumerates subsets of `pool` by increasing size (lexicographic within a
/// size), testing each level in parallel and synchronizing at level
/// boundaries. With early stopping the search ends once the empty set is
/// accepted or the accepted sets have an empty intersection.
SearchOutcome search_sets(const IndexSet& pool, const SetTester& tester, const SearchOptions& opts);

IcpResult run_icp(const Dataset& d, const IcpConfig& cfg);

/// Accepts S if the base test does not reject on some environment subset
/// with at least E - robust_v environments.
IcpResult run_icp_robust(const Dataset& d, const IcpConfig& cfg);

/// Pooled rectangular (1 - alpha) regions, Bonferroni over coordinates,
/// and their per-variable union.
ConfidenceRegions confidence_intervals(const Dataset& d, const std::vector<IndexSet>& accepted, double alpha);

/// Top-q predictors by absolute marginal correlation with y; ties by column.
IndexSet preselect(const Dataset& d, int q);

/// Same decisions as run_icp over all 2^p sets, no pruning. Requires p <= 12.
IcpResult brute_force_oracle(const Dataset& d, const IcpConfig& cfg);

/// Validates cfg against d, throwing InfeasibleConfig.
void check_config(const Dataset& d, const IcpConfig& cfg);

/// Per-variable union of rectangular regions over p predictors.
std::vector<Interval> union_intervals(Index p, const std::vector<SetRegion>& regions);

/// Applies the goodness-of-fit cutoff and fills empty (model rejected) or
/// unbounded (stopped early) intervals. Returns true when the caller still
/// has to compute regions from the accepted sets.
bool settle_interval_status(IcpResult& result, double gof_cutoff, Index p);

/// Fills intervals/regions of `result` from its accepted sets.
void attach_intervals(const Dataset& d, double alpha, double gof_cutoff, IcpResult& result);

}  // namespace icp
