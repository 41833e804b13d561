#pragma once

#include "icp/dataset.hpp"
#include "icp/index_set.hpp"
#include "icp/rng.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace icp {

/// Distribution of a noise multiplier A_j or shift C_j. Drawn once per row
/// when `per_sample` is set, otherwise once per call to sample().
struct NoiseDraw {
  enum class Kind { Constant, Uniform, Normal };
  Kind kind = Kind::Constant;
  double a = 1.0;  // value | lower bound | mean
  double b = 1.0;  // unused | upper bound | sd
  bool per_sample = true;

  static NoiseDraw constant(double value) { return {Kind::Constant, value, value, false}; }
  static NoiseDraw uniform(double lo, double hi, bool per_sample = true) { return {Kind::Uniform, lo, hi, per_sample}; }
  static NoiseDraw normal(double mean, double sd, bool per_sample = true) { return {Kind::Normal, mean, sd, per_sample}; }

  double draw(Rng& rng) const;
  double second_moment() const;  // E[A^2]
};

/// Linear Gaussian structural equation model over nodes 0..m-1:
///   X_j = sum_k beta(j, k) X_k + mu_shift_j + C_j + A_j sigma_j eps_j,
/// with eps_j iid N(0, 1), or X_j = fixed[j] for do-intervened nodes.
struct SemSpec {
  std::vector<Index> order;  // topological order
  Eigen::MatrixXd beta;
  Eigen::VectorXd sigma;
  Eigen::VectorXd mu_shift;
  std::map<Index, double> fixed;
  std::vector<std::optional<NoiseDraw>> noise_scale;
  std::vector<std::optional<NoiseDraw>> noise_shift;
  Index target = 0;
  std::vector<std::string> names;

  Index num_nodes() const { return beta.rows(); }

  /// Nodes whose structural equation or noise differs from the plain model.
  IndexSet intervened_nodes() const;
  bool target_intervened() const;
};

/// Builds a spec from coefficients and noise sds, deriving a topological
/// order (smallest available index first). Throws InvalidDataset on cycles.
SemSpec make_sem(Eigen::MatrixXd beta, Eigen::VectorXd sigma, Index target,
                 std::vector<std::string> names = {});

/// Support of row j of beta, i.e. the parents of node j.
IndexSet parents(const SemSpec& spec, Index j);

/// Ancestral sampling, n x m with column j holding node j.
Eigen::MatrixXd sample(const SemSpec& spec, Index n, Rng& rng);

/// do(X_j = a_j): zeroes row j of beta and fixes the node.
SemSpec do_intervention(const SemSpec& spec, const std::map<Index, double>& assignments,
                        bool allow_target = false);

/// Multiplies noise of node j by A_j and/or shifts it by C_j; coefficients unchanged.
SemSpec noise_intervention(const SemSpec& spec, const std::map<Index, NoiseDraw>& scales,
                           const std::map<Index, NoiseDraw>& shifts, bool allow_target = false);

struct SimultaneousNoiseParams {
  double a_min = 1.0;
  double delta_a = 0.0;
  bool coef_change = false;
  double lb2 = 0.1;
  double ub2 = 2.0;
  bool single_intervention = false;
  double theta = 0.5;
  bool per_sample = true;
};

/// Interventional environment of the random benchmark: noise of a random
/// node set multiplied by A_j ~ U[a_min, a_min + delta_a], optionally with
/// fresh coefficients of random sign and magnitude in [lb2, ub2] on the
/// existing edges into intervened nodes. The target may be among them.
SemSpec simultaneous_noise_scenario(const SemSpec& spec, const SimultaneousNoiseParams& params, Rng& rng);

/// Stacks per-environment node samples into a Dataset. Predictors are the
/// non-target nodes in index order; environment e is block e.
Dataset sem_samples_to_dataset(const SemSpec& spec, const std::vector<Eigen::MatrixXd>& blocks);

/// Dataset column of each non-target node (-1 for the target).
std::vector<Index> node_to_column(const SemSpec& spec);

/// Parents of the target as dataset column indices.
IndexSet target_parent_columns(const SemSpec& spec);

}  // namespace icp
