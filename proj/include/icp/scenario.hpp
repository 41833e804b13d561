#pragma once

#include "icp/dataset.hpp"
#include "icp/sem.hpp"

#include <cstdint>

namespace icp {

/// Parameters of one random benchmark scenario (two environments).
struct ScenarioParams {
  int n_obs = 100;
  int n_int = 100;
  int p = 5;  // nodes in the graph, target included
  double k_avg = 1.0;
  double lb1 = 0.1;
  double delta_b1 = 0.1;
  double sigma2_min = 0.1;
  double sigma2_max = 0.1;
  double a_min = 0.1;
  double delta_a = 0.0;
  bool coef_change = false;
  double lb2 = 0.1;
  double ub2 = 0.1;
  bool single_intervention = false;
  double theta = 0.5;
};

/// Draws every parameter independently from its benchmark range.
ScenarioParams sample_scenario_params(Rng& rng);

/// Random DAG over params.p nodes: random topological order, each forward
/// pair connected with probability k_avg / (p - 1), coefficients of random
/// sign with magnitude U[lb1, lb1 + delta_b1], noise variance
/// U[sigma2_min, sigma2_max], target uniform over nodes.
SemSpec random_sem(const ScenarioParams& params, Rng& rng);

struct Scenario {
  ScenarioParams params;
  SemSpec observational;
  SemSpec interventional;
  IndexSet intervened;     // node indices
  bool target_intervened = false;
  IndexSet parents;        // dataset column indices of PA(target)
};

struct ScenarioDraw {
  Scenario scenario;
  Dataset data;
};

/// Samples parameters, graph and intervention, then one dataset.
ScenarioDraw generate_scenario(Rng& rng);

Scenario make_scenario(const ScenarioParams& params, Rng& rng);

/// Fresh observational (env 1) and interventional (env 2) samples.
Dataset draw_scenario_dataset(const Scenario& scenario, Rng& rng);

/// Observational environment plus one environment per non-target node with
/// do(X_j = E[X_j] + shift_j), where |shift_j| ~ U[shift_lo, shift_hi] with random sign.
Dataset do_intervention_experiment(const SemSpec& spec, Index n_per_env, double shift_lo, double shift_hi, Rng& rng);

/// Mean of each node in the unintervened model.
Eigen::VectorXd node_means(const SemSpec& spec);

}  // namespace icp
