#include "icp/scenario.hpp"

#include "icp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace icp {
namespace {

// Uniform over {lo, lo + 0.1, ..., hi}.
double uniform_tenths(Rng& rng, int lo_tenths, int hi_tenths) {
  return std::uniform_int_distribution<int>(lo_tenths, hi_tenths)(rng) / 10.0;
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace

ScenarioParams sample_scenario_params(Rng& rng) {
  ScenarioParams s;
  s.n_obs = 100 * uniform_int(rng, 1, 5);
  s.n_int = 100 * uniform_int(rng, 1, 5);
  s.p = uniform_int(rng, 5, 40);
  s.k_avg = uniform_int(rng, 1, 4);
  s.lb1 = uniform_tenths(rng, 1, 20);
  s.delta_b1 = uniform_tenths(rng, 1, 10);
  const int sigma2_min_tenths = uniform_int(rng, 1, 20);
  s.sigma2_min = sigma2_min_tenths / 10.0;
  s.sigma2_max = uniform_tenths(rng, sigma2_min_tenths, 20);
  s.a_min = uniform_tenths(rng, 1, 40);
  s.delta_a = std::bernoulli_distribution(1.0 / 3.0)(rng) ? 0.0 : uniform_tenths(rng, 1, 20);
  s.coef_change = std::bernoulli_distribution(1.0 / 3.0)(rng);
  const double b1 = uniform_tenths(rng, 1, 20);
  const double b2 = uniform_tenths(rng, 1, 20);
  s.lb2 = std::min(b1, b2);
  s.ub2 = std::max(b1, b2);
  s.single_intervention = std::bernoulli_distribution(1.0 / 6.0)(rng);
  s.theta = 1.0 / uniform_tenths(rng, 11, 30);
  return s;
}

SemSpec random_sem(const ScenarioParams& params, Rng& rng) {
  const int m = params.p;
  if (m < 2) throw Error(ErrorKind::DomainError, "random SEM needs at least two nodes");
  if (params.k_avg < 1.0 || params.k_avg > m - 1)
    throw Error(ErrorKind::DomainError, "average degree must lie in [1, p - 1]");
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  const double edge_prob = std::min(1.0, params.k_avg / (m - 1));
  std::bernoulli_distribution edge(edge_prob);
  std::bernoulli_distribution negative(0.5);
  std::uniform_real_distribution<double> magnitude(params.lb1, params.lb1 + params.delta_b1);
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(m, m);
  for (int j = 1; j < m; ++j) {
    for (int i = 0; i < j; ++i) {
      if (!edge(rng)) continue;
      const double mag = magnitude(rng);
      beta(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(i)]) = negative(rng) ? -mag : mag;
    }
  }
  std::uniform_real_distribution<double> variance(params.sigma2_min, params.sigma2_max);
  Eigen::VectorXd sigma(m);
  for (int j = 0; j < m; ++j) sigma(j) = std::sqrt(variance(rng));
  const Index target = std::uniform_int_distribution<Index>(0, m - 1)(rng);
  return make_sem(std::move(beta), std::move(sigma), target);
}

Scenario make_scenario(const ScenarioParams& params, Rng& rng) {
  Scenario sc;
  sc.params = params;
  sc.observational = random_sem(params, rng);
  SimultaneousNoiseParams noise;
  noise.a_min = params.a_min;
  noise.delta_a = params.delta_a;
  noise.coef_change = params.coef_change;
  noise.lb2 = params.lb2;
  noise.ub2 = params.ub2;
  noise.single_intervention = params.single_intervention;
  noise.theta = params.theta;
  sc.interventional = simultaneous_noise_scenario(sc.observational, noise, rng);
  sc.intervened = sc.interventional.intervened_nodes();
  sc.target_intervened = sc.interventional.target_intervened();
  sc.parents = target_parent_columns(sc.observational);
  return sc;
}

Dataset draw_scenario_dataset(const Scenario& scenario, Rng& rng) {
  std::vector<Eigen::MatrixXd> blocks;
  blocks.push_back(sample(scenario.observational, scenario.params.n_obs, rng));
  blocks.push_back(sample(scenario.interventional, scenario.params.n_int, rng));
  return sem_samples_to_dataset(scenario.observational, blocks);
}

ScenarioDraw generate_scenario(Rng& rng) {
  const auto params = sample_scenario_params(rng);
  auto scenario = make_scenario(params, rng);
  auto data = draw_scenario_dataset(scenario, rng);
  return {std::move(scenario), std::move(data)};
}

Eigen::VectorXd node_means(const SemSpec& spec) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(spec.num_nodes());
  for (Index j : spec.order) {
    if (const auto it = spec.fixed.find(j); it != spec.fixed.end()) {
      mean(j) = it->second;
      continue;
    }
    double m = spec.mu_shift(j);
    for (Index k = 0; k < spec.num_nodes(); ++k) m += spec.beta(j, k) * mean(k);
    if (const auto& shift = spec.noise_shift[static_cast<std::size_t>(j)]) {
      m += shift->kind == NoiseDraw::Kind::Uniform ? 0.5 * (shift->a + shift->b) : shift->a;
    }
    mean(j) = m;
  }
  return mean;
}

Dataset do_intervention_experiment(const SemSpec& spec, Index n_per_env, double shift_lo, double shift_hi, Rng& rng) {
  const Eigen::VectorXd mean = node_means(spec);
  std::uniform_real_distribution<double> magnitude(shift_lo, shift_hi);
  std::bernoulli_distribution negative(0.5);
  std::vector<Eigen::MatrixXd> blocks;
  blocks.push_back(sample(spec, n_per_env, rng));
  for (Index j = 0; j < spec.num_nodes(); ++j) {
    if (j == spec.target) continue;
    const double shift = magnitude(rng);
    const double value = mean(j) + (negative(rng) ? -shift : shift);
    blocks.push_back(sample(do_intervention(spec, {{j, value}}), n_per_env, rng));
  }
  return sem_samples_to_dataset(spec, blocks);
}

}  // namespace icp
