#include "icp/sem.hpp"

#include "icp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace icp {

double NoiseDraw::draw(Rng& rng) const {
  switch (kind) {
    case Kind::Constant: return a;
    case Kind::Uniform: return std::uniform_real_distribution<double>(a, b)(rng);
    case Kind::Normal: return std::normal_distribution<double>(a, b)(rng);
  }
  return a;
}

double NoiseDraw::second_moment() const {
  switch (kind) {
    case Kind::Constant: return a * a;
    case Kind::Uniform: return (a * a + a * b + b * b) / 3.0;
    case Kind::Normal: return a * a + b * b;
  }
  return a * a;
}

IndexSet SemSpec::intervened_nodes() const {
  IndexSet out;
  for (Index j = 0; j < num_nodes(); ++j) {
    const auto u = static_cast<std::size_t>(j);
    if (fixed.count(j) || noise_scale[u] || noise_shift[u]) out.push_back(j);
  }
  return out;
}

bool SemSpec::target_intervened() const { return contains(intervened_nodes(), target); }

SemSpec make_sem(Eigen::MatrixXd beta, Eigen::VectorXd sigma, Index target, std::vector<std::string> names) {
  const Index m = beta.rows();
  if (beta.cols() != m || sigma.size() != m)
    throw Error(ErrorKind::InvalidDataset, "beta must be square and match sigma");
  if (target < 0 || target >= m) throw Error(ErrorKind::InvalidDataset, "target out of range");
  if (names.empty())
    for (Index j = 0; j < m; ++j) names.push_back("X" + std::to_string(j + 1));
  if (static_cast<Index>(names.size()) != m) throw Error(ErrorKind::InvalidDataset, "one name per node required");

  SemSpec spec;
  std::vector<bool> placed(static_cast<std::size_t>(m), false);
  while (static_cast<Index>(spec.order.size()) < m) {
    bool progressed = false;
    for (Index j = 0; j < m; ++j) {
      if (placed[static_cast<std::size_t>(j)]) continue;
      bool ready = true;
      for (Index k = 0; k < m && ready; ++k)
        if (beta(j, k) != 0.0 && !placed[static_cast<std::size_t>(k)]) ready = false;
      if (ready) {
        placed[static_cast<std::size_t>(j)] = true;
        spec.order.push_back(j);
        progressed = true;
        break;
      }
    }
    if (!progressed) throw Error(ErrorKind::InvalidDataset, "coefficient matrix contains a cycle");
  }
  spec.beta = std::move(beta);
  spec.sigma = std::move(sigma);
  spec.mu_shift = Eigen::VectorXd::Zero(m);
  spec.noise_scale.assign(static_cast<std::size_t>(m), std::nullopt);
  spec.noise_shift.assign(static_cast<std::size_t>(m), std::nullopt);
  spec.target = target;
  spec.names = std::move(names);
  return spec;
}

IndexSet parents(const SemSpec& spec, Index j) {
  IndexSet out;
  for (Index k = 0; k < spec.num_nodes(); ++k)
    if (spec.beta(j, k) != 0.0) out.push_back(k);
  return out;
}

Eigen::MatrixXd sample(const SemSpec& spec, Index n, Rng& rng) {
  if (n < 1) throw Error(ErrorKind::DomainError, "sample size must be positive");
  const Index m = spec.num_nodes();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, m);
  std::normal_distribution<double> std_normal(0.0, 1.0);
  for (Index j : spec.order) {
    if (const auto it = spec.fixed.find(j); it != spec.fixed.end()) {
      x.col(j).setConstant(it->second);
      continue;
    }
    for (Index k = 0; k < m; ++k)
      if (spec.beta(j, k) != 0.0) x.col(j) += spec.beta(j, k) * x.col(k);

    const auto& scale = spec.noise_scale[static_cast<std::size_t>(j)];
    const auto& shift = spec.noise_shift[static_cast<std::size_t>(j)];
    const double scale_once = (scale && !scale->per_sample) ? scale->draw(rng) : 1.0;
    const double shift_once = (shift && !shift->per_sample) ? shift->draw(rng) : 0.0;
    for (Index i = 0; i < n; ++i) {
      const double a = scale ? (scale->per_sample ? scale->draw(rng) : scale_once) : 1.0;
      const double c = shift ? (shift->per_sample ? shift->draw(rng) : shift_once) : 0.0;
      x(i, j) += spec.mu_shift(j) + c + a * spec.sigma(j) * std_normal(rng);
    }
  }
  return x;
}

namespace {

void check_node(const SemSpec& spec, Index j, bool allow_target) {
  if (j < 0 || j >= spec.num_nodes()) throw Error(ErrorKind::DomainError, "node index out of range");
  if (j == spec.target && !allow_target)
    throw Error(ErrorKind::TargetIntervened, "intervention on the target node " + spec.names[static_cast<std::size_t>(j)]);
}

}  // namespace

SemSpec do_intervention(const SemSpec& spec, const std::map<Index, double>& assignments, bool allow_target) {
  SemSpec out = spec;
  for (const auto& [j, value] : assignments) {
    check_node(spec, j, allow_target);
    out.beta.row(j).setZero();
    out.fixed[j] = value;
  }
  return out;
}

SemSpec noise_intervention(const SemSpec& spec, const std::map<Index, NoiseDraw>& scales,
                           const std::map<Index, NoiseDraw>& shifts, bool allow_target) {
  SemSpec out = spec;
  for (const auto& [j, draw] : scales) {
    check_node(spec, j, allow_target);
    out.noise_scale[static_cast<std::size_t>(j)] = draw;
  }
  for (const auto& [j, draw] : shifts) {
    check_node(spec, j, allow_target);
    out.noise_shift[static_cast<std::size_t>(j)] = draw;
  }
  return out;
}

SemSpec simultaneous_noise_scenario(const SemSpec& spec, const SimultaneousNoiseParams& params, Rng& rng) {
  if (!(params.a_min >= 0.0) || !(params.delta_a >= 0.0) || !(params.lb2 <= params.ub2) ||
      !(params.theta > 0.0 && params.theta <= 1.0))
    throw Error(ErrorKind::DomainError, "invalid simultaneous noise parameters");
  const Index m = spec.num_nodes();
  std::vector<Index> nodes(static_cast<std::size_t>(m));
  std::iota(nodes.begin(), nodes.end(), Index{0});
  std::shuffle(nodes.begin(), nodes.end(), rng);
  const Index count = params.single_intervention
                          ? 1
                          : std::clamp<Index>(static_cast<Index>(std::lround(params.theta * static_cast<double>(m))), 1, m);
  nodes.resize(static_cast<std::size_t>(count));
  std::sort(nodes.begin(), nodes.end());

  SemSpec out = spec;
  const NoiseDraw multiplier = params.delta_a == 0.0
                                   ? NoiseDraw::constant(params.a_min)
                                   : NoiseDraw::uniform(params.a_min, params.a_min + params.delta_a, params.per_sample);
  std::uniform_real_distribution<double> magnitude(params.lb2, params.ub2);
  std::bernoulli_distribution negative(0.5);
  for (Index j : nodes) {
    out.noise_scale[static_cast<std::size_t>(j)] = multiplier;
    if (!params.coef_change) continue;
    for (Index k = 0; k < m; ++k) {
      if (out.beta(j, k) == 0.0) continue;
      const double mag = params.lb2 == params.ub2 ? params.lb2 : magnitude(rng);
      out.beta(j, k) = negative(rng) ? -mag : mag;
    }
  }
  return out;
}

std::vector<Index> node_to_column(const SemSpec& spec) {
  std::vector<Index> out(static_cast<std::size_t>(spec.num_nodes()), -1);
  Index col = 0;
  for (Index j = 0; j < spec.num_nodes(); ++j)
    if (j != spec.target) out[static_cast<std::size_t>(j)] = col++;
  return out;
}

IndexSet target_parent_columns(const SemSpec& spec) {
  const auto cols = node_to_column(spec);
  IndexSet out;
  for (Index k : parents(spec, spec.target)) out.push_back(cols[static_cast<std::size_t>(k)]);
  return make_index_set(std::move(out));
}

Dataset sem_samples_to_dataset(const SemSpec& spec, const std::vector<Eigen::MatrixXd>& blocks) {
  const Index m = spec.num_nodes();
  Index n = 0;
  for (const auto& b : blocks) {
    if (b.cols() != m) throw Error(ErrorKind::InvalidDataset, "sample block has wrong node count");
    n += b.rows();
  }
  std::vector<Index> predictor_nodes;
  std::vector<std::string> names;
  for (Index j = 0; j < m; ++j) {
    if (j == spec.target) continue;
    predictor_nodes.push_back(j);
    names.push_back(spec.names[static_cast<std::size_t>(j)]);
  }
  Eigen::MatrixXd x(n, static_cast<Index>(predictor_nodes.size()));
  Eigen::VectorXd y(n);
  std::vector<int> env;
  env.reserve(static_cast<std::size_t>(n));
  Index row = 0;
  for (std::size_t e = 0; e < blocks.size(); ++e) {
    const auto& b = blocks[e];
    x.middleRows(row, b.rows()) = b(Eigen::all, predictor_nodes);
    y.segment(row, b.rows()) = b.col(spec.target);
    env.insert(env.end(), static_cast<std::size_t>(b.rows()), static_cast<int>(e) + 1);
    row += b.rows();
  }
  return Dataset(std::move(x), std::move(y), std::move(env), std::move(names),
                 spec.names[static_cast<std::size_t>(spec.target)]);
}

}  // namespace icp
