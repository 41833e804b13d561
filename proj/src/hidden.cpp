#include "icp/hidden.hpp"

#include "icp/errors.hpp"
#include "icp/ols.hpp"
#include "icp/two_sample.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <random>

namespace icp {
namespace {

// Rows of the environment-moment system A g = b for columns s.
void moment_equations(const Dataset& d, const IndexSet& s, Eigen::MatrixXd& a, Eigen::VectorXd& b) {
  const auto k = static_cast<Index>(s.size());
  const int num_envs = d.num_envs();
  a.resize(num_envs * (k + 1), k);
  b.resize(num_envs * (k + 1));
  const Eigen::MatrixXd x = d.x()(Eigen::all, s);
  auto moments = [&](const IndexList& rows, Eigen::VectorXd& mx, double& my, Eigen::MatrixXd& cxx,
                     Eigen::VectorXd& cxy) {
    const Eigen::MatrixXd xs = x(rows, Eigen::all);
    const Eigen::VectorXd ys = d.y()(rows);
    mx = xs.colwise().mean().transpose();
    my = ys.mean();
    const Eigen::MatrixXd xc = xs.rowwise() - mx.transpose();
    const double denom = static_cast<double>(rows.size());
    cxx = xc.transpose() * xc / denom;
    cxy = xc.transpose() * (ys.array() - my).matrix() / denom;
  };
  for (int e = 1; e <= num_envs; ++e) {
    Eigen::VectorXd mx_in, mx_out, cxy_in, cxy_out;
    Eigen::MatrixXd cxx_in, cxx_out;
    double my_in = 0.0;
    double my_out = 0.0;
    moments(d.rows_of(e), mx_in, my_in, cxx_in, cxy_in);
    moments(d.rows_not_in(e), mx_out, my_out, cxx_out, cxy_out);
    const Index r0 = (e - 1) * (k + 1);
    a.block(r0, 0, k, k) = cxx_in - cxx_out;
    b.segment(r0, k) = cxy_in - cxy_out;
    a.row(r0 + k) = (mx_in - mx_out).transpose();
    b(r0 + k) = my_in - my_out;
  }
}

std::optional<Eigen::VectorXd> moment_estimate(const Dataset& d, const IndexSet& s) {
  if (d.num_envs() < 2 || s.empty()) return std::nullopt;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  moment_equations(d, s, a, b);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > 1e8) return std::nullopt;
  return Eigen::VectorXd(svd.solve(b));
}

}  // namespace

double GridSpec::spacing(Index j) const {
  return points_per_axis > 1 ? 2.0 * half_widths(j) / (points_per_axis - 1) : 0.0;
}

double GridSpec::num_points() const { return std::pow(static_cast<double>(points_per_axis), static_cast<double>(center.size())); }

GridSpec default_grid(const Dataset& d, const IndexSet& s, const GridOptions& opts) {
  if (opts.points_per_axis < 1 || opts.points_per_axis % 2 == 0)
    throw Error(ErrorKind::InfeasibleConfig, "points_per_axis must be odd and positive");
  if (!(opts.se_multiplier > 0.0)) throw Error(ErrorKind::InfeasibleConfig, "se_multiplier must be positive");
  GridSpec grid;
  grid.points_per_axis = opts.points_per_axis;
  const auto k = static_cast<Index>(s.size());
  if (k == 0) return grid;

  const auto fit = ols_fit(d.x()(Eigen::all, s), d.y());
  const Eigen::VectorXd ols = fit.coef.tail(k);
  Eigen::VectorXd se(k);
  for (Index j = 0; j < k; ++j) se(j) = fit.std_error(j + 1);
  // Noiseless fits still need a grid with positive extent.
  se = se.cwiseMax(1e-12 * (1.0 + ols.cwiseAbs().maxCoeff()));

  grid.center = ols;
  grid.half_widths = opts.se_multiplier * se;
  if (opts.centering == GridCentering::Bracketed) {
    if (const auto mom = moment_estimate(d, s)) {
      grid.center = 0.5 * (ols + *mom);
      grid.half_widths += 0.5 * (ols - *mom).cwiseAbs();
    }
  }
  return grid;
}

double residual_invariance_pvalue(const Dataset& d, const Eigen::VectorXd& residuals) {
  const int num_envs = d.num_envs();
  if (num_envs < 2) return 1.0;
  const Index n = d.n();
  for (int e = 1; e <= num_envs; ++e)
    if (d.env_size(e) < 8 || n - d.env_size(e) < 8)
      throw Error(ErrorKind::TooFewSamples, "KS test needs 8 rows in each environment and its complement");

  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return residuals(a) < residuals(b); });

  std::vector<double> count(static_cast<std::size_t>(num_envs), 0.0);
  std::vector<double> stat(static_cast<std::size_t>(num_envs), 0.0);
  double total = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    const double v = residuals(idx[i]);
    while (i < idx.size() && residuals(idx[i]) == v) {
      count[static_cast<std::size_t>(d.env()[static_cast<std::size_t>(idx[i])] - 1)] += 1.0;
      total += 1.0;
      ++i;
    }
    for (int e = 1; e <= num_envs; ++e) {
      const auto u = static_cast<std::size_t>(e - 1);
      const double n_in = static_cast<double>(d.env_size(e));
      const double n_out = static_cast<double>(n) - n_in;
      stat[u] = std::max(stat[u], std::fabs(count[u] / n_in - (total - count[u]) / n_out));
    }
  }
  double smallest = 1.0;
  for (int e = 1; e <= num_envs; ++e) {
    const double n_in = static_cast<double>(d.env_size(e));
    smallest = std::min(smallest, ks_pvalue(stat[static_cast<std::size_t>(e - 1)], n_in, static_cast<double>(n) - n_in));
  }
  return std::min(1.0, num_envs * smallest);
}

double hidden_invariance_test(const Dataset& d, const IndexSet& s, const Eigen::VectorXd& gamma) {
  if (gamma.size() != d.p()) throw Error(ErrorKind::DomainError, "gamma must have one entry per predictor");
  for (Index k = 0; k < d.p(); ++k)
    if (gamma(k) != 0.0 && !contains(s, k)) throw Error(ErrorKind::DomainError, "gamma is not supported on S");
  const Eigen::VectorXd r = d.y() - d.x() * gamma;
  return residual_invariance_pvalue(d, r);
}

HiddenSetOutcome hidden_set_test(const Dataset& d, const IndexSet& s, const GridSpec& grid, double alpha) {
  const auto k = static_cast<Index>(s.size());
  if (grid.center.size() != k || grid.half_widths.size() != k)
    throw Error(ErrorKind::DomainError, "grid dimension does not match |S|");
  if (grid.points_per_axis < 1) throw Error(ErrorKind::DomainError, "grid needs at least one point per axis");
  if (grid.num_points() > kMaxGridPoints) throw Error(ErrorKind::GridTooLarge, "more than 1e7 grid points");

  const Eigen::MatrixXd xs = d.x()(Eigen::all, s);
  const int m = grid.points_per_axis;
  std::vector<int> digit(static_cast<std::size_t>(k), 0);
  Eigen::VectorXd g(k);
  HiddenSetOutcome out;
  Eigen::VectorXd best_g = grid.center;
  bool first = true;
  while (true) {
    for (Index j = 0; j < k; ++j) {
      const double unit = m > 1 ? static_cast<double>(2 * digit[static_cast<std::size_t>(j)]) / (m - 1) - 1.0 : 0.0;
      g(j) = grid.center(j) + grid.half_widths(j) * unit;
    }
    const Eigen::VectorXd r = k > 0 ? Eigen::VectorXd(d.y() - xs * g) : d.y();
    const double pv = residual_invariance_pvalue(d, r);
    if (first || pv > out.best_p) {
      out.best_p = pv;
      best_g = g;
      first = false;
    }
    Index j = k - 1;
    while (j >= 0 && ++digit[static_cast<std::size_t>(j)] == m) digit[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
  }
  out.accepted = out.best_p > alpha;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(d.p());
  for (Index j = 0; j < k; ++j) full(s[static_cast<std::size_t>(j)]) = best_g(j);
  out.best_gamma = full;
  return out;
}

IcpResult run_hidden_icp(const Dataset& d, const IcpConfig& cfg, const GridOptions& grid_opts) {
  check_config(d, cfg);
  if (cfg.robust_v != 0) throw Error(ErrorKind::InfeasibleConfig, "robust variant is not available for hidden ICP");
  IndexSet pool(static_cast<std::size_t>(d.p()));
  std::iota(pool.begin(), pool.end(), Index{0});
  if (cfg.preselect_q) pool = preselect(d, *cfg.preselect_q);

  std::mutex mutex;
  std::map<IndexSet, HiddenSetOutcome> outcomes;
  SetTester tester = [&](const IndexSet& s) {
    if (d.num_envs() < 2) return 1.0;
    auto outcome = hidden_set_test(d, s, default_grid(d, s, grid_opts), cfg.alpha);
    const double pv = outcome.best_p;
    const std::lock_guard lock(mutex);
    outcomes.emplace(s, std::move(outcome));
    return pv;
  };
  SearchOptions opts{cfg.alpha, cfg.max_set_size, cfg.early_stopping, cfg.threads};
  auto search = search_sets(pool, tester, opts);

  IcpResult result;
  result.accepted = std::move(search.accepted);
  result.s_hat = std::move(search.s_hat);
  result.model_rejected = search.model_rejected;
  result.stopped_early = search.stopped_early;
  result.best_p = search.best_p;
  result.tested_count = search.tested_count;
  result.candidate_pool = std::move(pool);
  if (!settle_interval_status(result, cfg.gof_cutoff, d.p())) return result;

  for (const auto& a : result.accepted) {
    SetRegion region;
    region.set = a.set;
    const auto k = static_cast<Index>(a.set.size());
    region.center.resize(k);
    region.half_width.resize(k);
    const auto it = outcomes.find(a.set);
    const GridSpec grid = default_grid(d, a.set, grid_opts);
    for (Index j = 0; j < k; ++j) {
      region.center(j) = it != outcomes.end() && it->second.best_gamma
                             ? (*it->second.best_gamma)(a.set[static_cast<std::size_t>(j)])
                             : 0.0;
      region.half_width(j) = 0.5 * grid.spacing(j);
    }
    result.regions.push_back(std::move(region));
  }
  result.intervals = union_intervals(d.p(), result.regions);
  return result;
}

HiddenScenario hidden_iv_scenario(int p, Index n_per_env, Rng& rng, double z_scale) {
  if (p < 2) throw Error(ErrorKind::DomainError, "hidden scenario needs p >= 2");
  if (n_per_env < 8) throw Error(ErrorKind::DomainError, "hidden scenario needs at least 8 rows per environment");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution negative(0.5);
  auto signed_uniform = [&](double lo, double hi) {
    const double mag = lo + (hi - lo) * unit(rng);
    return negative(rng) ? -mag : mag;
  };

  Eigen::VectorXd loading(p);
  Eigen::VectorXd z_sd(p);
  for (int j = 0; j < p; ++j) {
    loading(j) = signed_uniform(0.5, 1.5);
    z_sd(j) = 1.0 + unit(rng);
  }
  const double hidden_effect = signed_uniform(0.5, 1.0);

  IndexSet s_star;
  do {
    s_star.clear();
    for (int j = 0; j < p; ++j)
      if (unit(rng) < 0.5) s_star.push_back(j);
  } while (s_star.empty() || static_cast<int>(s_star.size()) == p);
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(p);
  for (Index j : s_star) gamma(j) = signed_uniform(0.5, 1.5);

  const Index n = 2 * n_per_env;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  std::vector<int> env(static_cast<std::size_t>(n));
  std::normal_distribution<double> std_normal(0.0, 1.0);
  for (Index i = 0; i < n; ++i) {
    const bool shifted = i >= n_per_env;
    env[static_cast<std::size_t>(i)] = shifted ? 2 : 1;
    const double h = std_normal(rng);
    for (int j = 0; j < p; ++j) {
      x(i, j) = loading(j) * h + std_normal(rng);
      if (shifted) x(i, j) += z_scale * z_sd(j) * std_normal(rng);
    }
    y(i) = x.row(i).dot(gamma) + hidden_effect * h + std_normal(rng);
  }
  std::vector<std::string> names;
  for (int j = 0; j < p; ++j) names.push_back("X" + std::to_string(j + 1));
  return {Dataset(std::move(x), std::move(y), std::move(env), std::move(names), "Y"), std::move(gamma),
          std::move(s_star)};
}

}  // namespace icp
