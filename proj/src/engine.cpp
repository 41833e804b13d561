#include "icp/engine.hpp"

#include "icp/distributions.hpp"
#include "icp/errors.hpp"
#include "icp/ols.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

namespace icp {
namespace {

std::vector<double> test_level(const std::vector<IndexSet>& sets, const SetTester& tester, unsigned threads) {
  std::vector<double> p(sets.size(), 0.0);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(threads, sets.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < sets.size(); ++i) p[i] = tester(sets[i]);
    return p;
  }
  std::vector<std::exception_ptr> errors(sets.size());
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < sets.size(); i = next++) {
          try {
            p[i] = tester(sets[i]);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  return p;
}

IndexSet all_columns(const Dataset& d) {
  IndexSet s(static_cast<std::size_t>(d.p()));
  std::iota(s.begin(), s.end(), Index{0});
  return s;
}

Interval empty_interval() {
  Interval iv;
  iv.empty = true;
  return iv;
}

Interval unbounded_interval() {
  Interval iv;
  iv.lo = -std::numeric_limits<double>::infinity();
  iv.hi = std::numeric_limits<double>::infinity();
  iv.contains_zero = true;
  iv.unbounded = true;
  return iv;
}

SetTester base_tester(const Dataset& d, const IcpConfig& cfg) {
  if (d.num_envs() < 2) return [](const IndexSet&) { return 1.0; };
  return [&d, method = cfg.method, cap = cfg.subsample_cap, seed = cfg.seed](const IndexSet& s) {
    return invariance_test(d, s, method, cap, seed).p_value;
  };
}

IcpResult assemble(const Dataset& d, const IcpConfig& cfg, IndexSet pool, SearchOutcome outcome) {
  IcpResult result;
  result.accepted = std::move(outcome.accepted);
  result.s_hat = std::move(outcome.s_hat);
  result.model_rejected = outcome.model_rejected;
  result.stopped_early = outcome.stopped_early;
  result.best_p = outcome.best_p;
  result.tested_count = outcome.tested_count;
  result.candidate_pool = std::move(pool);
  attach_intervals(d, cfg.alpha, cfg.gof_cutoff, result);
  return result;
}

}  // namespace

bool SetRegion::contains(const Eigen::VectorXd& gamma, double tol) const {
  for (Index k = 0; k < gamma.size(); ++k) {
    const auto it = std::lower_bound(set.begin(), set.end(), k);
    if (it == set.end() || *it != k) {
      if (std::fabs(gamma(k)) > tol) return false;
      continue;
    }
    const auto j = static_cast<Index>(it - set.begin());
    if (std::fabs(gamma(k) - center(j)) > half_width(j) + tol) return false;
  }
  return true;
}

bool IcpResult::covers(const Eigen::VectorXd& gamma, double tol) const {
  return std::any_of(regions.begin(), regions.end(), [&](const SetRegion& r) { return r.contains(gamma, tol); });
}

SearchOutcome search_sets(const IndexSet& pool, const SetTester& tester, const SearchOptions& opts) {
  SearchOutcome out;
  std::size_t max_k = pool.size();
  if (opts.max_set_size) max_k = std::min(max_k, static_cast<std::size_t>(std::max(0, *opts.max_set_size)));
  std::optional<IndexSet> running;

  for (std::size_t k = 0; k <= max_k; ++k) {
    const auto sets = combinations(pool, k);
    const auto p = test_level(sets, tester, opts.threads);
    out.tested_count += sets.size();
    for (std::size_t i = 0; i < sets.size(); ++i) {
      out.best_p = std::max(out.best_p, p[i]);
      if (p[i] > opts.alpha) {
        out.accepted.push_back({sets[i], p[i]});
        running = running ? intersect(*running, sets[i]) : sets[i];
      }
    }
    if (opts.early_stopping && k < max_k && running && running->empty()) {
      out.stopped_early = true;
      break;
    }
  }
  out.model_rejected = out.accepted.empty();
  if (running) out.s_hat = *running;
  return out;
}

void check_config(const Dataset& d, const IcpConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw Error(ErrorKind::InfeasibleConfig, "alpha must lie in (0, 1)");
  if (cfg.max_set_size && (*cfg.max_set_size < 0 || *cfg.max_set_size > d.p()))
    throw Error(ErrorKind::InfeasibleConfig, "max_set_size must lie in [0, p]");
  if (cfg.preselect_q && (*cfg.preselect_q < 1 || *cfg.preselect_q > d.p()))
    throw Error(ErrorKind::InfeasibleConfig, "preselect_q must lie in [1, p]");
  if (cfg.robust_v < 0 || cfg.robust_v >= d.num_envs())
    throw Error(ErrorKind::InfeasibleConfig, "robust_v must lie in [0, E)");
  if (!(cfg.gof_cutoff >= 0.0 && cfg.gof_cutoff <= 1.0))
    throw Error(ErrorKind::InfeasibleConfig, "gof_cutoff must lie in [0, 1]");
}

ConfidenceRegions confidence_intervals(const Dataset& d, const std::vector<IndexSet>& accepted, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::DomainError, "alpha must lie in (0, 1)");
  ConfidenceRegions out;
  for (const auto& s : accepted) {
    SetRegion region;
    region.set = s;
    if (!s.empty()) {
      const auto fit = ols_fit(d.x()(Eigen::all, s), d.y());
      const auto k = static_cast<double>(s.size());
      const double t = t_quantile(1.0 - alpha / (2.0 * k), static_cast<double>(fit.df_resid));
      region.center = fit.coef.tail(static_cast<Index>(s.size()));
      region.half_width.resize(static_cast<Index>(s.size()));
      for (Index j = 0; j < region.half_width.size(); ++j) region.half_width(j) = t * fit.std_error(j + 1);
    }
    out.regions.push_back(std::move(region));
  }

  out.intervals = union_intervals(d.p(), out.regions);
  return out;
}

std::vector<Interval> union_intervals(Index p, const std::vector<SetRegion>& regions) {
  std::vector<Interval> out(static_cast<std::size_t>(p));
  for (Index k = 0; k < p; ++k) {
    auto& iv = out[static_cast<std::size_t>(k)];
    if (regions.empty()) {
      iv = empty_interval();
      continue;
    }
    for (const auto& r : regions) {
      const auto it = std::lower_bound(r.set.begin(), r.set.end(), k);
      if (it != r.set.end() && *it == k) {
        const auto j = static_cast<Index>(it - r.set.begin());
        iv.pieces.emplace_back(r.center(j) - r.half_width(j), r.center(j) + r.half_width(j));
      } else {
        iv.pieces.emplace_back(0.0, 0.0);
      }
    }
    iv.lo = std::numeric_limits<double>::infinity();
    iv.hi = -std::numeric_limits<double>::infinity();
    for (const auto& [lo, hi] : iv.pieces) {
      iv.lo = std::min(iv.lo, lo);
      iv.hi = std::max(iv.hi, hi);
      iv.contains_zero = iv.contains_zero || (lo <= 0.0 && 0.0 <= hi);
    }
  }
  return out;
}

bool settle_interval_status(IcpResult& result, double gof_cutoff, Index p) {
  const auto np = static_cast<std::size_t>(p);
  if (!result.model_rejected && result.best_p < gof_cutoff) {
    result.model_rejected = true;
    result.s_hat.clear();
  }
  if (result.model_rejected) {
    result.intervals.assign(np, empty_interval());
    result.regions.clear();
    return false;
  }
  if (result.stopped_early) {
    result.intervals.assign(np, unbounded_interval());
    result.regions.clear();
    return false;
  }
  return true;
}

void attach_intervals(const Dataset& d, double alpha, double gof_cutoff, IcpResult& result) {
  if (!settle_interval_status(result, gof_cutoff, d.p())) return;
  std::vector<IndexSet> sets;
  sets.reserve(result.accepted.size());
  for (const auto& a : result.accepted) sets.push_back(a.set);
  auto ci = confidence_intervals(d, sets, alpha);
  result.intervals = std::move(ci.intervals);
  result.regions = std::move(ci.regions);
}

IndexSet preselect(const Dataset& d, int q) {
  const Index p = d.p();
  const Index take = std::clamp<Index>(q, 0, p);
  const Eigen::VectorXd yc = d.y().array() - d.y().mean();
  const double y_norm = yc.norm();
  std::vector<std::pair<double, Index>> score;
  score.reserve(static_cast<std::size_t>(p));
  for (Index k = 0; k < p; ++k) {
    const Eigen::VectorXd xc = d.x().col(k).array() - d.x().col(k).mean();
    const double x_norm = xc.norm();
    const double corr = (x_norm == 0.0 || y_norm == 0.0) ? 0.0 : std::fabs(xc.dot(yc)) / (x_norm * y_norm);
    score.emplace_back(corr, k);
  }
  std::stable_sort(score.begin(), score.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  IndexSet out;
  for (Index i = 0; i < take; ++i) out.push_back(score[static_cast<std::size_t>(i)].second);
  return make_index_set(std::move(out));
}

IcpResult run_icp(const Dataset& d, const IcpConfig& cfg) {
  check_config(d, cfg);
  if (cfg.robust_v > 0) return run_icp_robust(d, cfg);
  IndexSet pool = cfg.preselect_q ? preselect(d, *cfg.preselect_q) : all_columns(d);
  SearchOptions opts{cfg.alpha, cfg.max_set_size, cfg.early_stopping, cfg.threads};
  auto outcome = search_sets(pool, base_tester(d, cfg), opts);
  return assemble(d, cfg, std::move(pool), std::move(outcome));
}

IcpResult run_icp_robust(const Dataset& d, const IcpConfig& cfg) {
  check_config(d, cfg);
  const int num_envs = d.num_envs();
  IcpConfig base = cfg;
  base.robust_v = 0;
  if (cfg.robust_v == 0) return run_icp(d, base);

  IndexSet labels(static_cast<std::size_t>(num_envs));
  std::iota(labels.begin(), labels.end(), Index{1});
  std::vector<Dataset> restricted;
  bool has_singleton = false;
  for (int m = num_envs - cfg.robust_v; m <= num_envs; ++m) {
    if (m == 1) {
      has_singleton = true;
      continue;
    }
    for (const auto& subset : combinations(labels, static_cast<std::size_t>(m))) {
      std::vector<int> envs(subset.begin(), subset.end());
      restricted.push_back(restrict_environments(d, envs));
    }
  }

  SetTester tester = [&](const IndexSet& s) {
    if (has_singleton) return 1.0;
    double best = 0.0;
    for (const auto& r : restricted) {
      best = std::max(best, invariance_test(r, s, cfg.method, cfg.subsample_cap, cfg.seed).p_value);
      if (best >= 1.0) break;
    }
    return best;
  };
  IndexSet pool = cfg.preselect_q ? preselect(d, *cfg.preselect_q) : all_columns(d);
  SearchOptions opts{cfg.alpha, cfg.max_set_size, cfg.early_stopping, cfg.threads};
  auto outcome = search_sets(pool, tester, opts);
  return assemble(d, cfg, std::move(pool), std::move(outcome));
}

IcpResult brute_force_oracle(const Dataset& d, const IcpConfig& cfg) {
  if (d.p() > 12) throw Error(ErrorKind::InfeasibleConfig, "brute force oracle is limited to p <= 12");
  IcpConfig plain = cfg;
  plain.max_set_size.reset();
  plain.preselect_q.reset();
  check_config(d, plain);
  const IndexSet pool = all_columns(d);
  const SetTester tester = base_tester(d, plain);
  SearchOutcome out;
  std::optional<IndexSet> running;
  const auto p = static_cast<std::size_t>(d.p());
  for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
    IndexSet s;
    for (std::size_t k = 0; k < p; ++k)
      if (mask & (1u << k)) s.push_back(static_cast<Index>(k));
    const double pv = tester(s);
    ++out.tested_count;
    out.best_p = std::max(out.best_p, pv);
    if (pv > plain.alpha) {
      out.accepted.push_back({s, pv});
      running = running ? intersect(*running, s) : s;
    }
  }
  // Report accepted sets in the engine's enumeration order.
  std::stable_sort(out.accepted.begin(), out.accepted.end(), [](const AcceptedSet& a, const AcceptedSet& b) {
    return a.set.size() != b.set.size() ? a.set.size() < b.set.size() : a.set < b.set;
  });
  out.model_rejected = out.accepted.empty();
  if (running) out.s_hat = *running;
  return assemble(d, plain, pool, std::move(out));
}

}  // namespace icp
