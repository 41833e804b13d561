#include "icp/benchmark.hpp"

#include "icp/csv.hpp"
#include "icp/errors.hpp"
#include "icp/report.hpp"

#include <atomic>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

namespace icp {
namespace {

std::string set_string(const IndexSet& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(s[i]);
  }
  return out;
}

void run_row(const Scenario& sc, const BenchmarkConfig& cfg, std::uint64_t scenario_seed, BenchmarkRow& row) {
  row.params = sc.params;
  row.target_intervened = sc.target_intervened;
  row.s_star = sc.parents;
  try {
    Rng rng = make_rng(scenario_seed, static_cast<std::uint64_t>(row.rep) + 1);
    const Dataset d = draw_scenario_dataset(sc, rng);
    IcpConfig icfg = cfg.icp;
    icfg.seed = derive_seed(scenario_seed, static_cast<std::uint64_t>(row.rep) + 0x10000);
    icfg.threads = 1;
    if (icfg.preselect_q && *icfg.preselect_q >= d.p()) icfg.preselect_q.reset();
    const IcpResult r = run_icp(d, icfg);
    row.s_hat = r.s_hat;
    row.model_rejected = r.model_rejected;
    row.success = r.s_hat == sc.parents;
    row.error = !is_subset(r.s_hat, sc.parents);
  } catch (const std::exception& e) {
    row.failed = true;
    row.message = e.what();
  }
}

}  // namespace

Proportion proportion(std::int64_t hits, std::int64_t total) {
  Proportion p;
  p.hits = hits;
  p.total = total;
  if (total == 0) return p;
  const double n = static_cast<double>(total);
  p.rate = static_cast<double>(hits) / n;
  p.se = std::sqrt(p.rate * (1.0 - p.rate) / n);
  constexpr double z = 1.959963984540054;
  const double denom = 1.0 + z * z / n;
  const double mid = (p.rate + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p.rate * (1.0 - p.rate) / n + z * z / (4.0 * n * n)) / denom;
  p.wilson_lo = std::max(0.0, mid - half);
  p.wilson_hi = std::min(1.0, mid + half);
  return p;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.scenarios < 1 || cfg.reps < 1) throw Error(ErrorKind::InfeasibleConfig, "scenarios and reps must be >= 1");
  BenchmarkReport rep;
  rep.config = cfg;

  std::vector<Scenario> scenarios;
  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < cfg.scenarios; ++s) {
    seeds.push_back(derive_seed(cfg.seed, static_cast<std::uint64_t>(s)));
    Rng rng(seeds.back());
    scenarios.push_back(make_scenario(sample_scenario_params(rng), rng));
  }

  const std::size_t total = static_cast<std::size_t>(cfg.scenarios) * static_cast<std::size_t>(cfg.reps);
  rep.rows.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    rep.rows[i].scenario = static_cast<int>(i / static_cast<std::size_t>(cfg.reps));
    rep.rows[i].rep = static_cast<int>(i % static_cast<std::size_t>(cfg.reps));
  }

  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      auto& row = rep.rows[i];
      const auto s = static_cast<std::size_t>(row.scenario);
      run_row(scenarios[s], cfg, seeds[s], row);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
  }

  std::int64_t ok = 0, hits = 0, errors = 0;
  for (const auto& row : rep.rows) {
    if (row.failed) {
      ++rep.failed;
      continue;
    }
    ++ok;
    hits += row.success;
    errors += row.error;
  }
  rep.success = proportion(hits, ok);
  rep.fwer = proportion(errors, ok);
  return rep;
}

void write_benchmark_csv(std::ostream& out, const BenchmarkReport& r) {
  out << "scenario,rep,n_obs,n_int,p,k_avg,lb1,delta_b1,sigma2_min,sigma2_max,a_min,delta_a,coef_change,lb2,ub2,"
         "single_intervention,theta,target_intervened,s_star,s_hat,success,error,model_rejected,failed,message\r\n";
  for (const auto& row : r.rows) {
    const auto& p = row.params;
    std::ostringstream line;
    line << row.scenario << ',' << row.rep << ',' << p.n_obs << ',' << p.n_int << ',' << p.p << ','
         << format_double(p.k_avg) << ',' << format_double(p.lb1) << ',' << format_double(p.delta_b1) << ','
         << format_double(p.sigma2_min) << ',' << format_double(p.sigma2_max) << ',' << format_double(p.a_min) << ','
         << format_double(p.delta_a) << ',' << int(p.coef_change) << ',' << format_double(p.lb2) << ','
         << format_double(p.ub2) << ',' << int(p.single_intervention) << ',' << format_double(p.theta) << ','
         << int(row.target_intervened) << ',' << csv_escape(set_string(row.s_star)) << ','
         << csv_escape(set_string(row.s_hat)) << ',' << int(row.success) << ',' << int(row.error) << ','
         << int(row.model_rejected) << ',' << int(row.failed) << ',' << csv_escape(row.message) << "\r\n";
    out << line.str();
  }
}

nlohmann::json benchmark_summary_json(const BenchmarkReport& r) {
  auto prop_json = [](const Proportion& p) {
    return nlohmann::json{{"hits", p.hits},
                          {"total", p.total},
                          {"rate", round12(p.rate)},
                          {"se", round12(p.se)},
                          {"wilson_lo", round12(p.wilson_lo)},
                          {"wilson_hi", round12(p.wilson_hi)}};
  };
  nlohmann::json per = nlohmann::json::array();
  for (int s = 0; s < r.config.scenarios; ++s) {
    std::int64_t ok = 0, hits = 0, errors = 0, failed = 0;
    const BenchmarkRow* first = nullptr;
    for (const auto& row : r.rows) {
      if (row.scenario != s) continue;
      if (!first) first = &row;
      if (row.failed) {
        ++failed;
        continue;
      }
      ++ok;
      hits += row.success;
      errors += row.error;
    }
    per.push_back({{"scenario", s},
                   {"params", to_json(first->params)},
                   {"target_intervened", first->target_intervened},
                   {"s_star", first->s_star},
                   {"success", prop_json(proportion(hits, ok))},
                   {"fwer", prop_json(proportion(errors, ok))},
                   {"failed", failed}});
  }
  return {{"schema_version", kSchemaVersion},
          {"scenarios", r.config.scenarios},
          {"reps", r.config.reps},
          {"seed", r.config.seed},
          {"alpha", round12(r.config.icp.alpha)},
          {"method", r.config.icp.method == Method::I ? "I" : "II"},
          {"runs", static_cast<std::int64_t>(r.rows.size())},
          {"failed", r.failed},
          {"success", prop_json(r.success)},
          {"fwer", prop_json(r.fwer)},
          {"per_scenario", per}};
}

}  // namespace icp
