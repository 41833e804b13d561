#include "icp/report.hpp"

#include "icp/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace icp {

using nlohmann::json;

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

namespace {

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

AnalysisReport make_report(const Dataset& d, const IcpResult& r, const ReportConfig& cfg) {
  AnalysisReport rep;
  rep.config = cfg;
  rep.config.alpha = round12(cfg.alpha);
  rep.config.gof_cutoff = round12(cfg.gof_cutoff);
  rep.predictors = d.names();
  rep.n = d.n();
  for (int e = 1; e <= d.num_envs(); ++e) rep.environment_sizes.push_back(d.env_size(e));
  for (const auto& a : r.accepted) rep.accepted.push_back({set_names(d, a.set), round12(a.p_value)});
  rep.s_hat = set_names(d, r.s_hat);
  for (Index k = 0; k < d.p() && k < static_cast<Index>(r.intervals.size()); ++k) {
    const auto& iv = r.intervals[static_cast<std::size_t>(k)];
    rep.intervals.push_back({d.names()[static_cast<std::size_t>(k)], round12(iv.lo), round12(iv.hi), iv.contains_zero,
                             iv.empty, iv.unbounded});
  }
  rep.model_rejected = r.model_rejected;
  rep.stopped_early = r.stopped_early;
  rep.best_p = round12(r.best_p);
  rep.tested_count = static_cast<std::int64_t>(r.tested_count);
  rep.joint_coverage = round12(1.0 - 2.0 * cfg.alpha);
  rep.notes.push_back("intervals jointly cover the causal coefficients with probability at least 1 - 2 alpha");
  if (r.stopped_early)
    rep.notes.push_back("search stopped once the intersection was empty; intervals are unbounded");
  if (cfg.method == "hidden")
    rep.notes.push_back("hidden-variable intervals are best grid point boxes and only as fine as the grid");
  return rep;
}

json to_json(const AnalysisReport& r) {
  json config{{"target", r.config.target},
              {"environments", r.config.environments},
              {"alpha", r.config.alpha},
              {"method", r.config.method},
              {"max_set_size", opt(r.config.max_set_size)},
              {"preselect", opt(r.config.preselect)},
              {"gof_cutoff", r.config.gof_cutoff},
              {"robust_v", r.config.robust_v},
              {"seed", r.config.seed},
              {"subsample_cap", opt(r.config.subsample_cap)},
              {"early_stopping", r.config.early_stopping}};
  json accepted = json::array();
  for (const auto& a : r.accepted) accepted.push_back({{"variables", a.variables}, {"p_value", a.p_value}});
  json intervals = json::array();
  for (const auto& iv : r.intervals)
    intervals.push_back({{"variable", iv.variable},
                         {"lo", num_or_null(iv.empty ? NAN : iv.lo)},
                         {"hi", num_or_null(iv.empty ? NAN : iv.hi)},
                         {"contains_zero", iv.contains_zero},
                         {"empty", iv.empty},
                         {"unbounded", iv.unbounded}});
  json j{{"schema_version", r.schema_version},
         {"config", config},
         {"predictors", r.predictors},
         {"n", r.n},
         {"environment_sizes", r.environment_sizes},
         {"accepted", accepted},
         {"s_hat", r.s_hat},
         {"intervals", intervals},
         {"model_rejected", r.model_rejected},
         {"stopped_early", r.stopped_early},
         {"best_p", r.best_p},
         {"tested_count", r.tested_count},
         {"joint_coverage", r.joint_coverage},
         {"notes", r.notes}};
  if (r.runtime_seconds) j["runtime_seconds"] = *r.runtime_seconds;
  return j;
}

AnalysisReport analysis_report_from_json(const json& j) {
  try {
    AnalysisReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kSchemaVersion) throw Error(ErrorKind::MalformedInput, "unsupported schema_version");
    const auto& c = j.at("config");
    r.config.target = c.at("target").get<std::string>();
    r.config.environments = c.at("environments").get<std::string>();
    r.config.alpha = c.at("alpha").get<double>();
    r.config.method = c.at("method").get<std::string>();
    r.config.max_set_size = get_opt<int>(c, "max_set_size");
    r.config.preselect = get_opt<int>(c, "preselect");
    r.config.gof_cutoff = c.at("gof_cutoff").get<double>();
    r.config.robust_v = c.at("robust_v").get<int>();
    r.config.seed = c.at("seed").get<std::uint64_t>();
    r.config.subsample_cap = get_opt<std::int64_t>(c, "subsample_cap");
    r.config.early_stopping = c.at("early_stopping").get<bool>();
    r.predictors = j.at("predictors").get<std::vector<std::string>>();
    r.n = j.at("n").get<std::int64_t>();
    r.environment_sizes = j.at("environment_sizes").get<std::vector<std::int64_t>>();
    for (const auto& a : j.at("accepted"))
      r.accepted.push_back({a.at("variables").get<std::vector<std::string>>(), a.at("p_value").get<double>()});
    r.s_hat = j.at("s_hat").get<std::vector<std::string>>();
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (const auto& iv : j.at("intervals")) {
      ReportInterval out;
      out.variable = iv.at("variable").get<std::string>();
      out.contains_zero = iv.at("contains_zero").get<bool>();
      out.empty = iv.at("empty").get<bool>();
      out.unbounded = iv.at("unbounded").get<bool>();
      out.lo = out.empty ? 0.0 : get_opt<double>(iv, "lo").value_or(-inf);
      out.hi = out.empty ? 0.0 : get_opt<double>(iv, "hi").value_or(inf);
      r.intervals.push_back(out);
    }
    r.model_rejected = j.at("model_rejected").get<bool>();
    r.stopped_early = j.at("stopped_early").get<bool>();
    r.best_p = j.at("best_p").get<double>();
    r.tested_count = j.at("tested_count").get<std::int64_t>();
    r.joint_coverage = j.at("joint_coverage").get<double>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    r.runtime_seconds = get_opt<double>(j, "runtime_seconds");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedInput, e.what());
  }
}

std::string serialize(const json& j) { return j.dump(2) + "\n"; }

json to_json(const ScenarioParams& p) {
  return {{"n_obs", p.n_obs},
          {"n_int", p.n_int},
          {"p", p.p},
          {"k_avg", round12(p.k_avg)},
          {"lb1", round12(p.lb1)},
          {"delta_b1", round12(p.delta_b1)},
          {"sigma2_min", round12(p.sigma2_min)},
          {"sigma2_max", round12(p.sigma2_max)},
          {"a_min", round12(p.a_min)},
          {"delta_a", round12(p.delta_a)},
          {"coef_change", p.coef_change},
          {"lb2", round12(p.lb2)},
          {"ub2", round12(p.ub2)},
          {"single_intervention", p.single_intervention},
          {"theta", round12(p.theta)}};
}

ScenarioParams scenario_params_from_json(const json& j) {
  try {
    ScenarioParams p;
    p.n_obs = j.at("n_obs").get<int>();
    p.n_int = j.at("n_int").get<int>();
    p.p = j.at("p").get<int>();
    p.k_avg = j.at("k_avg").get<double>();
    p.lb1 = j.at("lb1").get<double>();
    p.delta_b1 = j.at("delta_b1").get<double>();
    p.sigma2_min = j.at("sigma2_min").get<double>();
    p.sigma2_max = j.at("sigma2_max").get<double>();
    p.a_min = j.at("a_min").get<double>();
    p.delta_a = j.at("delta_a").get<double>();
    p.coef_change = j.at("coef_change").get<bool>();
    p.lb2 = j.at("lb2").get<double>();
    p.ub2 = j.at("ub2").get<double>();
    p.single_intervention = j.at("single_intervention").get<bool>();
    p.theta = j.at("theta").get<double>();
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedInput, e.what());
  }
}

json to_json(const SemSpec& s) {
  json edges = json::array();
  for (Index j = 0; j < s.beta.rows(); ++j)
    for (Index k = 0; k < s.beta.cols(); ++k)
      if (s.beta(j, k) != 0.0) edges.push_back({{"child", j}, {"parent", k}, {"weight", round12(s.beta(j, k))}});
  json sigma = json::array();
  for (Index j = 0; j < s.sigma.size(); ++j) sigma.push_back(round12(s.sigma(j)));
  json fixed = json::object();
  for (const auto& [node, value] : s.fixed) fixed[s.names[static_cast<std::size_t>(node)]] = round12(value);
  return {{"names", s.names},
          {"target", s.target},
          {"beta", edges},
          {"sigma", sigma},
          {"fixed", fixed},
          {"intervened", s.intervened_nodes()}};
}

json scenario_to_json(const Scenario& s, std::uint64_t seed) {
  return {{"schema_version", kSchemaVersion},
          {"seed", seed},
          {"params", to_json(s.params)},
          {"observational", to_json(s.observational)},
          {"interventional", to_json(s.interventional)},
          {"intervened", s.intervened},
          {"target_intervened", s.target_intervened},
          {"parents", s.parents}};
}

}  // namespace icp
