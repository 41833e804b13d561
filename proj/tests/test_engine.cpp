#include "icp/distributions.hpp"
#include "icp/engine.hpp"
#include "icp/errors.hpp"
#include "icp/fixtures.hpp"
#include "icp/scenario.hpp"
#include "icp/sem.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <map>
#include <random>
#include <set>

using namespace icp;

namespace {

// Random DAG over m nodes with the last node as target, plus one
// observational and one do-environment per non-target node.
struct Instance {
  Dataset data;
  IndexSet parents;
};

Instance random_instance(std::uint64_t seed, int m, Index n, double edge_prob = 0.5) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(m, m);
  for (int j = 1; j < m; ++j)
    for (int k = 0; k < j; ++k)
      if (u(rng) < edge_prob) beta(j, k) = (u(rng) < 0.5 ? -1 : 1) * (0.5 + u(rng));
  Eigen::VectorXd sigma(m);
  for (int j = 0; j < m; ++j) sigma(j) = 0.5 + u(rng);
  const auto target = static_cast<Index>(u(rng) * m);
  const SemSpec spec = make_sem(beta, sigma, target);
  return {do_intervention_experiment(spec, n, 1.0, 2.0, rng), target_parent_columns(spec)};
}

std::set<IndexSet> family(const IcpResult& r) {
  std::set<IndexSet> out;
  for (const auto& a : r.accepted) out.insert(a.set);
  return out;
}

}  // namespace

TEST_CASE("single environment accepts the empty set at once") {
  const auto d = restrict_environments(make_fixture("appendix_a", 200, 1).data, {1});
  const auto r = run_icp(d, IcpConfig{});
  CHECK(r.s_hat.empty());
  CHECK_FALSE(r.model_rejected);
  CHECK(r.tested_count == 1);
  REQUIRE(r.accepted.size() == 1);
  CHECK(r.accepted[0].set.empty());
}

TEST_CASE("appendix A golden family") {
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto fx = make_fixture("appendix_a", 1000, seed);
    IcpConfig cfg;
    cfg.early_stopping = false;
    const auto r = run_icp(fx.data, cfg);
    exact += family(r) == std::set<IndexSet>{{0, 1}, {0, 1, 2}} && r.s_hat == IndexSet{0, 1};
  }
  CHECK(exact >= 8);

  const auto fx = make_fixture("appendix_a", 1000, 3);
  CHECK(method1_test(fx.data, {1}).p_value < 0.01);
  CHECK(method2_test(fx.data, {2}).p_value < 0.01);
  CHECK(method2_test(fx.data, {2}).per_env[0].p_var < 1e-6);
}

TEST_CASE("large direct shift of the target rejects every model") {
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(3, 3);
  beta(1, 0) = 1.0;
  beta(2, 1) = 0.8;
  const SemSpec spec = make_sem(beta, Eigen::Vector3d(1, 1, 1), 1);
  Rng rng(4);
  auto shifted = spec;
  shifted.mu_shift(1) = 5.0;
  shifted.noise_scale[1] = NoiseDraw::constant(3.0);
  const auto d = sem_samples_to_dataset(spec, {sample(spec, 500, rng), sample(shifted, 500, rng)});
  const auto r = run_icp(d, IcpConfig{});
  CHECK(r.model_rejected);
  CHECK(r.s_hat.empty());
  CHECK(r.accepted.empty());
  for (const auto& iv : r.intervals) CHECK(iv.empty);
}

TEST_CASE("early stopping and parallel levels agree with the brute force oracle") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int m = 3 + static_cast<int>(seed % 5);
    const auto inst = random_instance(seed, m, 60);
    for (Method method : {Method::I, Method::II}) {
      IcpConfig cfg;
      cfg.method = method;
      cfg.threads = 3;
      const auto fast = run_icp(inst.data, cfg);
      const auto slow = brute_force_oracle(inst.data, cfg);
      CHECK(fast.s_hat == slow.s_hat);
      CHECK(fast.model_rejected == slow.model_rejected);
      if (!fast.stopped_early) {
        CHECK(family(fast) == family(slow));
        for (Index k = 0; k < inst.data.p(); ++k) {
          const auto& a = fast.intervals[static_cast<std::size_t>(k)];
          const auto& b = slow.intervals[static_cast<std::size_t>(k)];
          CHECK(a.empty == b.empty);
          if (!a.empty) {
            CHECK(std::fabs(a.lo - b.lo) <= 1e-12);
            CHECK(std::fabs(a.hi - b.hi) <= 1e-12);
            CHECK(a.contains_zero == b.contains_zero);
          }
        }
      } else {
        for (const auto& iv : fast.intervals) CHECK((iv.unbounded && iv.contains_zero));
        for (const auto& iv : slow.intervals) CHECK((iv.empty || iv.contains_zero));
      }
    }
  }
}

TEST_CASE("results do not depend on the thread count") {
  const auto inst = random_instance(77, 7, 80);
  IcpConfig one, many;
  one.threads = 1;
  many.threads = 4;
  one.early_stopping = many.early_stopping = false;
  const auto a = run_icp(inst.data, one);
  const auto b = run_icp(inst.data, many);
  REQUIRE(a.accepted.size() == b.accepted.size());
  for (std::size_t i = 0; i < a.accepted.size(); ++i) {
    CHECK(a.accepted[i].set == b.accepted[i].set);
    CHECK(a.accepted[i].p_value == b.accepted[i].p_value);
  }
  CHECK(a.tested_count == (Index{1} << inst.data.p()));
}

TEST_CASE("every set above alpha is listed and the intersection is s_hat") {
  const auto inst = random_instance(5, 5, 100);
  IcpConfig cfg;
  cfg.early_stopping = false;
  const auto r = run_icp(inst.data, cfg);
  std::set<IndexSet> expected;
  IndexSet pool{0, 1, 2, 3};
  for (std::size_t k = 0; k <= pool.size(); ++k)
    for (const auto& s : combinations(pool, k))
      if (method2_test(inst.data, s).p_value > cfg.alpha) expected.insert(s);
  CHECK(family(r) == expected);
  if (!expected.empty()) {
    IndexSet inter = *expected.begin();
    for (const auto& s : expected) inter = intersect(inter, s);
    CHECK(r.s_hat == inter);
  }
}

TEST_CASE("accepted families nest in alpha") {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const auto inst = random_instance(seed, 5, 80);
    IcpConfig loose, strict;
    loose.alpha = 0.5;
    strict.alpha = 0.01;
    loose.early_stopping = strict.early_stopping = false;
    const auto a = family(run_icp(inst.data, loose));
    const auto b = family(run_icp(inst.data, strict));
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST_CASE("variables outside s_hat have zero in their interval") {
  for (std::uint64_t seed = 30; seed < 45; ++seed) {
    const auto inst = random_instance(seed, 4, 120);
    IcpConfig cfg;
    cfg.early_stopping = seed % 2 == 0;
    const auto r = run_icp(inst.data, cfg);
    for (Index k = 0; k < inst.data.p(); ++k) {
      const auto& iv = r.intervals[static_cast<std::size_t>(k)];
      if (r.model_rejected) CHECK(iv.empty);
      else if (!contains(r.s_hat, k)) CHECK((iv.contains_zero && iv.lo <= 0.0 && iv.hi >= 0.0));
    }
  }
}

TEST_CASE("rectangle of a single set matches the t formula") {
  const auto fx = make_fixture("appendix_a", 300, 2);
  const auto ci = confidence_intervals(fx.data, {{0, 1}}, 0.05);
  const Eigen::MatrixXd xs = oracle::cols(fx.data.x(), {0, 1});
  const Eigen::VectorXd b = oracle::normal_equations(xs, fx.data.y());
  const Eigen::MatrixXd dsg = oracle::design(xs);
  const double s2 = (fx.data.y() - dsg * b).squaredNorm() / (600 - 3);
  const Eigen::MatrixXd inv = (dsg.transpose() * dsg).inverse();
  const double t = t_quantile(1.0 - 0.05 / 4.0, 597.0);
  for (Index j = 0; j < 2; ++j) {
    const auto& iv = ci.intervals[static_cast<std::size_t>(j)];
    const double half = t * std::sqrt(s2 * inv(j + 1, j + 1));
    CHECK(iv.lo == doctest::Approx(b(j + 1) - half).epsilon(1e-10));
    CHECK(iv.hi == doctest::Approx(b(j + 1) + half).epsilon(1e-10));
  }
  const auto& x4 = ci.intervals[2];
  CHECK(x4.lo == 0.0);
  CHECK(x4.hi == 0.0);
  CHECK(x4.contains_zero);
}

TEST_CASE("union keeps the exact pieces and the hull") {
  SetRegion a{{0}, Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, 0.5)};
  SetRegion b{{0, 1}, Eigen::Vector2d(4.0, -1.0), Eigen::Vector2d(0.25, 0.1)};
  const auto u = union_intervals(2, {a, b});
  CHECK(u[0].lo == 1.5);
  CHECK(u[0].hi == 4.25);
  CHECK_FALSE(u[0].contains_zero);
  CHECK(u[0].pieces.size() == 2);
  CHECK(u[1].lo == -1.1);
  CHECK(u[1].hi == 0.0);
  CHECK(u[1].contains_zero);
  CHECK(a.contains(Eigen::Vector2d(2.2, 0.0)));
  CHECK_FALSE(a.contains(Eigen::Vector2d(2.2, 0.1)));
  CHECK(b.contains(Eigen::Vector2d(3.9, -1.05)));
}

TEST_CASE("goodness of fit cutoff") {
  const auto fx = make_fixture("appendix_a", 500, 4);
  IcpConfig cfg;
  const auto plain = run_icp(fx.data, cfg);
  REQUIRE_FALSE(plain.model_rejected);
  cfg.gof_cutoff = std::min(1.0, plain.best_p + 1e-9);
  const auto cut = run_icp(fx.data, cfg);
  if (plain.best_p < 1.0) {
    CHECK(cut.model_rejected);
    CHECK(cut.s_hat.empty());
    for (const auto& iv : cut.intervals) CHECK(iv.empty);
  }
  cfg.gof_cutoff = plain.best_p;
  CHECK_FALSE(run_icp(fx.data, cfg).model_rejected);
}

TEST_CASE("robust variant") {
  const auto fx = make_fixture("remark_i", 300, 3);
  IcpConfig v0;
  v0.early_stopping = false;
  IcpConfig rv = v0;
  rv.robust_v = 0;
  CHECK(family(run_icp_robust(fx.data, rv)) == family(run_icp(fx.data, v0)));

  rv.robust_v = 2;  // E - 1
  const auto all = run_icp(fx.data, rv);
  CHECK(all.s_hat.empty());
  CHECK(all.accepted.size() == 4);

  // three environments, the third intervenes on Y directly
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(3, 3);
  beta(2, 0) = 1.0;
  beta(2, 1) = -1.0;
  const SemSpec spec = make_sem(beta, Eigen::Vector3d(1, 1, 0.5), 2);
  Rng rng(12);
  auto e2 = spec;
  e2.mu_shift(0) = 2.0;
  e2.mu_shift(1) = -1.5;
  auto e3 = spec;
  e3.mu_shift(2) = 3.0;
  const auto d = sem_samples_to_dataset(spec, {sample(spec, 400, rng), sample(e2, 400, rng), sample(e3, 400, rng)});
  IcpConfig strict;
  strict.early_stopping = false;
  CHECK_FALSE(family(run_icp(d, strict)).count({0, 1}));
  strict.robust_v = 1;
  const auto r = run_icp(d, strict);
  CHECK(family(r).count({0, 1}));
  CHECK(r.s_hat == IndexSet{0, 1});
}

TEST_CASE("preselection") {
  const auto inst = random_instance(3, 6, 50);
  CHECK(preselect(inst.data, static_cast<int>(inst.data.p())).size() == static_cast<std::size_t>(inst.data.p()));

  int hits = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd x(100, 20);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = nd(rng);
    Eigen::VectorXd y = 2.0 * x.col(0);
    for (Index i = 0; i < 100; ++i) y(i) += nd(rng);
    std::vector<std::string> names;
    for (int j = 0; j < 20; ++j) names.push_back("X" + std::to_string(j + 1));
    const Dataset d(x, y, std::vector<int>(100, 1), names, "Y");
    hits += contains(preselect(d, 5), 0);
  }
  CHECK(hits >= 198);

  Eigen::MatrixXd x(6, 3);
  x << 1, 5, 2, 2, 5, 1, 3, 5, 2, 4, 5, 1, 5, 5, 2, 6, 5, 1;
  const Eigen::VectorXd y = x.col(0) * 2.0;
  const Dataset d(x, y, {1, 1, 1, 2, 2, 2}, {"a", "c", "b"}, "y");
  CHECK(preselect(d, 2) == IndexSet{0, 2});
  CHECK(preselect(d, 1) == IndexSet{0});
}

TEST_CASE("column order does not matter") {
  for (std::uint64_t seed = 50; seed < 56; ++seed) {
    const auto inst = random_instance(seed, 5, 100);
    const std::vector<Index> perm{3, 1, 0, 2};
    const auto permuted = select_columns(inst.data, perm);
    const auto a = run_icp(inst.data, IcpConfig{});
    const auto b = run_icp(permuted, IcpConfig{});
    IndexSet mapped;
    for (auto k : b.s_hat) mapped.push_back(perm[static_cast<std::size_t>(k)]);
    CHECK(make_index_set(mapped) == a.s_hat);
  }
}

TEST_CASE("configuration checks") {
  const auto inst = random_instance(1, 4, 30);
  auto bad = [&](auto mutate) {
    IcpConfig cfg;
    mutate(cfg);
    try {
      run_icp(inst.data, cfg);
    } catch (const Error& e) {
      return e.kind() == ErrorKind::InfeasibleConfig;
    }
    return false;
  };
  CHECK(bad([](IcpConfig& c) { c.alpha = 0.0; }));
  CHECK(bad([](IcpConfig& c) { c.alpha = 1.0; }));
  CHECK(bad([](IcpConfig& c) { c.max_set_size = -1; }));
  CHECK(bad([](IcpConfig& c) { c.max_set_size = 9; }));
  CHECK(bad([](IcpConfig& c) { c.robust_v = 4; }));
  CHECK(bad([](IcpConfig& c) { c.gof_cutoff = 2.0; }));
  CHECK(bad([](IcpConfig& c) { c.preselect_q = 0; }));
}

TEST_CASE("max set size limits the search") {
  const auto inst = random_instance(8, 6, 80);
  IcpConfig cfg;
  cfg.max_set_size = 2;
  cfg.early_stopping = false;
  const auto r = run_icp(inst.data, cfg);
  CHECK(r.tested_count == 1 + 5 + 10);
  for (const auto& a : r.accepted) CHECK(a.set.size() <= 2);
}

TEST_CASE("false selections stay near alpha") {
  int errors = 0;
  const int reps = 300;
  for (int r = 0; r < reps; ++r) {
    const auto inst = random_instance(5000 + static_cast<std::uint64_t>(r), 4, 100);
    const auto res = run_icp(inst.data, IcpConfig{});
    errors += !is_subset(res.s_hat, inst.parents);
  }
  CHECK(errors / static_cast<double>(reps) <= 0.05 + 2.0 * std::sqrt(0.05 * 0.95 / reps));
}

TEST_CASE("pure noise predictors rarely enter s_hat") {
  int noise_hits = 0;
  const int reps = 150;
  for (int r = 0; r < reps; ++r) {
    const auto inst = random_instance(9000 + static_cast<std::uint64_t>(r), 3, 150);
    Rng rng(static_cast<std::uint64_t>(r));
    std::normal_distribution<double> nd;
    Eigen::MatrixXd extra(inst.data.n(), 2);
    for (Index i = 0; i < extra.size(); ++i) extra.data()[i] = nd(rng);
    const auto d = add_columns(inst.data, extra, {"N1", "N2"});
    const auto res = run_icp(d, IcpConfig{});
    noise_hits += contains(res.s_hat, d.p() - 1) || contains(res.s_hat, d.p() - 2);
  }
  CHECK(noise_hits / static_cast<double>(reps) <= 0.05 + 2.0 * std::sqrt(0.05 * 0.95 / reps));
}
