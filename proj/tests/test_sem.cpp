#include "icp/errors.hpp"
#include "icp/fixtures.hpp"
#include "icp/invariance_tests.hpp"
#include "icp/scenario.hpp"
#include "icp/sem.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace icp;

namespace {

Eigen::MatrixXd sample_cov(const Eigen::MatrixXd& s) {
  const Eigen::MatrixXd c = s.rowwise() - s.colwise().mean();
  return c.transpose() * c / static_cast<double>(s.rows() - 1);
}

SemSpec chain_fork() {
  // 0 -> 1 -> 3, 0 -> 2 -> 3, 3 -> 4
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(5, 5);
  beta(1, 0) = 0.9;
  beta(2, 0) = -0.6;
  beta(3, 1) = 0.7;
  beta(3, 2) = 1.1;
  beta(4, 3) = -0.5;
  Eigen::VectorXd sigma(5);
  sigma << 1.0, 0.5, 0.8, 0.6, 0.3;
  return make_sem(beta, sigma, 3);
}

}  // namespace

TEST_CASE("sample covariance matches the closed form") {
  const auto spec = chain_fork();
  Rng rng(1);
  const Eigen::MatrixXd s = sample(spec, 200000, rng);
  const Eigen::MatrixXd want = oracle::sem_covariance(spec.beta, spec.sigma);
  const Eigen::MatrixXd got = sample_cov(s);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j) {
      const double se = std::sqrt((want(i, i) * want(j, j) + want(i, j) * want(i, j)) / 200000.0);
      CHECK(std::fabs(got(i, j) - want(i, j)) < 5.0 * se);
    }
}

TEST_CASE("independent columns and chain covariance") {
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(3, 3);
  auto spec = make_sem(beta, Eigen::Vector3d(1.0, 2.0, 0.5), 2);
  spec.mu_shift << 1.0, -2.0, 0.0;
  Rng rng(2);
  const Eigen::MatrixXd s = sample(spec, 50000, rng);
  const Eigen::VectorXd mean = s.colwise().mean();
  CHECK(std::fabs(mean(0) - 1.0) < 4.0 * 1.0 / std::sqrt(50000.0));
  CHECK(std::fabs(mean(1) + 2.0) < 4.0 * 2.0 / std::sqrt(50000.0));
  const Eigen::MatrixXd c = sample_cov(s);
  CHECK(std::fabs(c(0, 1)) < 4.0 * 2.0 / std::sqrt(50000.0));

  Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(2, 2);
  chain(1, 0) = 1.0;
  const auto cs = make_sem(chain, Eigen::Vector2d(1.5, 1.0), 1);
  const Eigen::MatrixXd cc = sample_cov(sample(cs, 100000, rng));
  CHECK(cc(0, 1) == doctest::Approx(2.25).epsilon(0.03));
}

TEST_CASE("topological order and cycles") {
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(3, 3);
  beta(0, 2) = 1.0;
  beta(2, 1) = 1.0;
  const auto spec = make_sem(beta, Eigen::Vector3d::Ones(), 0);
  CHECK(spec.order == std::vector<Index>{1, 2, 0});
  CHECK(parents(spec, 0) == IndexSet{2});
  CHECK(parents(spec, 1).empty());
  beta(1, 0) = 1.0;
  CHECK_THROWS_AS(make_sem(beta, Eigen::Vector3d::Ones(), 0), Error);
  CHECK_THROWS_AS(make_sem(Eigen::MatrixXd::Zero(2, 2), Eigen::Vector3d::Ones(), 0), Error);
  CHECK_THROWS_AS(make_sem(Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d::Ones(), 2), Error);
}

TEST_CASE("appendix A parents") {
  const auto fx = make_fixture("appendix_a", 20, 1);
  CHECK(fx.s_star == IndexSet{0, 1});
  CHECK(fx.data.names() == std::vector<std::string>{"X2", "X3", "X4"});
  CHECK(fx.data.n() == 40);
  CHECK(fx.gamma_star(0) == -0.7);
  CHECK(fx.gamma_star(1) == 0.6);
}

TEST_CASE("do intervention") {
  const auto spec = chain_fork();
  CHECK_THROWS_AS(do_intervention(spec, {{3, 0.0}}), Error);
  try {
    do_intervention(spec, {{3, 0.0}});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TargetIntervened);
  }
  const auto over = do_intervention(spec, {{3, 1.0}}, true);
  CHECK(over.target_intervened());

  const auto leaf = do_intervention(spec, {{4, 2.5}});
  CHECK(leaf.beta.row(4).isZero());
  Rng rng(3);
  const Eigen::MatrixXd s = sample(leaf, 40000, rng);
  CHECK((s.col(4).array() == 2.5).all());
  const Eigen::MatrixXd want = oracle::sem_covariance(spec.beta, spec.sigma);
  CHECK(sample_cov(s)(3, 3) == doctest::Approx(want(3, 3)).epsilon(0.05));

  const auto same = do_intervention(spec, {});
  CHECK(same.beta == spec.beta);
  CHECK(same.fixed.empty());
  CHECK(same.intervened_nodes().empty());
}

TEST_CASE("noise intervention") {
  const auto spec = chain_fork();
  const auto ident = noise_intervention(spec, {{1, NoiseDraw::constant(1.0)}}, {{1, NoiseDraw::constant(0.0)}});
  Rng a(5), b(5);
  CHECK(sample(ident, 50, a).isApprox(sample(spec, 50, b)));

  CHECK_THROWS_AS(noise_intervention(spec, {{3, NoiseDraw::constant(2.0)}}, {}), Error);

  const auto scaled = noise_intervention(spec, {{0, NoiseDraw::constant(3.0)}}, {});
  CHECK(scaled.beta == spec.beta);
  Rng rng(6);
  const Eigen::MatrixXd s = sample(scaled, 40000, rng);
  CHECK(sample_cov(s)(0, 0) == doctest::Approx(9.0).epsilon(0.05));

  const auto shifted = noise_intervention(spec, {}, {{0, NoiseDraw::constant(2.0)}});
  const Eigen::MatrixXd t = sample(shifted, 40000, rng);
  CHECK(t.col(0).mean() == doctest::Approx(2.0).epsilon(0.02));
  CHECK(t.col(1).mean() == doctest::Approx(1.8).epsilon(0.03));

  const auto random_scale = noise_intervention(spec, {{0, NoiseDraw::uniform(0.0, std::sqrt(3.0))}}, {});
  const Eigen::MatrixXd r = sample(random_scale, 80000, rng);
  CHECK(sample_cov(r)(0, 0) == doctest::Approx(1.0).epsilon(0.04));
  CHECK(NoiseDraw::uniform(0.0, std::sqrt(3.0)).second_moment() == doctest::Approx(1.0));
}

TEST_CASE("parents stay invariant under interventions elsewhere") {
  const auto spec = chain_fork();
  int rejections = 0;
  const int reps = 300;
  for (int r = 0; r < reps; ++r) {
    Rng rng(100 + static_cast<std::uint64_t>(r));
    const auto e2 = do_intervention(spec, {{1, 1.5}, {4, -1.0}});
    const auto e3 = noise_intervention(spec, {{0, NoiseDraw::constant(2.0)}}, {{2, NoiseDraw::constant(1.0)}});
    const auto d = sem_samples_to_dataset(spec, {sample(spec, 100, rng), sample(e2, 100, rng), sample(e3, 100, rng)});
    rejections += method2_test(d, target_parent_columns(spec)).p_value <= 0.05;
  }
  CHECK(rejections / static_cast<double>(reps) <= 0.05 + 2.0 * std::sqrt(0.05 * 0.95 / reps));
}

TEST_CASE("columns of a dataset follow node order without the target") {
  const auto spec = chain_fork();
  CHECK(node_to_column(spec) == std::vector<Index>{0, 1, 2, -1, 3});
  CHECK(target_parent_columns(spec) == IndexSet{1, 2});
  Rng rng(1);
  const auto d = sem_samples_to_dataset(spec, {sample(spec, 10, rng), sample(spec, 12, rng)});
  CHECK(d.p() == 4);
  CHECK(d.num_envs() == 2);
  CHECK(d.target_name() == "X4");
}

TEST_CASE("benchmark parameters follow their ranges") {
  Rng rng(7);
  const int draws = 3000;
  std::map<int, int> n_obs, p_nodes;
  int single = 0, zero_delta = 0, coef = 0;
  for (int i = 0; i < draws; ++i) {
    const auto s = sample_scenario_params(rng);
    CHECK(s.n_obs % 100 == 0);
    CHECK((s.n_int >= 100 && s.n_int <= 500));
    CHECK((s.p >= 5 && s.p <= 40));
    CHECK((s.k_avg >= 1 && s.k_avg <= 4));
    CHECK((s.lb1 >= 0.1 - 1e-12 && s.lb1 <= 2.0 + 1e-12));
    CHECK(s.sigma2_max >= s.sigma2_min);
    CHECK((s.a_min >= 0.1 - 1e-12 && s.a_min <= 4.0 + 1e-12));
    CHECK(s.lb2 <= s.ub2);
    CHECK((1.0 / s.theta >= 1.1 - 1e-9 && 1.0 / s.theta <= 3.0 + 1e-9));
    ++n_obs[s.n_obs];
    ++p_nodes[s.p];
    single += s.single_intervention;
    zero_delta += s.delta_a == 0.0;
    coef += s.coef_change;
  }
  for (const auto& [v, c] : n_obs) CHECK(std::fabs(c - draws / 5.0) < 4.0 * std::sqrt(draws * 0.2 * 0.8));
  CHECK(p_nodes.size() == 36);
  auto near = [&](int count, double prob) { return std::fabs(count - draws * prob) < 4.0 * std::sqrt(draws * prob * (1 - prob)); };
  CHECK(near(single, 1.0 / 6.0));
  CHECK(near(zero_delta, 1.0 / 3.0));
  CHECK(near(coef, 1.0 / 3.0));
}

TEST_CASE("random SEM edge counts") {
  ScenarioParams params;
  params.p = 8;
  params.k_avg = 3;
  Rng rng(8);
  double edges = 0.0;
  const int draws = 2000;
  for (int i = 0; i < draws; ++i) edges += static_cast<double>((random_sem(params, rng).beta.array() != 0.0).count());
  // C(p, 2) pairs, each an edge with probability k / (p - 1)
  const double prob = 3.0 / 7.0;
  const double expected = 28.0 * prob;
  const double se = std::sqrt(28.0 * prob * (1 - prob) / draws);
  CHECK(std::fabs(edges / draws - expected) < 3.0 * se);

  params.k_avg = 7;
  const auto full = random_sem(params, rng);
  CHECK((full.beta.array() != 0.0).count() == 28);
  for (Index j = 0; j < 8; ++j)
    for (Index k = 0; k < 8; ++k)
      if (full.beta(j, k) != 0.0) {
        CHECK(std::fabs(full.beta(j, k)) >= params.lb1);
        CHECK(std::fabs(full.beta(j, k)) <= params.lb1 + params.delta_b1);
      }
}

TEST_CASE("scenario generation is deterministic and consistent") {
  Rng a(42), b(42);
  const auto x = generate_scenario(a);
  const auto y = generate_scenario(b);
  CHECK(x.scenario.observational.beta == y.scenario.observational.beta);
  CHECK(x.data.x() == y.data.x());
  CHECK(x.scenario.parents == target_parent_columns(x.scenario.observational));
  CHECK(x.data.n() == x.scenario.params.n_obs + x.scenario.params.n_int);
  CHECK(x.scenario.target_intervened == contains(x.scenario.intervened, x.scenario.observational.target));

  int with_target = 0;
  Rng c(3);
  for (int i = 0; i < 300; ++i) {
    const auto sc = make_scenario(sample_scenario_params(c), c);
    with_target += sc.target_intervened;
    if (sc.params.single_intervention) CHECK(sc.intervened.size() == 1);
  }
  CHECK(with_target > 0);
}

TEST_CASE("simultaneous noise interventions") {
  const auto spec = chain_fork();
  SimultaneousNoiseParams p;
  p.a_min = 2.0;
  p.delta_a = 0.0;
  p.theta = 1.0;
  Rng rng(9);
  const auto all = simultaneous_noise_scenario(spec, p, rng);
  CHECK(all.intervened_nodes().size() == 5);
  for (const auto& s : all.noise_scale) {
    REQUIRE(s.has_value());
    CHECK(s->kind == NoiseDraw::Kind::Constant);
    CHECK(s->a == 2.0);
  }
  p.single_intervention = true;
  p.coef_change = true;
  p.lb2 = p.ub2 = 1.5;
  Rng again(9), again2(9);
  const auto one = simultaneous_noise_scenario(spec, p, again);
  const auto twin = simultaneous_noise_scenario(spec, p, again2);
  REQUIRE(one.intervened_nodes().size() == 1);
  CHECK(one.beta == twin.beta);
  const Index j = one.intervened_nodes().front();
  for (Index k = 0; k < 5; ++k)
    if (spec.beta(j, k) != 0.0) CHECK(std::fabs(one.beta(j, k)) == 1.5);
}

TEST_CASE("do experiment shifts every non-target node") {
  const auto spec = chain_fork();
  Rng rng(10);
  const auto d = do_intervention_experiment(spec, 50, 1.0, 2.0, rng);
  CHECK(d.num_envs() == 5);
  for (int e = 2; e <= 5; ++e) {
    const auto rows = d.rows_of(e);
    int constant_cols = 0;
    for (Index k = 0; k < d.p(); ++k) {
      const Eigen::VectorXd col = d.x()(rows, k);
      constant_cols += (col.array() == col(0)).all();
    }
    CHECK(constant_cols == 1);
  }
  CHECK(node_means(spec).isZero());
}
