#include "icp/fixtures.hpp"

#include "icp/errors.hpp"
#include "icp/hidden.hpp"
#include "icp/rng.hpp"
#include "icp/sem.hpp"

#include <cmath>

namespace icp {
namespace {

Fixture appendix_a(Index n, Rng& rng) {
  // nodes: X2, X3, X4, Y
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(4, 4);
  beta(1, 0) = 1.0;
  beta(3, 0) = -0.7;
  beta(3, 1) = 0.6;
  beta(2, 3) = -0.5;
  beta(2, 1) = 0.5;
  const Eigen::Vector4d sigma(0.3, 0.2, 0.1, 0.1);
  const std::vector<std::string> names{"X2", "X3", "X4", "Y"};
  const SemSpec e1 = make_sem(beta, sigma, 3, names);

  // second environment drops X2 -> X3 and widens the X3 noise
  Eigen::MatrixXd beta2 = beta;
  beta2(1, 0) = 0.0;
  Eigen::Vector4d sigma2 = sigma;
  sigma2(1) = 0.4;
  const SemSpec e2 = make_sem(beta2, sigma2, 3, names);

  std::vector<Eigen::MatrixXd> blocks{sample(e1, n, rng), sample(e2, n, rng)};
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(3);
  gamma << -0.7, 0.6, 0.0;
  return {sem_samples_to_dataset(e1, blocks), IndexSet{0, 1}, gamma};
}

Fixture remark_i(Index n, Rng& rng) {
  // nodes: X2, X3, Y
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(3, 3);
  beta(1, 0) = -1.0;
  beta(2, 0) = 1.0;
  beta(2, 1) = 1.0;
  const SemSpec obs = make_sem(beta, Eigen::Vector3d::Ones(), 2, {"X2", "X3", "Y"});
  const SemSpec do_x2 = do_intervention(obs, {{0, 0.0}});
  const SemSpec do_x3 = do_intervention(obs, {{1, 0.0}});
  std::vector<Eigen::MatrixXd> blocks{sample(obs, n, rng), sample(do_x2, n, rng), sample(do_x3, n, rng)};
  return {sem_samples_to_dataset(obs, blocks), IndexSet{0, 1}, Eigen::Vector2d(1.0, 1.0)};
}

Fixture remark_ii(Index n, Rng& rng) {
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(2, 2);
  beta(1, 0) = 1.0;
  const SemSpec obs = make_sem(beta, Eigen::Vector2d::Ones(), 1, {"X", "Y"});
  // A ~ U[0, sqrt 3] has E[A^2] = 1
  const SemSpec scaled = noise_intervention(obs, {{0, NoiseDraw::uniform(0.0, std::sqrt(3.0))}}, {});
  std::vector<Eigen::MatrixXd> blocks{sample(obs, n, rng), sample(scaled, n, rng)};
  return {sem_samples_to_dataset(obs, blocks), IndexSet{0}, Eigen::VectorXd::Ones(1)};
}

Fixture prop5(Index n, Rng& rng) {
  auto sc = hidden_iv_scenario(3, n, rng);
  return {std::move(sc.data), std::move(sc.s_star), std::move(sc.gamma_star)};
}

}  // namespace

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"appendix_a", "remark_i", "remark_ii", "prop5"};
  return names;
}

Fixture make_fixture(std::string_view name, Index n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::DomainError, "fixture needs n >= 1");
  Rng rng(seed);
  if (name == "appendix_a") return appendix_a(n, rng);
  if (name == "remark_i") return remark_i(n, rng);
  if (name == "remark_ii") return remark_ii(n, rng);
  if (name == "prop5") return prop5(n, rng);
  throw Error(ErrorKind::UnknownFixture, "unknown fixture '" + std::string(name) + "'");
}

}  // namespace icp
