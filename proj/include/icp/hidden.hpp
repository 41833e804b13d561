#pragma once

#include "icp/dataset.hpp"
#include "icp/engine.hpp"
#include "icp/index_set.hpp"
#include "icp/rng.hpp"

#include <Eigen/Dense>

#include <optional>

namespace icp {

/// Regular grid over coefficient vectors supported on a set S. Axis j takes
/// points_per_axis equally spaced values in center(j) +- half_widths(j).
struct GridSpec {
  Eigen::VectorXd center;
  Eigen::VectorXd half_widths;
  int points_per_axis = 11;

  double spacing(Index j) const;
  double num_points() const;
};

enum class GridCentering {
  PooledOls,  // center at pooled OLS, half-width c * SE
  Bracketed,  // span pooled OLS and the environment-moment estimate, plus c * SE
};

struct GridOptions {
  double se_multiplier = 6.0;
  int points_per_axis = 11;
  GridCentering centering = GridCentering::Bracketed;
};

inline constexpr double kMaxGridPoints = 1e7;

/// Grid for set S built from the pooled data. The environment-moment
/// estimate solves, for every e, equal means and equal covariances with
/// X_S of Y - X_S g between I_e and I_-e (least squares over all equations).
GridSpec default_grid(const Dataset& d, const IndexSet& s, const GridOptions& opts = {});

/// p-value for "Y - X gamma has the same distribution in every environment":
/// two-sample KS of each environment against the rest, Bonferroni over
/// environments. `gamma` has length p and must vanish outside `s`.
double hidden_invariance_test(const Dataset& d, const IndexSet& s, const Eigen::VectorXd& gamma);

/// Same test from precomputed residuals.
double residual_invariance_pvalue(const Dataset& d, const Eigen::VectorXd& residuals);

struct HiddenSetOutcome {
  bool accepted = false;
  std::optional<Eigen::VectorXd> best_gamma;  // length p
  double best_p = 0.0;
};

/// Brute-force search of the grid: accepted iff some grid point has p > alpha.
/// best_gamma is the first grid point (lexicographic grid index) with maximal p.
HiddenSetOutcome hidden_set_test(const Dataset& d, const IndexSet& s, const GridSpec& grid, double alpha);

/// Intersection of all sets whose hidden-confounding null is not rejected.
/// Intervals are the hull of best-gamma boxes (best gamma +- half the grid
/// spacing), so they are only as fine as the grid.
IcpResult run_hidden_icp(const Dataset& d, const IcpConfig& cfg, const GridOptions& grid = {});

struct HiddenScenario {
  Dataset data;
  Eigen::VectorXd gamma_star;
  IndexSet s_star;
};

/// Two environments labelled 1, 2 with n rows each (z_scale defaults to 2 so the
/// KS test has reasonable power at a few thousand rows):
///   X = H b + eta + z_scale * Z 1{env 2},  Y = X gamma* + c H + eps,
/// H ~ N(0, 1) hidden, eta ~ N(0, I_p), Z ~ N(0, diag(s_j^2)) with s_j ~ U[1, 2].
/// b_j, c and nonzero gamma*_j have random sign with magnitudes in
/// [0.5, 1.5], [0.5, 1] and [0.5, 1.5]; each predictor is causal with
/// probability 1/2, at least one is causal and at least one is not.
HiddenScenario hidden_iv_scenario(int p, Index n_per_env, Rng& rng, double z_scale = 2.0);

}  // namespace icp
