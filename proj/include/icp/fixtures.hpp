#pragma once

#include "icp/dataset.hpp"
#include "icp/index_set.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace icp {

/// A named ground-truth dataset: data plus the true causal set and coefficients.
struct Fixture {
  Dataset data;
  IndexSet s_star;
  Eigen::VectorXd gamma_star;  // one entry per predictor
};

/// appendix_a, remark_i, remark_ii or prop5 with n rows per environment.
/// Throws UnknownFixture for any other name.
Fixture make_fixture(std::string_view name, Index n, std::uint64_t seed);

const std::vector<std::string>& fixture_names();

}  // namespace icp
