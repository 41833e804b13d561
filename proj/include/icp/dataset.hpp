#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icp {

using Index = Eigen::Index;
using IndexList = std::vector<Index>;

/// Multi-environment regression data: predictors `x` (n x p), target `y`,
/// and an environment label per row in 1..E. Immutable once constructed;
/// the constructor enforces every invariant and throws icp::Error otherwise.
class Dataset {
public:
  Dataset(Eigen::MatrixXd x, Eigen::VectorXd y, std::vector<int> env,
          std::vector<std::string> names, std::string target_name);

  const Eigen::MatrixXd& x() const noexcept { return x_; }
  const Eigen::VectorXd& y() const noexcept { return y_; }
  const std::vector<int>& env() const noexcept { return env_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& target_name() const noexcept { return target_name_; }

  Index n() const noexcept { return x_.rows(); }
  Index p() const noexcept { return x_.cols(); }
  int num_envs() const noexcept { return static_cast<int>(env_rows_.size()); }

  /// Rows belonging to environment `e` (1-based), in ascending order.
  const IndexList& rows_of(int e) const { return env_rows_.at(static_cast<std::size_t>(e - 1)); }
  IndexList rows_not_in(int e) const;
  Index env_size(int e) const { return static_cast<Index>(rows_of(e).size()); }

  std::optional<Index> column_index(std::string_view name) const;

  /// Predictor columns with zero variance over the pooled data.
  const std::vector<Index>& constant_columns() const noexcept { return constant_columns_; }

private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  std::vector<int> env_;
  std::vector<std::string> names_;
  std::string target_name_;
  std::vector<IndexList> env_rows_;
  std::vector<Index> constant_columns_;
};

/// Header plus string cells, as read from a CSV file.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
};

/// Partition of environment labels 1..E into pooled blocks. Block b of the
/// grouping becomes environment b+1 of the pooled dataset.
struct EnvironmentGrouping {
  std::vector<std::vector<int>> groups;
};

/// Builds a Dataset from a raw table. Environment labels are relabeled
/// 1..E in order of first appearance. Without `env_col` every row is in
/// environment 1. All columns other than target and env become predictors.
Dataset validate_dataset(const RawTable& table, std::string_view target_col,
                         std::optional<std::string_view> env_col);

Dataset pool_environments(const Dataset& d, const EnvironmentGrouping& g);

struct SplitResult {
  Dataset data;
  std::vector<int> dropped_bins;  // 0-based bin indices that were empty
};

/// New environments are the bins of `split_col` under `cutpoints`: a value v
/// falls into bin #{c in cutpoints : c <= v}. Empty bins are dropped and the
/// rest relabeled contiguously. The split column leaves the predictor set
/// unless `keep_split_column` is set.
SplitResult split_environments_by_variable(const Dataset& d, std::string_view split_col,
                                           const std::vector<double>& cutpoints,
                                           bool keep_split_column = false);

/// Rows of the listed environments only, relabeled 1..|envs| in the given order.
Dataset restrict_environments(const Dataset& d, const std::vector<int>& envs);

/// Same rows, predictors reordered (or subset) by `columns`.
Dataset select_columns(const Dataset& d, const std::vector<Index>& columns);

/// Appends `extra` as new predictor columns.
Dataset add_columns(const Dataset& d, const Eigen::MatrixXd& extra,
                    const std::vector<std::string>& extra_names);

}  // namespace icp
