#include "icp/dataset.hpp"

#include "icp/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <utility>

namespace icp {

Dataset::Dataset(Eigen::MatrixXd x, Eigen::VectorXd y, std::vector<int> env,
                 std::vector<std::string> names, std::string target_name)
    : x_(std::move(x)),
      y_(std::move(y)),
      env_(std::move(env)),
      names_(std::move(names)),
      target_name_(std::move(target_name)) {
  const Index n = x_.rows();
  if (n < 1) throw Error(ErrorKind::InvalidDataset, "dataset has no rows");
  if (x_.cols() < 1) throw Error(ErrorKind::InvalidDataset, "dataset has no predictors");
  if (y_.size() != n || static_cast<Index>(env_.size()) != n)
    throw Error(ErrorKind::InvalidDataset, "x, y and env lengths differ");
  if (static_cast<Index>(names_.size()) != x_.cols())
    throw Error(ErrorKind::InvalidDataset, "one name per predictor column required");
  if (!x_.allFinite() || !y_.allFinite())
    throw Error(ErrorKind::NonNumericValue, "non-finite entry in x or y");

  std::set<std::string> seen;
  for (const auto& name : names_) {
    if (name == target_name_)
      throw Error(ErrorKind::InvalidDataset, "predictor name equals target name: " + name);
    if (!seen.insert(name).second)
      throw Error(ErrorKind::InvalidDataset, "duplicate predictor name: " + name);
  }

  const int num_envs = *std::max_element(env_.begin(), env_.end());
  if (*std::min_element(env_.begin(), env_.end()) < 1)
    throw Error(ErrorKind::InvalidDataset, "environment labels must be >= 1");
  env_rows_.assign(static_cast<std::size_t>(num_envs), {});
  for (Index i = 0; i < n; ++i) env_rows_[static_cast<std::size_t>(env_[i] - 1)].push_back(i);
  for (int e = 1; e <= num_envs; ++e)
    if (env_rows_[static_cast<std::size_t>(e - 1)].empty())
      throw Error(ErrorKind::InvalidDataset, "environment " + std::to_string(e) + " has no rows");

  for (Index k = 0; k < x_.cols(); ++k) {
    const auto col = x_.col(k);
    if ((col.array() == col(0)).all()) constant_columns_.push_back(k);
  }
}

IndexList Dataset::rows_not_in(int e) const {
  IndexList out;
  out.reserve(static_cast<std::size_t>(n() - env_size(e)));
  for (Index i = 0; i < n(); ++i)
    if (env_[static_cast<std::size_t>(i)] != e) out.push_back(i);
  return out;
}

std::optional<Index> Dataset::column_index(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<Index>(it - names_.begin());
}

std::optional<std::size_t> RawTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view cell, std::size_t row, std::string_view column) {
  const auto text = trim(cell);
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw Error(ErrorKind::NonNumericValue, "row " + std::to_string(row + 1) + ", column '" +
                                                std::string(column) + "': '" + std::string(cell) + "'");
  }
  return value;
}

}  // namespace

Dataset validate_dataset(const RawTable& table, std::string_view target_col,
                         std::optional<std::string_view> env_col) {
  const auto target_idx = table.column(target_col);
  if (!target_idx) throw Error(ErrorKind::MissingColumn, std::string(target_col));
  std::optional<std::size_t> env_idx;
  if (env_col) {
    env_idx = table.column(*env_col);
    if (!env_idx) throw Error(ErrorKind::MissingColumn, std::string(*env_col));
    if (*env_idx == *target_idx)
      throw Error(ErrorKind::InvalidDataset, "target and environment columns coincide");
  }
  if (table.rows.size() < 2) throw Error(ErrorKind::SingleRow, "at least two data rows required");

  std::vector<std::size_t> predictor_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (c != *target_idx && (!env_idx || c != *env_idx)) predictor_cols.push_back(c);
  if (predictor_cols.empty()) throw Error(ErrorKind::InvalidDataset, "no predictor columns");

  const auto n = static_cast<Index>(table.rows.size());
  const auto p = static_cast<Index>(predictor_cols.size());
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  std::vector<int> env(static_cast<std::size_t>(n), 1);
  std::unordered_map<std::string, int> labels;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size())
      throw Error(ErrorKind::MalformedInput, "row " + std::to_string(r + 1) + " has " +
                                                 std::to_string(row.size()) + " fields, expected " +
                                                 std::to_string(table.header.size()));
    const auto i = static_cast<Index>(r);
    y(i) = parse_number(row[*target_idx], r, target_col);
    for (Index k = 0; k < p; ++k) {
      const auto c = predictor_cols[static_cast<std::size_t>(k)];
      x(i, k) = parse_number(row[c], r, table.header[c]);
    }
    if (env_idx) {
      std::string key(trim(row[*env_idx]));
      if (key.empty())
        throw Error(ErrorKind::NonNumericValue, "empty environment label in row " + std::to_string(r + 1));
      const auto next = static_cast<int>(labels.size()) + 1;
      env[r] = labels.try_emplace(std::move(key), next).first->second;
    }
  }

  std::vector<std::string> names;
  names.reserve(predictor_cols.size());
  for (auto c : predictor_cols) names.push_back(table.header[c]);
  return Dataset(std::move(x), std::move(y), std::move(env), std::move(names), std::string(target_col));
}

Dataset pool_environments(const Dataset& d, const EnvironmentGrouping& g) {
  const int num_envs = d.num_envs();
  std::vector<int> block_of(static_cast<std::size_t>(num_envs), 0);
  for (std::size_t b = 0; b < g.groups.size(); ++b) {
    if (g.groups[b].empty()) throw Error(ErrorKind::InvalidPartition, "empty block");
    for (int e : g.groups[b]) {
      if (e < 1 || e > num_envs)
        throw Error(ErrorKind::InvalidPartition, "label " + std::to_string(e) + " out of range");
      auto& slot = block_of[static_cast<std::size_t>(e - 1)];
      if (slot != 0) throw Error(ErrorKind::InvalidPartition, "label " + std::to_string(e) + " in two blocks");
      slot = static_cast<int>(b) + 1;
    }
  }
  for (int e = 1; e <= num_envs; ++e)
    if (block_of[static_cast<std::size_t>(e - 1)] == 0)
      throw Error(ErrorKind::InvalidPartition, "label " + std::to_string(e) + " not covered");

  std::vector<int> env(d.env().size());
  std::transform(d.env().begin(), d.env().end(), env.begin(),
                 [&](int e) { return block_of[static_cast<std::size_t>(e - 1)]; });
  return Dataset(d.x(), d.y(), std::move(env), d.names(), d.target_name());
}

SplitResult split_environments_by_variable(const Dataset& d, std::string_view split_col,
                                           const std::vector<double>& cutpoints, bool keep_split_column) {
  const auto col = d.column_index(split_col);
  if (!col) throw Error(ErrorKind::UnknownColumn, std::string(split_col));
  for (std::size_t i = 1; i < cutpoints.size(); ++i)
    if (!(cutpoints[i - 1] < cutpoints[i]))
      throw Error(ErrorKind::InvalidCutpoints, "cutpoints must be strictly increasing");
  for (double c : cutpoints)
    if (!std::isfinite(c)) throw Error(ErrorKind::InvalidCutpoints, "non-finite cutpoint");

  const Index n = d.n();
  std::vector<int> bin(static_cast<std::size_t>(n));
  std::vector<Index> counts(cutpoints.size() + 1, 0);
  for (Index i = 0; i < n; ++i) {
    const double v = d.x()(i, *col);
    const auto b = std::upper_bound(cutpoints.begin(), cutpoints.end(), v) - cutpoints.begin();
    bin[static_cast<std::size_t>(i)] = static_cast<int>(b);
    ++counts[static_cast<std::size_t>(b)];
  }

  SplitResult result{d, {}};
  std::vector<int> relabel(counts.size(), 0);
  int next = 1;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    if (counts[b] == 0) {
      result.dropped_bins.push_back(static_cast<int>(b));
    } else {
      relabel[b] = next++;
    }
  }
  std::vector<int> env(bin.size());
  std::transform(bin.begin(), bin.end(), env.begin(),
                 [&](int b) { return relabel[static_cast<std::size_t>(b)]; });

  if (keep_split_column) {
    result.data = Dataset(d.x(), d.y(), std::move(env), d.names(), d.target_name());
    return result;
  }
  std::vector<Index> keep;
  for (Index k = 0; k < d.p(); ++k)
    if (k != *col) keep.push_back(k);
  if (keep.empty()) throw Error(ErrorKind::InvalidDataset, "split column was the only predictor");
  std::vector<std::string> names;
  for (auto k : keep) names.push_back(d.names()[static_cast<std::size_t>(k)]);
  result.data = Dataset(d.x()(Eigen::all, keep), d.y(), std::move(env), std::move(names), d.target_name());
  return result;
}

Dataset restrict_environments(const Dataset& d, const std::vector<int>& envs) {
  std::vector<int> new_label(static_cast<std::size_t>(d.num_envs()), 0);
  for (std::size_t i = 0; i < envs.size(); ++i) {
    const int e = envs[i];
    if (e < 1 || e > d.num_envs() || new_label[static_cast<std::size_t>(e - 1)] != 0)
      throw Error(ErrorKind::InvalidPartition, "invalid environment subset");
    new_label[static_cast<std::size_t>(e - 1)] = static_cast<int>(i) + 1;
  }
  IndexList rows;
  std::vector<int> env;
  for (Index i = 0; i < d.n(); ++i) {
    const int label = new_label[static_cast<std::size_t>(d.env()[static_cast<std::size_t>(i)] - 1)];
    if (label != 0) {
      rows.push_back(i);
      env.push_back(label);
    }
  }
  return Dataset(d.x()(rows, Eigen::all), d.y()(rows), std::move(env), d.names(), d.target_name());
}

Dataset select_columns(const Dataset& d, const std::vector<Index>& columns) {
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (auto k : columns) {
    if (k < 0 || k >= d.p()) throw Error(ErrorKind::UnknownColumn, "column index " + std::to_string(k));
    names.push_back(d.names()[static_cast<std::size_t>(k)]);
  }
  return Dataset(d.x()(Eigen::all, columns), d.y(), d.env(), std::move(names), d.target_name());
}

Dataset add_columns(const Dataset& d, const Eigen::MatrixXd& extra,
                    const std::vector<std::string>& extra_names) {
  if (extra.rows() != d.n() || static_cast<Index>(extra_names.size()) != extra.cols())
    throw Error(ErrorKind::InvalidDataset, "extra columns do not match the dataset");
  Eigen::MatrixXd x(d.n(), d.p() + extra.cols());
  x << d.x(), extra;
  auto names = d.names();
  names.insert(names.end(), extra_names.begin(), extra_names.end());
  return Dataset(std::move(x), d.y(), d.env(), std::move(names), d.target_name());
}

}  // namespace icp
