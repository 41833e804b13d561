#pragma once

// Straightforward reference computations, deliberately written differently
// from the library (normal equations, explicit covariance matrices, sorting).

#include "icp/dataset.hpp"
#include "icp/index_set.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

using icp::Index;

inline Eigen::MatrixXd design(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd d(x.rows(), x.cols() + 1);
  d.col(0).setOnes();
  d.rightCols(x.cols()) = x;
  return d;
}

// beta = (X'X)^-1 X'y via an explicit inverse
inline Eigen::VectorXd normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd d = design(x);
  return (d.transpose() * d).inverse() * d.transpose() * y;
}

inline Eigen::MatrixXd rows(const Eigen::MatrixXd& m, const std::vector<Index>& r) {
  Eigen::MatrixXd out(static_cast<Index>(r.size()), m.cols());
  for (std::size_t i = 0; i < r.size(); ++i) out.row(static_cast<Index>(i)) = m.row(r[i]);
  return out;
}

inline Eigen::MatrixXd cols(const Eigen::MatrixXd& m, const std::vector<Index>& c) {
  Eigen::MatrixXd out(m.rows(), static_cast<Index>(c.size()));
  for (std::size_t j = 0; j < c.size(); ++j) out.col(static_cast<Index>(j)) = m.col(c[j]);
  return out;
}

// Chow statistic with the prediction-error covariance formed explicitly:
// Sigma_D = I + X_e (X_-e' X_-e)^-1 X_e'.
inline double chow_statistic(const icp::Dataset& d, const icp::IndexSet& s, int e, double& df1, double& df2) {
  const auto in = d.rows_of(e);
  const auto out = d.rows_not_in(e);
  const Eigen::MatrixXd xs = cols(d.x(), s);
  const Eigen::MatrixXd x_out = design(rows(xs, out));
  const Eigen::MatrixXd x_in = design(rows(xs, in));
  Eigen::VectorXd y_out(static_cast<Index>(out.size())), y_in(static_cast<Index>(in.size()));
  for (std::size_t i = 0; i < out.size(); ++i) y_out(static_cast<Index>(i)) = d.y()(out[i]);
  for (std::size_t i = 0; i < in.size(); ++i) y_in(static_cast<Index>(i)) = d.y()(in[i]);
  const Eigen::MatrixXd g = (x_out.transpose() * x_out).inverse();
  const Eigen::VectorXd b = g * x_out.transpose() * y_out;
  const Eigen::VectorXd resid_out = y_out - x_out * b;
  const double sigma2 = resid_out.squaredNorm() / static_cast<double>(x_out.rows() - x_out.cols());
  const Eigen::VectorXd dvec = y_in - x_in * b;
  const Eigen::MatrixXd sigma_d =
      Eigen::MatrixXd::Identity(x_in.rows(), x_in.rows()) + x_in * g * x_in.transpose();
  df1 = static_cast<double>(in.size());
  df2 = static_cast<double>(x_out.rows() - x_out.cols());
  return dvec.dot(sigma_d.inverse() * dvec) / (sigma2 * df1);
}

// KS statistic by evaluating both empirical CDFs at every pooled point
inline double ks_brute(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pts = a;
  pts.insert(pts.end(), b.begin(), b.end());
  double best = 0.0;
  for (double t : pts) {
    const double fa = static_cast<double>(std::count_if(a.begin(), a.end(), [&](double v) { return v <= t; })) /
                      static_cast<double>(a.size());
    const double fb = static_cast<double>(std::count_if(b.begin(), b.end(), [&](double v) { return v <= t; })) /
                      static_cast<double>(b.size());
    best = std::max(best, std::fabs(fa - fb));
  }
  return best;
}

// Population covariance of a linear SEM: (I - B)^-1 diag(sigma^2) (I - B)^-T
inline Eigen::MatrixXd sem_covariance(const Eigen::MatrixXd& beta, const Eigen::VectorXd& sigma) {
  const Index m = beta.rows();
  const Eigen::MatrixXd a = (Eigen::MatrixXd::Identity(m, m) - beta).inverse();
  return a * sigma.array().square().matrix().asDiagonal() * a.transpose();
}

}  // namespace oracle
