#pragma once

#include "icp/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

namespace icp {

/// Designs whose condition number exceeds this are rejected as rank deficient.
inline constexpr double kMaxDesignCondition = 1e12;

/// Least-squares fit with an intercept. Coefficient 0 is the intercept.
template <typename Scalar>
struct OlsFit {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector coef;
  Vector residuals;
  Scalar sigma2_hat{};
  Matrix xtx_inv;   // (X'X)^-1 of the intercept-augmented design
  Matrix r_factor;  // upper-triangular R with X'X = R'R
  Eigen::Index df_resid = 0;

  /// Standard error of coef(j).
  Scalar std_error(Eigen::Index j) const { return std::sqrt(sigma2_hat * xtx_inv(j, j)); }
};

/// [1 | x]
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> with_intercept(
    const Eigen::MatrixBase<Derived>& x) {
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix design(x.rows(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  return design;
}

/// Ordinary least squares of y on [1 | x_s] by Householder QR. Requires
/// n >= k + 2 so that the residual variance has positive degrees of freedom.
/// Throws RankDeficient when the augmented design is numerically singular;
/// there is no silent pseudo-inverse fallback.
template <typename DerivedX, typename DerivedY>
OlsFit<typename DerivedX::Scalar> ols_fit(const Eigen::MatrixBase<DerivedX>& x_s,
                                          const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  using Matrix = typename OlsFit<Scalar>::Matrix;
  const Eigen::Index n = x_s.rows();
  const Eigen::Index k1 = x_s.cols() + 1;
  if (y.size() != n) throw Error(ErrorKind::DomainError, "x and y row counts differ");
  if (n < k1 + 1)
    throw Error(ErrorKind::TooFewRows, std::to_string(n) + " rows for " + std::to_string(k1) + " coefficients");

  const Matrix design = with_intercept(x_s);
  const Eigen::HouseholderQR<Matrix> qr(design);
  OlsFit<Scalar> fit;
  fit.r_factor = qr.matrixQR().topRows(k1).template triangularView<Eigen::Upper>();

  const Eigen::JacobiSVD<Matrix> svd(fit.r_factor);
  const auto& sv = svd.singularValues();
  const Scalar smallest = sv(k1 - 1);
  if (!(smallest > Scalar(0)) || sv(0) / smallest > Scalar(kMaxDesignCondition))
    throw Error(ErrorKind::RankDeficient, "design condition number above 1e12");

  fit.coef = qr.solve(y.derived().template cast<Scalar>());
  fit.residuals = y - design * fit.coef;
  fit.df_resid = n - k1;
  fit.sigma2_hat = fit.residuals.squaredNorm() / Scalar(fit.df_resid);
  const Matrix r_inv = fit.r_factor.template triangularView<Eigen::Upper>().solve(Matrix::Identity(k1, k1));
  fit.xtx_inv = r_inv * r_inv.transpose();
  return fit;
}

using OlsFitd = OlsFit<double>;

}  // namespace icp
