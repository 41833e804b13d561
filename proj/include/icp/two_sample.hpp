#pragma once

#include <Eigen/Dense>

namespace icp {

using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// Welch two-sample t-test, two-sided p-value.
double two_sample_t_test(const ConstVectorRef& a, const ConstVectorRef& b);

/// Two-sided F-test for equal variances, p = 2 min(F(r), 1 - F(r)) with
/// r = var(a) / var(b), capped at 1.
double variance_f_test(const ConstVectorRef& a, const ConstVectorRef& b);

/// sup |F_a - F_b| over the pooled sample.
double ks_statistic(const ConstVectorRef& a, const ConstVectorRef& b);

/// Asymptotic two-sample Kolmogorov-Smirnov p-value (Stephens' small-sample
/// adjustment of the effective sample size). Requires 8 values per sample.
double ks_two_sample(const ConstVectorRef& a, const ConstVectorRef& b);

/// p-value of a KS statistic `d` for sample sizes na, nb.
double ks_pvalue(double d, double na, double nb);

}  // namespace icp
