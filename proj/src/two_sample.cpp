#include "icp/two_sample.hpp"

#include "icp/distributions.hpp"
#include "icp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace icp {
namespace {

struct Moments {
  double mean;
  double var;  // unbiased
};

Moments moments(const ConstVectorRef& v) {
  const double mean = v.mean();
  const double ss = (v.array() - mean).square().sum();
  return {mean, ss / static_cast<double>(v.size() - 1)};
}

void require_sizes(const ConstVectorRef& a, const ConstVectorRef& b, Eigen::Index min_size, ErrorKind kind) {
  if (a.size() < min_size || b.size() < min_size)
    throw Error(kind, "each sample needs at least " + std::to_string(min_size) + " values");
}

}  // namespace

double two_sample_t_test(const ConstVectorRef& a, const ConstVectorRef& b) {
  require_sizes(a, b, 2, ErrorKind::TooFewSamples);
  const auto ma = moments(a);
  const auto mb = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = ma.var / na;
  const double vb = mb.var / nb;
  const double diff = ma.mean - mb.mean;
  if (va + vb == 0.0) return diff == 0.0 ? 1.0 : 0.0;
  if (diff == 0.0) return 1.0;
  const double se2 = va + vb;
  const double t = diff / std::sqrt(se2);
  const double df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  return std::min(1.0, 2.0 * t_sf(std::fabs(t), df));
}

double variance_f_test(const ConstVectorRef& a, const ConstVectorRef& b) {
  require_sizes(a, b, 2, ErrorKind::TooFewSamples);
  const double va = moments(a).var;
  const double vb = moments(b).var;
  if (va == 0.0 && vb == 0.0) return 1.0;
  const double d1 = static_cast<double>(a.size() - 1);
  const double d2 = static_cast<double>(b.size() - 1);
  const double ratio = vb == 0.0 ? std::numeric_limits<double>::infinity() : va / vb;
  const double lower = f_cdf(ratio, d1, d2);
  const double upper = f_sf(ratio, d1, d2);
  return std::min(1.0, 2.0 * std::min(lower, upper));
}

double ks_statistic(const ConstVectorRef& a, const ConstVectorRef& b) {
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_pvalue(double d, double na, double nb) {
  const double ne = std::sqrt(na * nb / (na + nb));
  return kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d);
}

double ks_two_sample(const ConstVectorRef& a, const ConstVectorRef& b) {
  require_sizes(a, b, 8, ErrorKind::TooFewSamples);
  return ks_pvalue(ks_statistic(a, b), static_cast<double>(a.size()), static_cast<double>(b.size()));
}

}  // namespace icp
