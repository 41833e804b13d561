#include "icp/distributions.hpp"

#include "icp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace icp {
namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr double kHalfLog2Pi = 0.91893853320467274178;

// lgamma(z) - [(z - 1/2) ln z - z + ln(2 pi) / 2]
double stirling_correction(double z) {
  if (z >= 10.0) {
    const double r = 1.0 / z;
    const double r2 = r * r;
    return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))));
  }
  return std::lgamma(z) - ((z - 0.5) * std::log(z) - z + kHalfLog2Pi);
}

// lgamma(b) - lgamma(a + b) for b >= 10 without cancelling the large terms.
double lgamma_ratio(double a, double b) {
  return -(b - 0.5) * std::log1p(a / b) - a * std::log(a + b) + a + stirling_correction(b) -
         stirling_correction(a + b);
}

double log_beta(double a, double b) {
  if (a > b) std::swap(a, b);
  if (b < 10.0) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  if (a < 10.0) return std::lgamma(a) + lgamma_ratio(a, b);
  const double s = a + b;
  return -0.5 * std::log(b) + kHalfLog2Pi + (a - 0.5) * std::log(a / s) + b * std::log1p(-a / s) +
         stirling_correction(a) + stirling_correction(b) - stirling_correction(s);
}

// log of x^a y^b / B(a, b)
double log_beta_prefix(double a, double b, double x, double y) {
  if (a >= 10.0 && b >= 10.0) {
    const double s = a + b;
    const double dx = (x * s - a) / a;
    const double dy = (y * s - b) / b;
    return a * std::log1p(dx) + b * std::log1p(dy) + 0.5 * std::log(a * b / s) - kHalfLog2Pi -
           (stirling_correction(a) + stirling_correction(b) - stirling_correction(s));
  }
  // x and y = 1 - x are both exact inputs; take the log of the smaller one's complement
  const double lx = x > 0.5 ? std::log1p(-y) : std::log(x);
  const double ly = y > 0.5 ? std::log1p(-x) : std::log(y);
  return a * lx + b * ly - log_beta(a, b);
}

// Continued fraction for I_x(a, b) (modified Lentz), valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

// Regularized upper incomplete gamma Q(s, w): series for P when w < s + 1,
// Lentz continued fraction for Q otherwise.
double upper_incomplete_gamma(double s, double w) {
  if (w <= 0.0) return 1.0;
  const double log_prefix = -w + s * std::log(w) - std::lgamma(s);
  if (w < s + 1.0) {
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n < 100000; ++n) {
      term *= w / (s + n);
      sum += term;
      if (term < kEps * sum) break;
    }
    return std::clamp(1.0 - std::exp(log_prefix) * sum, 0.0, 1.0);
  }
  double b = w + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return std::clamp(std::exp(log_prefix) * h, 0.0, 1.0);
}

// The continued fraction loses about a * 4e-17 when a is huge and x sits near
// 1; there I_x(a, b) ~ Q(b, -nu log x) with nu = a + (b - 1) / 2, which is off
// by roughly 0.04 b^2.5 / a^2. Switch where the second error is the smaller.
bool use_gamma_limit(double big, double small) { return big * big * big > 1e15 * std::pow(small, 2.5); }

double gamma_limit(double a, double b, double x, double y) {
  const double nu = a + 0.5 * (b - 1.0);
  const double neg_log_x = x > 0.5 ? -std::log1p(-y) : -std::log(x);
  return upper_incomplete_gamma(b, nu * neg_log_x);
}

double t_pdf(double t, double df) {
  return std::exp(-0.5 * (df + 1.0) * std::log1p(t * t / df) - 0.5 * std::log(df) - log_beta(0.5, 0.5 * df));
}

void require_df(double df, const char* what) {
  if (!(df > 0.0) || !std::isfinite(df)) throw Error(ErrorKind::DomainError, std::string(what) + " must be positive");
}

}  // namespace

double incomplete_beta(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::DomainError, "incomplete beta parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0))
    throw Error(ErrorKind::DomainError, "incomplete beta argument outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (y == 0.0) return 1.0;
  if (a == b && x == y) return 0.5;
  if (a > b && use_gamma_limit(a, b)) return gamma_limit(a, b, x, y);
  if (b > a && use_gamma_limit(b, a)) return 1.0 - gamma_limit(b, a, y, x);
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, y, x);
  const double value = std::exp(log_beta_prefix(a, b, x, y)) * beta_continued_fraction(a, b, x) / a;
  return std::clamp(value, 0.0, 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Wichura, AS 241 (PPND16).
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::DomainError, "probability must lie in (0, 1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
               45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
               21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734) /
            (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772) /
            (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

double t_cdf(double t, double df) {
  require_df(df, "degrees of freedom");
  if (std::isnan(t)) throw Error(ErrorKind::DomainError, "t is NaN");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x, y);
  return t < 0.0 ? tail : 1.0 - tail;
}

double t_sf(double t, double df) { return t_cdf(-t, df); }

double t_quantile(double p, double df) {
  require_df(df, "degrees of freedom");
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::DomainError, "probability must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  const double q = std::min(p, 1.0 - p);

  // Cornish-Fisher start, then safeguarded Newton on the lower tail.
  const double z = normal_quantile(q);
  const double z3 = z * z * z;
  double t = z + (z3 + z) / (4.0 * df) + (5.0 * z3 * z * z + 16.0 * z3 + 3.0 * z) / (96.0 * df * df);
  if (!(t < 0.0) || !std::isfinite(t)) t = -1.0;
  double hi = 0.0;
  double lo = std::min(t, -1.0);
  while (t_cdf(lo, df) > q) {
    hi = lo;
    lo *= 2.0;
  }
  t = std::clamp(t, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = t_cdf(t, df) - q;
    if (f == 0.0) break;
    if (f > 0.0) hi = t; else lo = t;
    double next = t - f / t_pdf(t, df);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - t);
    t = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t))) break;
  }
  return p < 0.5 ? t : -t;
}

double f_cdf(double x, double d1, double d2) {
  require_df(d1, "numerator df");
  require_df(d2, "denominator df");
  if (std::isnan(x) || x < 0.0) throw Error(ErrorKind::DomainError, "F argument must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double denom = d1 * x + d2;
  return incomplete_beta(0.5 * d1, 0.5 * d2, d1 * x / denom, d2 / denom);
}

double f_sf(double x, double d1, double d2) {
  require_df(d1, "numerator df");
  require_df(d2, "denominator df");
  if (std::isnan(x) || x < 0.0) throw Error(ErrorKind::DomainError, "F argument must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double denom = d1 * x + d2;
  return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / denom, d1 * x / denom);
}

double kolmogorov_sf(double lambda) {
  if (std::isnan(lambda)) throw Error(ErrorKind::DomainError, "lambda is NaN");
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    const double w = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double j = 2.0 * k - 1.0;
      const double term = std::exp(-j * j * w);
      sum += term;
      if (term < 1e-300 || term < kEps * sum) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < kEps * sum) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace icp
