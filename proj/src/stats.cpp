#include "tpb/stats.hpp"

#include <algorithm>
#include <cmath>

#include "tpb/error.hpp"

namespace tpb {

double mean(const std::vector<double>& x) {
  require(!x.empty(), ErrorCode::invalid_argument, "mean of empty vector");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x) {
  require(x.size() >= 2, ErrorCode::too_few_replicates, "variance needs at least two values");
  double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double quantile(std::vector<double> x, double q) {
  require(!x.empty(), ErrorCode::invalid_argument, "quantile of empty vector");
  require(q >= 0.0 && q <= 1.0, ErrorCode::invalid_argument, "quantile level out of [0,1]");
  std::sort(x.begin(), x.end());
  if (x.size() == 1) return x[0];
  double h = q * static_cast<double>(x.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, x.size() - 1);
  double frac = h - static_cast<double>(lo);
  return x[lo] + frac * (x[hi] - x[lo]);
}

namespace {

// regularized lower incomplete gamma P(a, x); series + continued fraction
double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // Lentz continued fraction for Q(a, x)
  double b = x + 1.0 - a, c = 1e300, dd = 1.0 / b, h = dd;
  for (int i = 1; i < 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    dd = an * dd + b;
    if (std::abs(dd) < 1e-300) dd = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    dd = 1.0 / dd;
    double del = dd * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

}  // namespace

double chi_square_sf(double x, double df) {
  require(df > 0.0, ErrorCode::invalid_argument, "chi-square needs df > 0");
  if (x <= 0.0) return 1.0;
  return 1.0 - gamma_p(0.5 * df, 0.5 * x);
}

}  // namespace tpb
