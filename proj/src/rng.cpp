#include "tpb/rng.hpp"

#include <cmath>

#include "tpb/error.hpp"

namespace tpb {

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

Rng Rng::substream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t phase) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate & 0xffffffffu),
                    static_cast<std::uint32_t>(replicate >> 32),
                    static_cast<std::uint32_t>(phase)};
  Rng rng(0);
  rng.engine_.seed(seq);
  return rng;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  require(lo <= hi, ErrorCode::invalid_argument, "uniform_int bounds reversed");
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());  // full 64-bit range
  // rejection on the top of the range keeps the draw unbiased
  std::uint64_t limit = (~std::uint64_t{0} / span) * span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return normal_spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  normal_spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Rng::gamma(double shape, double scale) {
  require(shape > 0.0 && scale > 0.0, ErrorCode::invalid_argument, "gamma parameters must be positive");
  if (shape < 1.0) {
    // boost: X ~ Gamma(shape+1), return X * U^{1/shape}
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

namespace {

double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::int64_t Rng::hypergeometric(std::int64_t total, std::int64_t marked, std::int64_t n) {
  require(total >= 0 && marked >= 0 && marked <= total && n >= 0 && n <= total,
          ErrorCode::invalid_argument, "hypergeometric parameters out of range");
  if (n == 0 || marked == 0) return 0;
  if (marked == total) return n;
  if (n == total) return marked;

  // symmetry reductions so the cheap counting path covers small cases
  if (n > total - n) return marked - hypergeometric(total, marked, total - n);
  if (marked > total - marked) return n - hypergeometric(total, total - marked, n);

  std::int64_t small = std::min(n, marked);
  if (small <= 64) {
    // draw-by-draw counting over min(n, marked) items; exact
    std::int64_t drawn = std::min(n, marked), other_n = std::max(n, marked);
    std::int64_t hits = 0, remaining_marked = other_n, remaining_total = total;
    for (std::int64_t t = 0; t < drawn; ++t) {
      if (uniform_int(0, remaining_total - 1) < remaining_marked) {
        ++hits;
        --remaining_marked;
      }
      --remaining_total;
    }
    return hits;
  }

  // inversion from the mode via the pmf recurrence
  double ln_cnk = log_choose(static_cast<double>(total), static_cast<double>(n));
  auto log_pmf = [&](std::int64_t k) {
    return log_choose(static_cast<double>(marked), static_cast<double>(k)) +
           log_choose(static_cast<double>(total - marked), static_cast<double>(n - k)) - ln_cnk;
  };
  std::int64_t lo = std::max<std::int64_t>(0, n + marked - total);
  std::int64_t hi = std::min(n, marked);
  std::int64_t mode = static_cast<std::int64_t>(
      std::floor(static_cast<double>((n + 1)) * static_cast<double>(marked + 1) /
                 static_cast<double>(total + 2)));
  mode = std::max(lo, std::min(hi, mode));
  double pm = std::exp(log_pmf(mode));

  double u = uniform();
  // walk outward from the mode, alternating sides by probability mass
  double acc = pm;
  if (u < acc) return mode;
  double pl = pm, pr = pm;
  std::int64_t l = mode, r = mode;
  while (l > lo || r < hi) {
    if (r < hi) {
      // p(k+1)/p(k) = (marked-k)(n-k) / ((k+1)(total-marked-n+k+1))
      double ratio = static_cast<double>(marked - r) * static_cast<double>(n - r) /
                     (static_cast<double>(r + 1) * static_cast<double>(total - marked - n + r + 1));
      pr *= ratio;
      ++r;
      acc += pr;
      if (u < acc) return r;
    }
    if (l > lo) {
      double ratio = static_cast<double>(l) * static_cast<double>(total - marked - n + l) /
                     (static_cast<double>(marked - l + 1) * static_cast<double>(n - l + 1));
      pl *= ratio;
      --l;
      acc += pl;
      if (u < acc) return l;
    }
  }
  return mode;  // numerically exhausted mass; return the mode
}

}  // namespace tpb
