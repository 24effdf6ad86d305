#pragma once

// Infinite series appearing in the schedules and bounds:
//   sum_{k>=0} (k+1)^{-s} r^k,  s > 1 when r == 1, 0 < r <= 1.

#include <array>
#include <cmath>

#include "misalm/errors.hpp"

namespace misalm {

/// sum_{j>=1} j^{-s} for s > 1. Partial sum up to N-1, then the
/// Euler-Maclaurin tail: the integral N^{1-s}/(s-1) (integral test), the
/// half-term N^{-s}/2 and Bernoulli corrections. With N = 64 and six
/// corrections the remainder is far below 1e-12 for s in (1, 64].
inline double zeta_sum(double s) {
  if (!(s > 1.0)) throw ConfigError("zeta_sum: series diverges for s <= 1");
  constexpr int N = 64;
  // B_{2k} / (2k)!
  constexpr std::array<double, 6> kBernoulliOverFactorial = {
      1.0 / 12.0,         -1.0 / 720.0,          1.0 / 30240.0,
      -1.0 / 1209600.0,   1.0 / 47900160.0,     -691.0 / 1307674368000.0};
  double head = 0.0;
  for (int j = N - 1; j >= 1; --j) head += std::pow(static_cast<double>(j), -s);
  const double big_n = N;
  double tail = std::pow(big_n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(big_n, -s);
  double rising = s;  // s (s+1) ... (s+2k-2)
  for (std::size_t k = 1; k <= kBernoulliOverFactorial.size(); ++k) {
    const double power = -s - 2.0 * static_cast<double>(k) + 1.0;
    tail += kBernoulliOverFactorial[k - 1] * rising * std::pow(big_n, power);
    rising *= (s + 2.0 * static_cast<double>(k) - 1.0) * (s + 2.0 * static_cast<double>(k));
  }
  return head + tail;
}

/// sum_{k>=0} (k+1)^{-s} r^k. For r < 1 terms are summed until the geometric
/// tail bound term * r / (1 - r) is below 1e-17 of the running sum.
inline double power_series_sum(double s, double ratio) {
  if (!(ratio > 0.0) || ratio > 1.0) throw ConfigError("power_series_sum: ratio must lie in (0, 1]");
  if (ratio == 1.0) return zeta_sum(s);
  double sum = 0.0;
  double geo = 1.0;
  for (long k = 0; k < 100'000'000; ++k) {
    const double term = std::pow(static_cast<double>(k + 1), -s) * geo;
    sum += term;
    if (term * ratio / (1.0 - ratio) <= 1e-17 * sum) return sum;
    geo *= ratio;
  }
  throw ConvergenceError("power_series_sum: series did not settle");
}

}  // namespace misalm
