#ifndef HOHMM_LOGSUMEXP_HPP
#define HOHMM_LOGSUMEXP_HPP

#include <cmath>
#include <limits>
#include <span>

namespace hohmm {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without leaving the log domain. -inf is the
// additive identity and must pass through untouched.
inline double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

inline double log_sum(std::span<const double> vals) {
  double hi = kLogZero;
  for (double v : vals)
    if (v > hi) hi = v;
  if (hi == kLogZero) return kLogZero;
  double s = 0.0;
  for (double v : vals)
    if (v != kLogZero) s += std::exp(v - hi);
  return hi + std::log(s);
}

inline double safe_log(double p) { return p > 0.0 ? std::log(p) : kLogZero; }

}  // namespace hohmm

#endif
