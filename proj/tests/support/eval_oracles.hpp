#ifndef HOHMM_TESTS_EVAL_ORACLES_HPP
#define HOHMM_TESTS_EVAL_ORACLES_HPP

// Counting/bisection oracles for the evaluation module, independent of the
// library's sweep/interpolation code.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "hohmm/eval.hpp"

namespace oracle {

inline std::pair<double, double> count_rates(const hohmm::ScoreSet& scores, double threshold) {
  double fa = 0.0, fr = 0.0;
  for (double s : scores.imposter)
    if (s >= threshold) fa += 1.0;
  for (double s : scores.genuine)
    if (s < threshold) fr += 1.0;
  return {fa / static_cast<double>(scores.imposter.size()),
          fr / static_cast<double>(scores.genuine.size())};
}

inline double eer(const hohmm::ScoreSet& scores) {
  std::vector<double> thresholds = scores.genuine;
  thresholds.insert(thresholds.end(), scores.imposter.begin(), scores.imposter.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.insert(thresholds.begin(), thresholds.front() - 1.0);
  thresholds.push_back(thresholds.back() + 1.0);

  auto [prev_fa, prev_fr] = count_rates(scores, thresholds[0]);
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    auto [fa, fr] = count_rates(scores, thresholds[i]);
    const double d0 = prev_fa - prev_fr;
    const double d1 = fa - fr;
    if (d0 == 0.0) return (prev_fa + prev_fr) / 2.0;
    if (d0 > 0.0 && d1 <= 0.0) {
      if (d1 == 0.0) return (fa + fr) / 2.0;
      const double lambda = d0 / (d0 - d1);
      return prev_fa + lambda * (fa - prev_fa);
    }
    prev_fa = fa;
    prev_fr = fr;
  }
  return -1.0;
}

inline double probit_bisect(double p) {
  double lo = -12.0, hi = 12.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2.0;
    const double cdf = 0.5 * (1.0 + std::erf(mid / std::sqrt(2.0)));
    (cdf < p ? lo : hi) = mid;
  }
  return (lo + hi) / 2.0;
}

}  // namespace oracle

#endif
