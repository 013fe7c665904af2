#ifndef HOHMM_TESTS_ORACLES_HPP
#define HOHMM_TESTS_ORACLES_HPP

// Independent reference implementations used only as test oracles. These
// deliberately avoid the library's recursion/log-sum-exp code paths:
// probabilities come straight off the model tensors and densities are
// evaluated in extended precision.

#include <cmath>
#include <limits>
#include <vector>

#include "hohmm/features.hpp"
#include "hohmm/hmm.hpp"

namespace oracle {

inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

// Mixture density evaluated by direct summation in the linear domain with
// long doubles.
inline double log_gmm(const hohmm::GmmEmission& e, std::span<const double> x) {
  long double total = 0.0L;
  for (int m = 0; m < e.mixtures(); ++m) {
    long double component = static_cast<long double>(e.weights[m]);
    for (int d = 0; d < e.dim; ++d) {
      const long double mu = e.means[static_cast<std::size_t>(m) * e.dim + d];
      const long double var = e.variances[static_cast<std::size_t>(m) * e.dim + d];
      const long double diff = static_cast<long double>(x[d]) - mu;
      component *= std::exp(-diff * diff / (2.0L * var)) /
                   std::sqrt(2.0L * 3.14159265358979323846264338327950288L * var);
    }
    total += component;
  }
  return total > 0.0L ? static_cast<double>(std::log(total))
                      : -std::numeric_limits<double>::infinity();
}

// log P(q) read directly off the tensors.
inline double path_log_prob(const hohmm::HmmModel& m, const std::vector<int>& q) {
  const int n = m.num_states;
  const auto lp = [](double p) {
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
  };
  double acc = lp(m.initial[q[0]]);
  if (m.order >= 2 && q.size() >= 2) acc += lp(m.initial_pair[q[0] * n + q[1]]);
  if (m.order >= 3 && q.size() >= 3) acc += lp(m.initial_triple[(q[0] * n + q[1]) * n + q[2]]);
  for (std::size_t t = static_cast<std::size_t>(m.order); t < q.size(); ++t) {
    std::size_t h = 0;
    for (int u = m.order; u >= 1; --u) h = h * n + static_cast<std::size_t>(q[t - u]);
    acc += lp(m.transition[h * n + static_cast<std::size_t>(q[t])]);
  }
  return acc;
}

inline double path_joint_log_prob(const hohmm::HmmModel& m, const std::vector<int>& q,
                                  const hohmm::FeatureSequence& obs) {
  double acc = path_log_prob(m, q);
  for (std::size_t t = 0; t < q.size(); ++t) acc += log_gmm(m.emissions[q[t]], obs.frame(t));
  return acc;
}

// log-sum-exp over every one of the N^T state sequences.
inline double brute_force_forward(const hohmm::HmmModel& m, const hohmm::FeatureSequence& obs) {
  const std::size_t frames = obs.frames();
  const int n = m.num_states;
  std::vector<int> q(frames, 0);
  double total = -std::numeric_limits<double>::infinity();
  for (;;) {
    total = log_add(total, path_joint_log_prob(m, q, obs));
    std::size_t pos = 0;
    while (pos < frames && ++q[pos] == n) q[pos++] = 0;
    if (pos == frames) break;
  }
  return total;
}

struct BestPath {
  std::vector<int> states;
  double log_prob = -std::numeric_limits<double>::infinity();
};

inline BestPath brute_force_best_path(const hohmm::HmmModel& m,
                                      const hohmm::FeatureSequence& obs) {
  const std::size_t frames = obs.frames();
  const int n = m.num_states;
  std::vector<int> q(frames, 0);
  BestPath best;
  for (;;) {
    const double lp = path_joint_log_prob(m, q, obs);
    if (lp > best.log_prob) {
      best.log_prob = lp;
      best.states = q;
    }
    std::size_t pos = 0;
    while (pos < frames && ++q[pos] == n) q[pos++] = 0;
    if (pos == frames) break;
  }
  return best;
}

}  // namespace oracle

#endif
