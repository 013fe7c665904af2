#ifndef HOHMM_TRAIN_HPP
#define HOHMM_TRAIN_HPP

#include <cstdint>
#include <vector>

#include "hohmm/features.hpp"
#include "hohmm/hmm.hpp"

namespace hohmm {

struct TrainConfig {
  int n_states = 4;
  int n_mixtures = 32;
  int order = 1;
  int max_iterations = 20;
  double log_likelihood_tolerance = 1e-3;
  // Relative to the global per-dimension data variance.
  double variance_floor = 1e-3;
  uint64_t rng_seed = 1;
};

void validate_train_config(const TrainConfig& config);

// Uniform-duration state segmentation followed by per-state k-means to seed
// mixture parameters; transition and initial tensors start uniform.
HmmModel init_model(const std::vector<FeatureSequence>& train, const TrainConfig& config);

struct TrainResult {
  HmmModel model;
  // Total log-likelihood of the training set per EM iteration, evaluated
  // under the parameters entering that iteration.
  std::vector<double> log_likelihoods;
};

// Baum-Welch re-estimation over history tuples with emissions tied by the
// most recent state. Stops after max_iterations updates or when the total
// log-likelihood improves by less than log_likelihood_tolerance.
TrainResult baum_welch(const std::vector<FeatureSequence>& train, const HmmModel& init,
                       const TrainConfig& config);

}  // namespace hohmm

#endif
