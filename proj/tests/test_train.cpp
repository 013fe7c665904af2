#include <cmath>
#include <vector>

#include "doctest.h"
#include "hohmm/train.hpp"
#include "support/random_models.hpp"

using namespace hohmm;
using testsupport::Rng;

namespace {

FeatureSequence sequence_1d(std::vector<double> values) {
  FeatureSequence fs;
  fs.dim = 1;
  fs.values = std::move(values);
  return fs;
}

// Samples from a ground-truth model so EM has realistic structure to fit.
std::vector<FeatureSequence> sample_corpus(const HmmModel& truth, Rng& rng, int utterances,
                                           std::size_t frames) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = truth.num_states;
  const auto pick = [&](const double* row) {
    const double u = uniform(rng);
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
      cum += row[i];
      if (u < cum) return i;
    }
    return n - 1;
  };

  std::vector<FeatureSequence> corpus;
  for (int k = 0; k < utterances; ++k) {
    std::vector<int> states(frames);
    for (std::size_t t = 0; t < frames; ++t) {
      if (t == 0)
        states[t] = pick(truth.initial.data());
      else if (t == 1 && truth.order >= 2)
        states[t] = pick(truth.initial_pair.data() + static_cast<std::size_t>(states[0]) * n);
      else if (t == 2 && truth.order >= 3)
        states[t] = pick(truth.initial_triple.data() +
                         (static_cast<std::size_t>(states[0]) * n + states[1]) * n);
      else {
        std::size_t h = 0;
        for (int u = std::min<int>(static_cast<int>(t), truth.order); u >= 1; --u)
          h = h * n + static_cast<std::size_t>(states[t - u]);
        states[t] = pick(truth.transition.data() + h * n);
      }
    }
    FeatureSequence fs;
    fs.dim = truth.dim();
    fs.values.resize(frames * static_cast<std::size_t>(fs.dim));
    for (std::size_t t = 0; t < frames; ++t) {
      const GmmEmission& e = truth.emissions[states[t]];
      for (int d = 0; d < fs.dim; ++d)
        fs.values[t * fs.dim + d] = e.means[d] + std::sqrt(e.variances[d]) * normal(rng);
    }
    corpus.push_back(std::move(fs));
  }
  return corpus;
}

}  // namespace

TEST_CASE("init_model with one state and one mixture uses global statistics") {
  TrainConfig config;
  config.n_states = 1;
  config.n_mixtures = 1;
  config.order = 1;
  const std::vector<FeatureSequence> data = {sequence_1d({1.0, 2.0, 3.0, 6.0})};
  const HmmModel m = init_model(data, config);
  CHECK(m.emissions[0].means[0] == doctest::Approx(3.0).epsilon(1e-12));
  // ML variance of {1,2,3,6} around 3: (4+1+0+9)/4
  CHECK(m.emissions[0].variances[0] == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("init_model is deterministic for a fixed seed") {
  Rng rng(8001);
  std::vector<FeatureSequence> data;
  for (int i = 0; i < 4; ++i) data.push_back(testsupport::random_observation(rng, 30, 2));

  TrainConfig config;
  config.n_states = 3;
  config.n_mixtures = 2;
  config.order = 2;
  config.rng_seed = 99;
  const HmmModel a = init_model(data, config);
  const HmmModel b = init_model(data, config);
  CHECK(a.emissions[1].means == b.emissions[1].means);
  CHECK(a.emissions[2].variances == b.emissions[2].variances);
  CHECK(a.emissions[0].weights == b.emissions[0].weights);
}

TEST_CASE("init_model at paper-sized configuration satisfies the invariants") {
  Rng rng(8002);
  std::vector<FeatureSequence> data;
  for (int i = 0; i < 12; ++i) data.push_back(testsupport::random_observation(rng, 60, 3));

  TrainConfig config;
  config.n_states = 4;
  config.n_mixtures = 32;
  config.order = 3;
  const HmmModel m = init_model(data, config);
  CHECK_NOTHROW(validate_model(m));
  CHECK(m.mixtures() == 32);
  CHECK(m.num_states == 4);
}

TEST_CASE("init_model rejects insufficient data") {
  TrainConfig config;
  config.n_states = 2;
  config.n_mixtures = 4;
  config.order = 1;
  const std::vector<FeatureSequence> data = {sequence_1d({1.0, 2.0, 3.0})};
  CHECK_THROWS_AS(init_model(data, config), std::invalid_argument);
}

TEST_CASE("baum_welch recovers the Gaussian ML estimates in the degenerate case") {
  TrainConfig config;
  config.n_states = 1;
  config.n_mixtures = 1;
  config.order = 1;
  config.max_iterations = 10;
  config.log_likelihood_tolerance = 1e-9;
  const std::vector<FeatureSequence> data = {sequence_1d({0.0, 2.0})};
  const HmmModel init = init_model(data, config);
  const TrainResult result = baum_welch(data, init, config);
  CHECK(result.model.emissions[0].means[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(result.model.emissions[0].variances[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("baum_welch log-likelihood is non-decreasing") {
  Rng rng(8003);
  for (int order = 1; order <= 3; ++order) {
    const HmmModel truth = testsupport::random_model(rng, order, 2, 1, 2);
    const std::vector<FeatureSequence> data = sample_corpus(truth, rng, 5, 12);

    TrainConfig config;
    config.n_states = 2;
    config.n_mixtures = 2;
    config.order = order;
    config.max_iterations = 8;
    config.log_likelihood_tolerance = 1e-7;
    config.rng_seed = 17;
    const HmmModel init = init_model(data, config);
    const TrainResult result = baum_welch(data, init, config);
    REQUIRE(result.log_likelihoods.size() >= 2);
    for (std::size_t i = 1; i < result.log_likelihoods.size(); ++i)
      CHECK(result.log_likelihoods[i] >= result.log_likelihoods[i - 1] - 1e-8);
  }
}

TEST_CASE("baum_welch improves on the initial model and keeps invariants") {
  Rng rng(8004);
  const HmmModel truth = testsupport::random_model(rng, 2, 2, 1, 1);
  const std::vector<FeatureSequence> data = sample_corpus(truth, rng, 6, 10);

  TrainConfig config;
  config.n_states = 2;
  config.n_mixtures = 1;
  config.order = 2;
  config.max_iterations = 6;
  config.log_likelihood_tolerance = 1e-8;
  const HmmModel init = init_model(data, config);
  const TrainResult result = baum_welch(data, init, config);
  CHECK_NOTHROW(validate_model(result.model));
  CHECK(result.log_likelihoods.back() > result.log_likelihoods.front());
}

TEST_CASE("baum_welch rejects utterances shorter than the model order") {
  TrainConfig config;
  config.n_states = 1;
  config.n_mixtures = 1;
  config.order = 2;
  config.max_iterations = 2;
  const std::vector<FeatureSequence> data = {sequence_1d({0.0, 2.0}), sequence_1d({1.0})};
  const HmmModel init = init_model(data, config);
  CHECK_THROWS_AS(baum_welch(data, init, config), std::invalid_argument);
}

TEST_CASE("variance floor is applied") {
  TrainConfig config;
  config.n_states = 1;
  config.n_mixtures = 1;
  config.order = 1;
  config.max_iterations = 3;
  // Constant data has zero variance; the absolute floor must kick in.
  const std::vector<FeatureSequence> data = {sequence_1d({2.0, 2.0, 2.0, 2.0})};
  const HmmModel init = init_model(data, config);
  CHECK(init.emissions[0].variances[0] > 0.0);
  const TrainResult result = baum_welch(data, init, config);
  CHECK(result.model.emissions[0].variances[0] > 0.0);
}
