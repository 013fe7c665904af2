#include <benchmark/benchmark.h>

#include <random>

#include "hohmm/hmm.hpp"
#include "hohmm/mfcc.hpp"
#include "hohmm/train.hpp"

namespace {

hohmm::HmmModel make_model(int order, int n, int mixtures, int dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.1, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const auto stochastic = [&](std::size_t rows, std::size_t cols) {
    std::vector<double> out(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::size_t k = 0; k < cols; ++k) sum += out[r * cols + k] = uniform(rng);
      for (std::size_t k = 0; k < cols; ++k) out[r * cols + k] /= sum;
    }
    return out;
  };

  hohmm::HmmModel m;
  m.order = order;
  m.num_states = n;
  m.initial = stochastic(1, n);
  if (order >= 2) m.initial_pair = stochastic(n, n);
  if (order >= 3) m.initial_triple = static_cast<std::size_t>(n) * n > 0
                                         ? stochastic(static_cast<std::size_t>(n) * n, n)
                                         : std::vector<double>{};
  m.transition = stochastic(hohmm::ipow(n, order), n);
  for (int s = 0; s < n; ++s) {
    hohmm::GmmEmission e;
    e.dim = dim;
    e.weights = stochastic(1, mixtures);
    e.means.resize(static_cast<std::size_t>(mixtures) * dim);
    e.variances.assign(static_cast<std::size_t>(mixtures) * dim, 1.0);
    for (double& v : e.means) v = normal(rng);
    m.emissions.push_back(std::move(e));
  }
  return m;
}

hohmm::FeatureSequence make_observation(std::size_t frames, int dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  hohmm::FeatureSequence fs;
  fs.dim = dim;
  fs.values.resize(frames * static_cast<std::size_t>(dim));
  for (double& v : fs.values) v = normal(rng);
  return fs;
}

void BM_ForwardLikelihood(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const auto model = make_model(order, 4, 8, 38, 42);
  const auto obs = make_observation(150, 38, 43);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hohmm::forward_log_likelihood(model, obs));
  }
}
BENCHMARK(BM_ForwardLikelihood)->Arg(1)->Arg(2)->Arg(3);

void BM_Viterbi(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const auto model = make_model(order, 4, 8, 38, 42);
  const auto obs = make_observation(150, 38, 43);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hohmm::viterbi(model, obs));
  }
}
BENCHMARK(BM_Viterbi)->Arg(1)->Arg(3);

void BM_BaumWelchIteration(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  std::vector<hohmm::FeatureSequence> data;
  for (int i = 0; i < 8; ++i) data.push_back(make_observation(60, 8, 100 + i));

  hohmm::TrainConfig config;
  config.n_states = 3;
  config.n_mixtures = 2;
  config.order = order;
  config.max_iterations = 1;
  const hohmm::HmmModel init = hohmm::init_model(data, config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hohmm::baum_welch(data, init, config));
  }
}
BENCHMARK(BM_BaumWelchIteration)->Arg(1)->Arg(3);

void BM_ExtractMfcc(benchmark::State& state) {
  hohmm::AudioSignal signal;
  signal.sample_rate = 12000.0;
  signal.samples.resize(12000);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  for (double& v : signal.samples) v = uniform(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hohmm::extract_mfcc(signal, hohmm::FrameConfig{}, hohmm::MfccConfig{}));
  }
}
BENCHMARK(BM_ExtractMfcc);

}  // namespace

BENCHMARK_MAIN();
