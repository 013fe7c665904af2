#include "hohmm/synth.hpp"

#include <cstdio>
#include <random>
#include <stdexcept>

#include "hohmm/features.hpp"

namespace hohmm {

namespace {

// Concentration of the per-row Dirichlet draws for ground-truth dynamics;
// small values give strongly history-dependent transitions.
constexpr double kTransitionConcentration = 0.3;
constexpr double kInitialConcentration = 1.0;

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t z = seed;
  for (uint64_t salt : {a + 1, b + 1, c + 1}) {
    z ^= salt * 0x9e3779b97f4a7c15ull;
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
  }
  return z;
}

void fill_dirichlet_rows(std::vector<double>& probs, std::size_t row_len, double concentration,
                         std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  for (std::size_t base = 0; base < probs.size(); base += row_len) {
    double sum = 0.0;
    for (std::size_t i = 0; i < row_len; ++i) {
      double g = gamma(rng);
      if (g < 1e-12) g = 1e-12;
      probs[base + i] = g;
      sum += g;
    }
    for (std::size_t i = 0; i < row_len; ++i) probs[base + i] /= sum;
  }
}

int sample_row(std::span<const double> row, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  double cum = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    cum += row[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(row.size() - 1);
}

std::string speaker_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "spk%03d", index + 1);
  return buf;
}

std::string feature_name(const std::string& speaker, int sentence, int repetition) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_s%02d_r%02d.hofv", sentence, repetition);
  return speaker + buf;
}

}  // namespace

void validate_synth_config(const SynthConfig& config) {
  if (config.n_speakers < 1 || config.n_sentences < 1 || config.n_repetitions < 1)
    throw std::invalid_argument("synth: speaker/sentence/repetition counts must be >= 1");
  if (config.feature_dim < 1) throw std::invalid_argument("synth: feature_dim must be >= 1");
  if (config.states < 1) throw std::invalid_argument("synth: states must be >= 1");
  if (config.order < 1 || config.order > 3)
    throw std::invalid_argument("synth: order must be 1, 2, or 3");
  if (!(config.mean_separation > 0.0))
    throw std::invalid_argument("synth: mean_separation must be > 0");
  if (config.min_duration < config.order || config.max_duration < config.min_duration)
    throw std::invalid_argument("synth: empty duration range (min >= order required)");
}

SynthResult synth_corpus(const SynthConfig& config, const std::filesystem::path& out_dir) {
  validate_synth_config(config);
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "features");
  fs::create_directories(out_dir / "ground_truth");

  const int n = config.states;
  const int dim = config.feature_dim;

  // State-mean constellation shared by all speakers, unit scale.
  std::vector<double> state_offsets(static_cast<std::size_t>(n) * dim);
  {
    std::mt19937_64 rng(mix_seed(config.rng_seed, 0, 0, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : state_offsets) v = normal(rng);
  }

  SynthResult result;
  std::vector<UtteranceRecord> records;

  for (int spk = 0; spk < config.n_speakers; ++spk) {
    const std::string speaker = speaker_name(spk);

    HmmModel truth;
    truth.order = config.order;
    truth.num_states = n;
    {
      std::mt19937_64 rng(mix_seed(config.rng_seed, 1, static_cast<uint64_t>(spk), 0));
      std::normal_distribution<double> normal(0.0, 1.0);

      truth.initial.resize(n);
      fill_dirichlet_rows(truth.initial, static_cast<std::size_t>(n), kInitialConcentration, rng);
      if (config.order >= 2) {
        truth.initial_pair.resize(static_cast<std::size_t>(n) * n);
        fill_dirichlet_rows(truth.initial_pair, static_cast<std::size_t>(n),
                            kInitialConcentration, rng);
      }
      if (config.order >= 3) {
        truth.initial_triple.resize(static_cast<std::size_t>(n) * n * n);
        fill_dirichlet_rows(truth.initial_triple, static_cast<std::size_t>(n),
                            kInitialConcentration, rng);
      }
      truth.transition.resize(ipow(n, config.order + 1));
      fill_dirichlet_rows(truth.transition, static_cast<std::size_t>(n),
                          kTransitionConcentration, rng);

      std::vector<double> base(dim);
      for (double& v : base) v = config.mean_separation * normal(rng);

      truth.emissions.resize(n);
      for (int s = 0; s < n; ++s) {
        GmmEmission& e = truth.emissions[s];
        e.dim = dim;
        e.weights = {1.0};
        e.means.resize(dim);
        e.variances.assign(dim, 1.0);
        for (int d = 0; d < dim; ++d)
          e.means[d] = base[d] + state_offsets[static_cast<std::size_t>(s) * dim + d];
      }
    }
    validate_model(truth);
    write_hohm(truth, out_dir / "ground_truth" / (speaker + ".hohm"));

    for (int sentence = 1; sentence <= config.n_sentences; ++sentence) {
      for (int rep = 1; rep <= config.n_repetitions; ++rep) {
        std::mt19937_64 rng(mix_seed(config.rng_seed, 2 + static_cast<uint64_t>(spk),
                                     static_cast<uint64_t>(sentence),
                                     static_cast<uint64_t>(rep)));
        std::uniform_int_distribution<int> duration(config.min_duration, config.max_duration);
        const int frames = duration(rng);

        std::vector<int> states(frames);
        for (int t = 0; t < frames; ++t) {
          if (t == 0) {
            states[t] = sample_row(truth.initial, rng);
          } else if (t == 1 && config.order >= 2) {
            states[t] = sample_row(
                std::span<const double>(truth.initial_pair.data() +
                                            static_cast<std::size_t>(states[0]) * n, n),
                rng);
          } else if (t == 2 && config.order >= 3) {
            states[t] = sample_row(
                std::span<const double>(
                    truth.initial_triple.data() +
                        (static_cast<std::size_t>(states[0]) * n + states[1]) * n, n),
                rng);
          } else {
            std::size_t history = 0;
            for (int u = std::min(t, config.order); u >= 1; --u)
              history = history * n + static_cast<std::size_t>(states[t - u]);
            states[t] = sample_row(
                std::span<const double>(truth.transition.data() + history * n, n), rng);
          }
        }

        FeatureSequence obs;
        obs.dim = dim;
        obs.values.resize(static_cast<std::size_t>(frames) * dim);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int t = 0; t < frames; ++t) {
          const GmmEmission& e = truth.emissions[states[t]];
          for (int d = 0; d < dim; ++d)
            obs.values[static_cast<std::size_t>(t) * dim + d] =
                e.means[d] + std::sqrt(e.variances[d]) * normal(rng);
        }

        const std::string name = feature_name(speaker, sentence, rep);
        obs.source_id = speaker + "_s" + std::to_string(sentence) + "_r" + std::to_string(rep);
        write_hofv(obs, out_dir / "features" / name);

        UtteranceRecord rec;
        rec.speaker_id = speaker;
        rec.gender = spk % 2 == 0 ? Gender::male : Gender::female;
        rec.sentence_id = sentence;
        rec.repetition = rep;
        rec.payload = "features/" + name;
        records.push_back(std::move(rec));
      }
    }
    result.ground_truth.emplace_back(speaker, std::move(truth));
  }

  result.manifest = make_manifest(std::move(records));
  save_manifest(result.manifest, out_dir / "manifest.csv");
  return result;
}

}  // namespace hohmm
