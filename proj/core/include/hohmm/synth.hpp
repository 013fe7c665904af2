#ifndef HOHMM_SYNTH_HPP
#define HOHMM_SYNTH_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hohmm/hmm.hpp"
#include "hohmm/manifest.hpp"

namespace hohmm {

// Desk-scale synthetic corpus: one ground-truth HMM per speaker at the
// feature level, no audio. Speakers share a state-mean constellation and
// differ by a base mean drawn at mean_separation scale plus their own
// transition dynamics, so mean_separation is the single task-difficulty
// knob.
struct SynthConfig {
  int n_speakers = 0;
  int n_sentences = 0;
  int n_repetitions = 0;
  int feature_dim = 8;
  int states = 3;
  int order = 3;
  double mean_separation = 0.22;
  int min_duration = 72;   // frames, ~1 s at the default front end
  int max_duration = 217;  // frames, ~3 s
  uint64_t rng_seed = 1;
};

void validate_synth_config(const SynthConfig& config);

struct SynthResult {
  CorpusManifest manifest;
  std::vector<std::pair<std::string, HmmModel>> ground_truth;
};

// Writes features/<speaker>_s<S>_r<R>.hofv files, ground_truth/<speaker>.hohm
// models, and manifest.csv under out_dir. Byte-identical output for
// identical configs.
SynthResult synth_corpus(const SynthConfig& config, const std::filesystem::path& out_dir);

}  // namespace hohmm

#endif
