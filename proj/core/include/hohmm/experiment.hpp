#ifndef HOHMM_EXPERIMENT_HPP
#define HOHMM_EXPERIMENT_HPP

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hohmm/eval.hpp"
#include "hohmm/manifest.hpp"
#include "hohmm/synth.hpp"
#include "hohmm/train.hpp"
#include "hohmm/verify.hpp"

namespace hohmm {

// Static-chunk parallel loop; with jobs <= 1 runs inline. The first
// exception thrown by any chunk is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

// Feature cache keyed by payload path relative to a base directory.
class FeatureStore {
 public:
  explicit FeatureStore(std::filesystem::path base_dir) : base_dir_(std::move(base_dir)) {}

  // Loads (once) and returns the sequence for a payload path.
  const FeatureSequence& get(const std::string& payload);
  void preload(const std::vector<std::string>& payloads, int jobs);

 private:
  std::filesystem::path base_dir_;
  std::map<std::string, FeatureSequence> cache_;
};

// The verification protocol: every test utterance of a claimant is a
// target trial against its own identity, and every test utterance of an
// imposter is a non-target trial against every claimant.
std::vector<TrialRecord> make_verification_trials(const std::vector<UtteranceRecord>& test_set,
                                                  const SplitSpec& spec);

// One model per speaker from its training-split utterances.
std::map<std::string, SpeakerModel> enroll_speakers(const std::vector<UtteranceRecord>& train_set,
                                                    FeatureStore& store,
                                                    const TrainConfig& config, int jobs);

// Scores every trial; a trial whose claimed speaker has no model is marked
// failed. Background scores are shared per observation across claimants.
std::vector<ScoreRecord> score_trials(const std::vector<TrialRecord>& trials,
                                      const std::map<std::string, SpeakerModel>& models,
                                      const ImposterCohort& cohort, FeatureStore& store, int jobs);

ScoreSet score_set_from_records(const std::vector<ScoreRecord>& records);

// Per-claimant EERs in claimant id order; the samples fed to the t tests.
std::vector<double> per_claimant_eers(const std::vector<ScoreRecord>& records);

struct ExperimentConfig {
  SynthConfig synth;
  TrainConfig train;  // order is overridden per classifier
  std::vector<int> orders = {1, 2, 3};
  int n_claimants = 10;
  int n_imposters = 5;
  int jobs = 1;
};

struct ClassifierOutcome {
  int order = 0;
  std::string label;
  EerResult eer;
  std::vector<double> claimant_eers;
  std::vector<ScoreRecord> scores;
};

struct ExperimentResult {
  std::vector<ClassifierOutcome> outcomes;
  std::vector<LabeledTTest> ttests;
};

// synth -> train (one session per order) -> score -> evaluate, writing all
// intermediate artifacts under out_dir.
ExperimentResult run_synthetic_experiment(const ExperimentConfig& config,
                                          const std::filesystem::path& out_dir);

}  // namespace hohmm

#endif
