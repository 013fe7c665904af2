#ifndef HOHMM_VERIFY_HPP
#define HOHMM_VERIFY_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hohmm/features.hpp"
#include "hohmm/hmm.hpp"
#include "hohmm/train.hpp"

namespace hohmm {

struct SpeakerModel {
  std::string speaker_id;
  HmmModel model;
};

struct ImposterCohort {
  std::vector<SpeakerModel> models;
};

void validate_cohort(const ImposterCohort& cohort);

struct Trial {
  std::string claimed_speaker;
  FeatureSequence observation;
  std::optional<std::string> true_speaker;
};

// The observation must be at least as long as the claimed model's order.
void validate_trial(const Trial& trial, const HmmModel& claimed_model);

enum class Decision { accept, reject };

struct TrialScore {
  double llr = 0.0;  // claimant_score - background_score, exactly
  double claimant_score = 0.0;
  double background_score = 0.0;
  std::optional<Decision> decision;
  std::optional<double> threshold_used;
};

// init_model + baum_welch wrapped in a SpeakerModel.
SpeakerModel enroll(const std::string& speaker_id, const std::vector<FeatureSequence>& utterances,
                    const TrainConfig& config);

// Duration-normalized log-likelihood (1/T) log P(O | model).
double claimant_score(const FeatureSequence& observation, const SpeakerModel& claimant);

// Mean of the cohort members' duration-normalized log-likelihoods.
double background_score(const FeatureSequence& observation, const ImposterCohort& cohort);

TrialScore log_likelihood_ratio(const FeatureSequence& observation, const SpeakerModel& claimant,
                                const ImposterCohort& cohort);

// Scores one trial against its claimed speaker's model.
TrialScore score_trial(const Trial& trial, const SpeakerModel& claimant,
                       const ImposterCohort& cohort);

// Accept iff llr >= theta (the boundary accepts).
TrialScore decide(TrialScore score, double theta);

// Running-average decision threshold. An unset window keeps the whole
// score history ("all trials so far").
struct ThresholdState {
  double theta = 0.0;
  std::vector<double> history;
  std::optional<std::size_t> window;
};

ThresholdState update_threshold(ThresholdState state, double new_score);

// Trial list CSV: `trial_id,claimed_speaker,true_speaker,feature_path`.
struct TrialRecord {
  std::string trial_id;
  std::string claimed_speaker;
  std::string true_speaker;
  std::string feature_path;  // relative to the trial file location
};

std::vector<TrialRecord> load_trials(const std::filesystem::path& path);
void save_trials(const std::vector<TrialRecord>& trials, const std::filesystem::path& path);

// Score CSV: `trial_id,claimed_speaker,true_speaker,is_target,llr` with
// is_target in {0,1}; a trial that could not be scored carries the literal
// llr value `failed`.
struct ScoreRecord {
  std::string trial_id;
  std::string claimed_speaker;
  std::string true_speaker;
  bool is_target = false;
  double llr = 0.0;
  bool failed = false;
};

void save_scores(const std::vector<ScoreRecord>& scores, const std::filesystem::path& path);
std::vector<ScoreRecord> load_scores(const std::filesystem::path& path);

}  // namespace hohmm

#endif
