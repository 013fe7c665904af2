#include "hohmm/verify.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "hohmm/io_util.hpp"

namespace hohmm {

void validate_cohort(const ImposterCohort& cohort) {
  if (cohort.models.empty()) throw std::invalid_argument("cohort: needs at least one model");
  std::set<std::string> ids;
  for (const SpeakerModel& sm : cohort.models)
    if (!ids.insert(sm.speaker_id).second)
      throw std::invalid_argument("cohort: duplicate speaker id " + sm.speaker_id);
}

SpeakerModel enroll(const std::string& speaker_id, const std::vector<FeatureSequence>& utterances,
                    const TrainConfig& config) {
  if (speaker_id.empty()) throw std::invalid_argument("enroll: empty speaker id");
  if (utterances.empty())
    throw std::invalid_argument("enroll: no utterances for speaker " + speaker_id);
  const HmmModel init = init_model(utterances, config);
  TrainResult trained = baum_welch(utterances, init, config);
  return SpeakerModel{speaker_id, std::move(trained.model)};
}

double claimant_score(const FeatureSequence& observation, const SpeakerModel& claimant) {
  const double ll = forward_log_likelihood(claimant.model, observation);
  return ll / static_cast<double>(observation.frames());
}

double background_score(const FeatureSequence& observation, const ImposterCohort& cohort) {
  validate_cohort(cohort);
  double sum = 0.0;
  for (const SpeakerModel& sm : cohort.models) sum += claimant_score(observation, sm);
  return sum / static_cast<double>(cohort.models.size());
}

TrialScore log_likelihood_ratio(const FeatureSequence& observation, const SpeakerModel& claimant,
                                const ImposterCohort& cohort) {
  TrialScore score;
  score.claimant_score = claimant_score(observation, claimant);
  score.background_score = background_score(observation, cohort);
  score.llr = score.claimant_score - score.background_score;
  return score;
}

void validate_trial(const Trial& trial, const HmmModel& claimed_model) {
  if (trial.claimed_speaker.empty()) throw std::invalid_argument("trial: empty claimed speaker");
  validate_features(trial.observation);
  if (trial.observation.frames() < static_cast<std::size_t>(claimed_model.initial_span()))
    throw std::invalid_argument("trial: observation shorter than the claimed model's order");
}

TrialScore score_trial(const Trial& trial, const SpeakerModel& claimant,
                       const ImposterCohort& cohort) {
  if (trial.claimed_speaker != claimant.speaker_id)
    throw std::invalid_argument("trial claims " + trial.claimed_speaker + " but the model is for " +
                                claimant.speaker_id);
  validate_trial(trial, claimant.model);
  return log_likelihood_ratio(trial.observation, claimant, cohort);
}

TrialScore decide(TrialScore score, double theta) {
  if (!std::isfinite(score.llr)) throw std::invalid_argument("decide: non-finite llr");
  score.decision = score.llr >= theta ? Decision::accept : Decision::reject;
  score.threshold_used = theta;
  return score;
}

ThresholdState update_threshold(ThresholdState state, double new_score) {
  if (state.window && *state.window < 1)
    throw std::invalid_argument("threshold window must be >= 1");
  state.history.push_back(new_score);
  if (state.window && state.history.size() > *state.window)
    state.history.erase(state.history.begin(),
                        state.history.begin() +
                            static_cast<std::ptrdiff_t>(state.history.size() - *state.window));
  double sum = 0.0;
  for (double s : state.history) sum += s;
  state.theta = sum / static_cast<double>(state.history.size());
  return state;
}

namespace {
constexpr const char* kTrialHeader = "trial_id,claimed_speaker,true_speaker,feature_path";
constexpr const char* kScoreHeader = "trial_id,claimed_speaker,true_speaker,is_target,llr";
}  // namespace

std::vector<TrialRecord> load_trials(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_text_lines(path);
  if (lines.empty() || lines[0] != kTrialHeader)
    throw std::runtime_error("trials " + path.string() + ": missing header '" + kTrialHeader + "'");
  std::vector<TrialRecord> trials;
  std::set<std::string> ids;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string context = "trials " + path.string() + " line " + std::to_string(i + 1);
    const std::vector<std::string> fields = split_csv_row(lines[i]);
    if (fields.size() != 4)
      throw std::runtime_error(context + ": expected 4 fields, got " +
                               std::to_string(fields.size()));
    TrialRecord rec{fields[0], fields[1], fields[2], fields[3]};
    if (rec.trial_id.empty() || rec.claimed_speaker.empty() || rec.feature_path.empty())
      throw std::runtime_error(context + ": empty required field");
    if (!ids.insert(rec.trial_id).second)
      throw std::runtime_error(context + ": duplicate trial id " + rec.trial_id);
    trials.push_back(std::move(rec));
  }
  return trials;
}

void save_trials(const std::vector<TrialRecord>& trials, const std::filesystem::path& path) {
  std::string out(kTrialHeader);
  out.push_back('\n');
  for (const TrialRecord& t : trials) {
    out += t.trial_id;
    out += ',';
    out += t.claimed_speaker;
    out += ',';
    out += t.true_speaker;
    out += ',';
    out += t.feature_path;
    out.push_back('\n');
  }
  atomic_write_file(path, out);
}

void save_scores(const std::vector<ScoreRecord>& scores, const std::filesystem::path& path) {
  std::string out(kScoreHeader);
  out.push_back('\n');
  for (const ScoreRecord& s : scores) {
    out += s.trial_id;
    out += ',';
    out += s.claimed_speaker;
    out += ',';
    out += s.true_speaker;
    out += ',';
    out += s.is_target ? '1' : '0';
    out += ',';
    out += s.failed ? "failed" : format_double(s.llr);
    out.push_back('\n');
  }
  atomic_write_file(path, out);
}

std::vector<ScoreRecord> load_scores(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_text_lines(path);
  if (lines.empty() || lines[0] != kScoreHeader)
    throw std::runtime_error("scores " + path.string() + ": missing header '" + kScoreHeader + "'");
  std::vector<ScoreRecord> scores;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string context = "scores " + path.string() + " line " + std::to_string(i + 1);
    const std::vector<std::string> fields = split_csv_row(lines[i]);
    if (fields.size() != 5)
      throw std::runtime_error(context + ": expected 5 fields, got " +
                               std::to_string(fields.size()));
    ScoreRecord rec;
    rec.trial_id = fields[0];
    rec.claimed_speaker = fields[1];
    rec.true_speaker = fields[2];
    if (fields[3] == "1")
      rec.is_target = true;
    else if (fields[3] == "0")
      rec.is_target = false;
    else
      throw std::runtime_error(context + ": is_target must be 0 or 1");
    if (fields[4] == "failed") {
      rec.failed = true;
    } else {
      rec.llr = parse_double(fields[4], context);
      if (!std::isfinite(rec.llr)) throw std::runtime_error(context + ": non-finite llr");
    }
    scores.push_back(std::move(rec));
  }
  return scores;
}

}  // namespace hohmm
