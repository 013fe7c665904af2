#include "hohmm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace hohmm {

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(std::max(jobs, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

const FeatureSequence& FeatureStore::get(const std::string& payload) {
  auto it = cache_.find(payload);
  if (it == cache_.end())
    it = cache_.emplace(payload, read_hofv(base_dir_ / payload)).first;
  return it->second;
}

void FeatureStore::preload(const std::vector<std::string>& payloads, int jobs) {
  std::vector<std::string> missing;
  for (const std::string& p : payloads)
    if (!cache_.count(p)) missing.push_back(p);
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());

  std::vector<FeatureSequence> loaded(missing.size());
  parallel_for(missing.size(), jobs,
               [&](std::size_t i) { loaded[i] = read_hofv(base_dir_ / missing[i]); });
  for (std::size_t i = 0; i < missing.size(); ++i)
    cache_.emplace(missing[i], std::move(loaded[i]));
}

std::vector<TrialRecord> make_verification_trials(const std::vector<UtteranceRecord>& test_set,
                                                  const SplitSpec& spec) {
  if (spec.claimant_ids.empty()) throw std::invalid_argument("trials: no claimants configured");
  std::vector<TrialRecord> trials;
  int counter = 0;
  const auto next_id = [&counter]() {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "t%06d", ++counter);
    return std::string(buf);
  };
  for (const UtteranceRecord& rec : test_set) {
    if (spec.claimant_ids.count(rec.speaker_id)) {
      trials.push_back({next_id(), rec.speaker_id, rec.speaker_id, rec.payload});
    } else if (spec.imposter_ids.count(rec.speaker_id)) {
      for (const std::string& claimant : spec.claimant_ids)
        trials.push_back({next_id(), claimant, rec.speaker_id, rec.payload});
    }
  }
  return trials;
}

std::map<std::string, SpeakerModel> enroll_speakers(const std::vector<UtteranceRecord>& train_set,
                                                    FeatureStore& store,
                                                    const TrainConfig& config, int jobs) {
  std::map<std::string, std::vector<std::string>> payloads_by_speaker;
  for (const UtteranceRecord& rec : train_set)
    payloads_by_speaker[rec.speaker_id].push_back(rec.payload);

  std::vector<std::string> speakers;
  for (const auto& [id, payloads] : payloads_by_speaker) {
    speakers.push_back(id);
    store.preload(payloads, jobs);
  }

  std::vector<SpeakerModel> trained(speakers.size());
  parallel_for(speakers.size(), jobs, [&](std::size_t i) {
    std::vector<FeatureSequence> utterances;
    for (const std::string& payload : payloads_by_speaker[speakers[i]])
      utterances.push_back(store.get(payload));
    trained[i] = enroll(speakers[i], utterances, config);
  });

  std::map<std::string, SpeakerModel> models;
  for (SpeakerModel& sm : trained) models.emplace(sm.speaker_id, std::move(sm));
  return models;
}

std::vector<ScoreRecord> score_trials(const std::vector<TrialRecord>& trials,
                                      const std::map<std::string, SpeakerModel>& models,
                                      const ImposterCohort& cohort, FeatureStore& store,
                                      int jobs) {
  validate_cohort(cohort);

  std::vector<std::string> payloads;
  payloads.reserve(trials.size());
  for (const TrialRecord& t : trials) payloads.push_back(t.feature_path);
  store.preload(payloads, jobs);
  std::sort(payloads.begin(), payloads.end());
  payloads.erase(std::unique(payloads.begin(), payloads.end()), payloads.end());

  std::map<std::string, double> background;
  {
    std::vector<double> values(payloads.size());
    parallel_for(payloads.size(), jobs, [&](std::size_t i) {
      values[i] = background_score(store.get(payloads[i]), cohort);
    });
    for (std::size_t i = 0; i < payloads.size(); ++i) background.emplace(payloads[i], values[i]);
  }

  std::vector<ScoreRecord> records(trials.size());
  parallel_for(trials.size(), jobs, [&](std::size_t i) {
    const TrialRecord& t = trials[i];
    ScoreRecord rec;
    rec.trial_id = t.trial_id;
    rec.claimed_speaker = t.claimed_speaker;
    rec.true_speaker = t.true_speaker;
    if (t.true_speaker.empty())
      throw std::runtime_error("trial " + t.trial_id + ": true_speaker required for scoring");
    rec.is_target = t.claimed_speaker == t.true_speaker;
    const auto it = models.find(t.claimed_speaker);
    if (it == models.end()) {
      rec.failed = true;
    } else {
      const double claimant = claimant_score(store.get(t.feature_path), it->second);
      rec.llr = claimant - background.at(t.feature_path);
    }
    records[i] = std::move(rec);
  });
  return records;
}

ScoreSet score_set_from_records(const std::vector<ScoreRecord>& records) {
  ScoreSet set;
  for (const ScoreRecord& rec : records) {
    if (rec.failed) continue;
    (rec.is_target ? set.genuine : set.imposter).push_back(rec.llr);
  }
  return set;
}

std::vector<double> per_claimant_eers(const std::vector<ScoreRecord>& records) {
  std::map<std::string, ScoreSet> by_claimant;
  for (const ScoreRecord& rec : records) {
    if (rec.failed) continue;
    ScoreSet& set = by_claimant[rec.claimed_speaker];
    (rec.is_target ? set.genuine : set.imposter).push_back(rec.llr);
  }
  std::vector<double> eers;
  for (const auto& [claimant, set] : by_claimant) {
    if (set.genuine.empty() || set.imposter.empty())
      throw std::runtime_error("claimant " + claimant + ": needs target and non-target trials");
    eers.push_back(compute_eer(set).eer);
  }
  return eers;
}

ExperimentResult run_synthetic_experiment(const ExperimentConfig& config,
                                          const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const fs::path corpus_dir = out_dir / "corpus";
  const SynthResult synth = synth_corpus(config.synth, corpus_dir);

  const SplitSpec spec =
      make_default_split(synth.manifest, config.n_claimants, config.n_imposters);
  const SplitResult parts = split(synth.manifest, spec);

  const std::vector<TrialRecord> trials = make_verification_trials(parts.test, spec);
  save_trials(trials, out_dir / "trials.csv");

  FeatureStore store(corpus_dir);

  ExperimentResult result;
  std::vector<LabeledEer> labeled_eers;
  for (int order : config.orders) {
    TrainConfig train_config = config.train;
    train_config.order = order;

    std::map<std::string, SpeakerModel> models =
        enroll_speakers(parts.train, store, train_config, config.jobs);

    const fs::path model_dir = out_dir / ("models_hmm" + std::to_string(order));
    fs::create_directories(model_dir);
    for (const auto& [id, sm] : models) write_hohm(sm.model, model_dir / (id + ".hohm"));

    ImposterCohort cohort;
    for (const std::string& id : spec.imposter_ids) cohort.models.push_back(models.at(id));

    ClassifierOutcome outcome;
    outcome.order = order;
    outcome.label = "HMM" + std::to_string(order) + "s";
    outcome.scores = score_trials(trials, models, cohort, store, config.jobs);
    save_scores(outcome.scores, out_dir / ("scores_hmm" + std::to_string(order) + ".csv"));

    outcome.eer = compute_eer(score_set_from_records(outcome.scores));
    outcome.claimant_eers = per_claimant_eers(outcome.scores);
    labeled_eers.push_back({outcome.label, outcome.eer});
    result.outcomes.push_back(std::move(outcome));
  }

  // t tests compare every classifier against the last-listed one over the
  // per-claimant EER samples; positive t favors the reference.
  if (result.outcomes.size() >= 2) {
    const ClassifierOutcome& reference = result.outcomes.back();
    for (std::size_t i = 0; i + 1 < result.outcomes.size(); ++i) {
      const ClassifierOutcome& other = result.outcomes[i];
      LabeledTTest lt;
      lt.label = reference.label + "_vs_" + other.label;
      lt.result = t_test(other.claimant_eers, reference.claimant_eers);
      result.ttests.push_back(std::move(lt));
    }
  }

  std::vector<DetCurve> curves;
  for (const ClassifierOutcome& outcome : result.outcomes)
    curves.push_back(build_det_curve(outcome.label, score_set_from_records(outcome.scores)));
  emit_det(curves, out_dir / "det.csv", out_dir / "det.svg");
  emit_report(labeled_eers, result.ttests, out_dir / "report.json");

  return result;
}

}  // namespace hohmm
