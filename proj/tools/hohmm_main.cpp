// hohmm: text-independent speaker verification with first-, second-, and
// third-order HMMs. Pipeline stages communicate only through documented
// file formats (manifest CSV, HOFV features, HOHM models, score CSV), so
// every stage can run and be inspected on its own.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hohmm/eval.hpp"
#include "hohmm/experiment.hpp"
#include "hohmm/io_util.hpp"
#include "hohmm/manifest.hpp"
#include "hohmm/mfcc.hpp"
#include "hohmm/synth.hpp"
#include "hohmm/train.hpp"
#include "hohmm/verify.hpp"
#include "hohmm/wav.hpp"

namespace fs = std::filesystem;

namespace {

enum class LogLevel { silent = 0, error = 1, warn = 2, info = 3, debug = 4 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("HOHMM_LOG");
    if (!env) return LogLevel::warn;
    const std::string v(env);
    if (v == "silent" || v == "0") return LogLevel::silent;
    if (v == "error" || v == "1") return LogLevel::error;
    if (v == "warn" || v == "2") return LogLevel::warn;
    if (v == "info" || v == "3") return LogLevel::info;
    if (v == "debug" || v == "4") return LogLevel::debug;
    return LogLevel::warn;
  }();
  return level;
}

void log_at(LogLevel level, const char* tag, const std::string& message) {
  if (log_level() >= level) std::fprintf(stderr, "hohmm [%s] %s\n", tag, message.c_str());
}

void log_error(const std::string& m) { log_at(LogLevel::error, "error", m); }
void log_warn(const std::string& m) { log_at(LogLevel::warn, "warn", m); }
void log_info(const std::string& m) { log_at(LogLevel::info, "info", m); }

// "1,2,5" or "1-4" or a mix of both.
std::set<int> parse_int_set(const std::string& text) {
  std::set<int> out;
  std::string token;
  const auto flush = [&]() {
    if (token.empty()) throw std::invalid_argument("empty entry in list '" + text + "'");
    const std::size_t dash = token.find('-');
    if (dash == std::string::npos) {
      out.insert(static_cast<int>(hohmm::parse_long(token, "list")));
    } else {
      const int lo = static_cast<int>(hohmm::parse_long(token.substr(0, dash), "list"));
      const int hi = static_cast<int>(hohmm::parse_long(token.substr(dash + 1), "list"));
      if (hi < lo) throw std::invalid_argument("empty range '" + token + "'");
      for (int v = lo; v <= hi; ++v) out.insert(v);
    }
    token.clear();
  };
  for (char c : text) {
    if (c == ',')
      flush();
    else
      token.push_back(c);
  }
  flush();
  return out;
}

std::vector<std::string> parse_id_list(const std::string& text) {
  std::vector<std::string> out;
  std::string token;
  for (char c : text) {
    if (c == ',') {
      if (!token.empty()) out.push_back(token);
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

int effective_jobs(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void add_config_file(CLI::App* cmd) {
  cmd->set_config("--config", "", "flat key = value configuration file; flags override it");
  cmd->allow_config_extras(false);
}

// ---------------------------------------------------------------- synth --

struct SynthArgs {
  hohmm::SynthConfig config;
  std::string out;
};

int run_synth(const SynthArgs& args) {
  const hohmm::SynthResult result = hohmm::synth_corpus(args.config, args.out);
  std::printf("%s\n", (fs::path(args.out) / "manifest.csv").string().c_str());
  std::printf("records: %zu\n", result.manifest.records.size());
  return 0;
}

// -------------------------------------------------------------- extract --

struct ExtractArgs {
  std::string manifest;
  std::string out;
  std::string out_manifest;
  hohmm::FrameConfig frame;
  hohmm::MfccConfig mfcc;
  bool no_deltas = false;
  int jobs = 0;
};

int run_extract(ExtractArgs args) {
  args.mfcc.include_deltas = !args.no_deltas;
  hohmm::validate_frame_config(args.frame);
  hohmm::validate_mfcc_config(args.mfcc);

  const hohmm::CorpusManifest manifest = hohmm::load_manifest(args.manifest);
  if (manifest.records.empty()) throw std::runtime_error("manifest has no records");
  const fs::path manifest_dir = fs::path(args.manifest).parent_path();
  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);

  for (const hohmm::UtteranceRecord& rec : manifest.records)
    if (rec.payload.size() >= 5 && rec.payload.ends_with(".hofv"))
      throw std::runtime_error("manifest already points at feature files (" + rec.payload +
                               "); nothing to extract");

  std::vector<hohmm::UtteranceRecord> extracted(manifest.records.size());
  std::vector<std::string> failures(manifest.records.size());
  hohmm::parallel_for(manifest.records.size(), effective_jobs(args.jobs), [&](std::size_t i) {
    const hohmm::UtteranceRecord& rec = manifest.records[i];
    char name[64];
    std::snprintf(name, sizeof(name), "%s_s%02d_r%02d.hofv", rec.speaker_id.c_str(),
                  rec.sentence_id, rec.repetition);
    try {
      const hohmm::AudioSignal audio = hohmm::read_wav(manifest_dir / rec.payload);
      hohmm::FeatureSequence features = hohmm::extract_mfcc(audio, args.frame, args.mfcc);
      features.source_id = rec.speaker_id + "_s" + std::to_string(rec.sentence_id) + "_r" +
                           std::to_string(rec.repetition);
      hohmm::write_hofv(features, out_dir / name);
      hohmm::UtteranceRecord out_rec = rec;
      out_rec.payload = name;
      extracted[i] = std::move(out_rec);
    } catch (const std::exception& e) {
      failures[i] = rec.payload + ": " + e.what();
    }
  });

  std::vector<hohmm::UtteranceRecord> good;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < extracted.size(); ++i) {
    if (!failures[i].empty()) {
      ++failed;
      log_error(failures[i]);
    } else {
      good.push_back(extracted[i]);
    }
  }

  const fs::path out_manifest =
      args.out_manifest.empty() ? out_dir / "manifest.csv" : fs::path(args.out_manifest);
  hohmm::save_manifest(hohmm::make_manifest(good), out_manifest);
  std::printf("%s\n", out_manifest.string().c_str());
  std::printf("extracted: %zu, failed: %zu\n", good.size(), failed);
  return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------- train --

struct TrainArgs {
  std::string manifest;
  std::string split;
  hohmm::TrainConfig config;
  std::string out_dir;
  int jobs = 0;
};

int run_train(const TrainArgs& args) {
  hohmm::validate_train_config(args.config);
  const hohmm::CorpusManifest manifest = hohmm::load_manifest(args.manifest);
  hohmm::SplitSpec spec;
  spec.train_sentences = parse_int_set(args.split);
  const hohmm::SplitResult parts = hohmm::split(manifest, spec);
  if (parts.train.empty()) throw std::runtime_error("training split selected no utterances");

  std::map<std::string, std::vector<std::string>> payloads;
  for (const hohmm::UtteranceRecord& rec : parts.train)
    payloads[rec.speaker_id].push_back(rec.payload);
  std::vector<std::string> speakers;
  for (const auto& [id, _] : payloads) speakers.push_back(id);

  hohmm::FeatureStore store(fs::path(args.manifest).parent_path());
  const int jobs = effective_jobs(args.jobs);
  for (const auto& [id, paths] : payloads) store.preload(paths, jobs);

  fs::create_directories(args.out_dir);
  std::vector<double> final_ll(speakers.size());
  std::vector<std::string> failures(speakers.size());
  hohmm::parallel_for(speakers.size(), jobs, [&](std::size_t i) {
    try {
      std::vector<hohmm::FeatureSequence> utterances;
      for (const std::string& p : payloads[speakers[i]]) utterances.push_back(store.get(p));
      const hohmm::HmmModel init = hohmm::init_model(utterances, args.config);
      const hohmm::TrainResult result = hohmm::baum_welch(utterances, init, args.config);
      hohmm::write_hohm(result.model, fs::path(args.out_dir) / (speakers[i] + ".hohm"));
      final_ll[i] = result.log_likelihoods.back();
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });

  std::size_t failed = 0;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    if (!failures[i].empty()) {
      ++failed;
      log_error(speakers[i] + ": " + failures[i]);
      continue;
    }
    std::printf("%s %.6f\n", speakers[i].c_str(), final_ll[i]);
  }
  if (failed > 0) {
    log_warn(std::to_string(failed) + " speaker(s) failed; models for the rest were kept");
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------- score --

struct ScoreArgs {
  std::string models_dir;
  std::string cohort_ids;
  std::string trials;
  std::string out;
  int jobs = 0;
};

int run_score(const ScoreArgs& args) {
  std::map<std::string, hohmm::SpeakerModel> models;
  for (const auto& entry : fs::directory_iterator(args.models_dir)) {
    if (entry.path().extension() != ".hohm") continue;
    const std::string id = entry.path().stem().string();
    models.emplace(id, hohmm::SpeakerModel{id, hohmm::read_hohm(entry.path())});
  }
  if (models.empty()) throw std::runtime_error("no .hohm models in " + args.models_dir);

  hohmm::ImposterCohort cohort;
  for (const std::string& id : parse_id_list(args.cohort_ids)) {
    const auto it = models.find(id);
    if (it == models.end())
      throw std::runtime_error("cohort id '" + id + "' has no model in " + args.models_dir);
    cohort.models.push_back(it->second);
  }

  const std::vector<hohmm::TrialRecord> trials = hohmm::load_trials(args.trials);
  if (trials.empty()) throw std::runtime_error("no trials in " + args.trials);
  hohmm::FeatureStore store(fs::path(args.trials).parent_path());
  const std::vector<hohmm::ScoreRecord> scores =
      hohmm::score_trials(trials, models, cohort, store, effective_jobs(args.jobs));
  hohmm::save_scores(scores, args.out);

  std::size_t failed = 0;
  for (const hohmm::ScoreRecord& s : scores)
    if (s.failed) {
      ++failed;
      log_error("trial " + s.trial_id + ": no model for claimed speaker " + s.claimed_speaker);
    }
  std::printf("%s\n", args.out.c_str());
  std::printf("scored: %zu, failed: %zu\n", scores.size() - failed, failed);
  return failed == 0 ? 0 : 1;
}

// ------------------------------------------------------------- evaluate --

struct EvaluateArgs {
  std::vector<std::string> scores;
  std::vector<std::string> labels;
  std::string out_report;
  std::string out_det;
  bool no_ttests = false;
};

int run_evaluate(const EvaluateArgs& args) {
  if (args.scores.empty()) throw std::invalid_argument("at least one --scores file is required");
  if (args.scores.size() != args.labels.size())
    throw std::invalid_argument("--scores and --labels counts differ (" +
                                std::to_string(args.scores.size()) + " vs " +
                                std::to_string(args.labels.size()) + ")");

  std::vector<hohmm::LabeledEer> results;
  std::vector<hohmm::DetCurve> curves;
  std::vector<std::vector<double>> claimant_eers(args.scores.size());
  const bool want_ttests = !args.no_ttests && args.scores.size() >= 2;
  for (std::size_t i = 0; i < args.scores.size(); ++i) {
    std::vector<hohmm::ScoreRecord> records = hohmm::load_scores(args.scores[i]);
    const std::size_t failed =
        static_cast<std::size_t>(std::count_if(records.begin(), records.end(),
                                               [](const auto& r) { return r.failed; }));
    if (failed > 0)
      log_warn(args.scores[i] + ": skipping " + std::to_string(failed) + " failed trial(s)");
    const hohmm::ScoreSet set = hohmm::score_set_from_records(records);
    results.push_back({args.labels[i], hohmm::compute_eer(set)});
    curves.push_back(hohmm::build_det_curve(args.labels[i], set));
    if (want_ttests) {
      try {
        claimant_eers[i] = hohmm::per_claimant_eers(records);
      } catch (const std::exception& e) {
        log_warn(args.scores[i] + ": no per-claimant EER samples (" + std::string(e.what()) + ")");
      }
    }
  }

  std::vector<hohmm::LabeledTTest> ttests;
  if (want_ttests) {
    const std::size_t ref = results.size() - 1;
    for (std::size_t i = 0; i + 1 < results.size(); ++i) {
      if (claimant_eers[i].size() != claimant_eers[ref].size() || claimant_eers[i].size() < 2) {
        log_warn("skipping t test " + args.labels[ref] + " vs " + args.labels[i] +
                 ": need equal-size per-claimant samples");
        continue;
      }
      ttests.push_back({results[ref].label + "_vs_" + results[i].label,
                        hohmm::t_test(claimant_eers[i], claimant_eers[ref])});
    }
  }

  hohmm::emit_report(results, ttests, args.out_report);
  fs::path det_svg(args.out_det);
  det_svg.replace_extension(".svg");
  hohmm::emit_det(curves, args.out_det, det_svg);

  std::printf("%s", hohmm::format_report_table(results, ttests).c_str());
  return 0;
}

// ---------------------------------------------------------------- ttest --

struct TTestArgs {
  std::string a;
  std::string b;
};

std::vector<double> load_column(const std::string& path) {
  std::vector<double> values;
  for (const std::string& line : hohmm::read_text_lines(path)) {
    if (line.empty()) continue;
    values.push_back(hohmm::parse_double(line, path));
  }
  return values;
}

int run_ttest(const TTestArgs& args) {
  const hohmm::TTestResult r = hohmm::t_test(load_column(args.a), load_column(args.b));
  std::printf("t = %.6f\n", r.t_value);
  std::printf("pooled sd = %.6f\n", r.sd_pooled);
  std::printf("significant at 0.05 (one-sided, critical %.3f): %s\n", hohmm::kTCritical005,
              r.significant_at_0_05 ? "yes" : "no");
  return 0;
}

// ------------------------------------------------------------ reproduce --

struct ReproduceArgs {
  hohmm::ExperimentConfig config;
  std::string orders = "1,2,3";
  std::string out;
};

int run_reproduce(ReproduceArgs args) {
  args.config.orders.clear();
  for (int order : parse_int_set(args.orders)) args.config.orders.push_back(order);
  args.config.jobs = effective_jobs(args.config.jobs);

  log_info("running synth/train/score/evaluate under " + args.out);
  const hohmm::ExperimentResult result =
      hohmm::run_synthetic_experiment(args.config, args.out);

  std::vector<hohmm::LabeledEer> rows;
  for (const hohmm::ClassifierOutcome& o : result.outcomes) rows.push_back({o.label, o.eer});
  std::printf("%s", hohmm::format_report_table(rows, result.ttests).c_str());
  std::printf("report: %s\n", (fs::path(args.out) / "report.json").string().c_str());
  std::printf("det:    %s\n", (fs::path(args.out) / "det.csv").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speaker verification with first-, second-, and third-order HMMs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hohmm 0.1.0");

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic feature corpus");
  add_config_file(synth);
  synth->add_option("--speakers", synth_args.config.n_speakers, "number of speakers")->required();
  synth->add_option("--sentences", synth_args.config.n_sentences, "sentences per speaker")
      ->required();
  synth->add_option("--reps", synth_args.config.n_repetitions, "repetitions per sentence")
      ->required();
  synth->add_option("--dim", synth_args.config.feature_dim, "feature dimension")
      ->capture_default_str();
  synth->add_option("--states", synth_args.config.states, "ground-truth states per speaker")
      ->capture_default_str();
  synth->add_option("--order", synth_args.config.order, "ground-truth model order (1-3)")
      ->capture_default_str();
  synth->add_option("--mean-separation", synth_args.config.mean_separation,
                    "speaker mean separation; smaller is harder")
      ->capture_default_str();
  synth->add_option("--min-duration", synth_args.config.min_duration, "shortest utterance, frames")
      ->capture_default_str();
  synth->add_option("--max-duration", synth_args.config.max_duration, "longest utterance, frames")
      ->capture_default_str();
  synth->add_option("--seed", synth_args.config.rng_seed, "RNG seed")->capture_default_str();
  synth->add_option("--out", synth_args.out, "output directory")->required();

  ExtractArgs extract_args;
  CLI::App* extract = app.add_subcommand("extract", "convert WAV audio to HOFV features");
  add_config_file(extract);
  extract->add_option("--manifest", extract_args.manifest, "manifest of WAV payloads")->required();
  extract->add_option("--out", extract_args.out, "output directory for feature files")->required();
  extract->add_option("--out-manifest", extract_args.out_manifest,
                      "where to write the derived manifest (default <out>/manifest.csv)");
  extract->add_option("--frame-ms", extract_args.frame.frame_length_ms, "frame length, ms")
      ->capture_default_str();
  extract->add_option("--overlap", extract_args.frame.overlap_fraction, "frame overlap fraction")
      ->capture_default_str();
  extract->add_option("--preemphasis", extract_args.frame.preemphasis_coefficient,
                      "pre-emphasis coefficient")
      ->capture_default_str();
  extract->add_option("--rate", extract_args.frame.target_rate, "processing sample rate, Hz")
      ->capture_default_str();
  extract->add_option("--n-static", extract_args.mfcc.n_static,
                      "static coefficients (log energy + cepstra)")
      ->capture_default_str();
  extract->add_flag("--no-deltas", extract_args.no_deltas, "skip delta coefficients");
  extract->add_option("--mel-filters", extract_args.mfcc.n_mel_filters, "mel filterbank size")
      ->capture_default_str();
  extract->add_option("--fft-size", extract_args.mfcc.fft_size, "FFT size (0 = auto)")
      ->capture_default_str();
  extract->add_option("--delta-window", extract_args.mfcc.delta_window, "delta regression window")
      ->capture_default_str();
  extract->add_option("--jobs", extract_args.jobs, "worker threads (0 = all cores)")
      ->capture_default_str();

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train one model per speaker");
  add_config_file(train);
  train->add_option("--manifest", train_args.manifest, "feature manifest")->required();
  train->add_option("--split", train_args.split, "training sentence ids, e.g. 1-4 or 1,2,3,4")
      ->required();
  train->add_option("--order", train_args.config.order, "model order (1, 2, or 3)")->required();
  train->add_option("--states", train_args.config.n_states, "states per model")
      ->capture_default_str();
  train->add_option("--mixtures", train_args.config.n_mixtures, "mixture components per state")
      ->capture_default_str();
  train->add_option("--max-iterations", train_args.config.max_iterations, "EM iteration cap")
      ->capture_default_str();
  train->add_option("--tolerance", train_args.config.log_likelihood_tolerance,
                    "EM stopping tolerance on total log-likelihood")
      ->capture_default_str();
  train->add_option("--variance-floor", train_args.config.variance_floor,
                    "variance floor relative to the global data variance")
      ->capture_default_str();
  train->add_option("--seed", train_args.config.rng_seed, "RNG seed")->capture_default_str();
  train->add_option("--out-dir", train_args.out_dir, "directory for HOHM model files")->required();
  train->add_option("--jobs", train_args.jobs, "worker threads (0 = all cores)")
      ->capture_default_str();

  ScoreArgs score_args;
  CLI::App* score = app.add_subcommand("score", "score verification trials");
  add_config_file(score);
  score->add_option("--models-dir", score_args.models_dir, "directory of HOHM models")->required();
  score->add_option("--cohort-ids", score_args.cohort_ids, "comma-separated imposter speaker ids")
      ->required();
  score->add_option("--trials", score_args.trials, "trial list CSV")->required();
  score->add_option("--out", score_args.out, "output score CSV")->required();
  score->add_option("--jobs", score_args.jobs, "worker threads (0 = all cores)")
      ->capture_default_str();

  EvaluateArgs evaluate_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "EER, DET curves, and significance tests");
  add_config_file(evaluate);
  evaluate->add_option("--scores", evaluate_args.scores, "score CSV (repeat per classifier)")
      ->required();
  evaluate->add_option("--labels", evaluate_args.labels, "classifier label (repeat per classifier)")
      ->required();
  evaluate->add_option("--out-report", evaluate_args.out_report, "report JSON path")->required();
  evaluate->add_option("--out-det", evaluate_args.out_det,
                       "DET CSV path (SVG written alongside)")
      ->required();
  evaluate->add_flag("--no-ttests", evaluate_args.no_ttests, "skip pairwise t tests");

  TTestArgs ttest_args;
  CLI::App* ttest = app.add_subcommand("ttest", "Student's t test between two samples");
  add_config_file(ttest);
  ttest->add_option("--a", ttest_args.a, "first sample, one value per line")->required();
  ttest->add_option("--b", ttest_args.b, "second sample, one value per line")->required();

  ReproduceArgs reproduce_args;
  reproduce_args.config.synth.n_speakers = 15;
  reproduce_args.config.synth.n_sentences = 8;
  reproduce_args.config.synth.n_repetitions = 9;
  reproduce_args.config.train.n_states = 3;
  reproduce_args.config.train.n_mixtures = 2;
  reproduce_args.config.train.max_iterations = 12;
  reproduce_args.config.train.log_likelihood_tolerance = 1e-2;
  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "desk-scale end-to-end run: synth, train per order, score, evaluate");
  add_config_file(reproduce);
  reproduce->add_option("--out", reproduce_args.out, "output directory")->required();
  reproduce->add_option("--seed", reproduce_args.config.synth.rng_seed, "corpus RNG seed")
      ->capture_default_str();
  reproduce->add_option("--speakers", reproduce_args.config.synth.n_speakers, "speakers")
      ->capture_default_str();
  reproduce->add_option("--sentences", reproduce_args.config.synth.n_sentences, "sentences")
      ->capture_default_str();
  reproduce->add_option("--reps", reproduce_args.config.synth.n_repetitions, "repetitions")
      ->capture_default_str();
  reproduce->add_option("--dim", reproduce_args.config.synth.feature_dim, "feature dimension")
      ->capture_default_str();
  reproduce->add_option("--truth-states", reproduce_args.config.synth.states,
                        "ground-truth states")
      ->capture_default_str();
  reproduce->add_option("--truth-order", reproduce_args.config.synth.order, "ground-truth order")
      ->capture_default_str();
  reproduce->add_option("--mean-separation", reproduce_args.config.synth.mean_separation,
                        "speaker separation knob")
      ->capture_default_str();
  reproduce->add_option("--min-duration", reproduce_args.config.synth.min_duration,
                        "shortest utterance, frames")
      ->capture_default_str();
  reproduce->add_option("--max-duration", reproduce_args.config.synth.max_duration,
                        "longest utterance, frames")
      ->capture_default_str();
  reproduce->add_option("--claimants", reproduce_args.config.n_claimants, "claimant speakers")
      ->capture_default_str();
  reproduce->add_option("--imposters", reproduce_args.config.n_imposters, "imposter speakers")
      ->capture_default_str();
  reproduce->add_option("--orders", reproduce_args.orders, "classifier orders to train")
      ->capture_default_str();
  reproduce->add_option("--states", reproduce_args.config.train.n_states, "classifier states")
      ->capture_default_str();
  reproduce->add_option("--mixtures", reproduce_args.config.train.n_mixtures,
                        "classifier mixtures per state")
      ->capture_default_str();
  reproduce->add_option("--max-iterations", reproduce_args.config.train.max_iterations,
                        "EM iteration cap")
      ->capture_default_str();
  reproduce->add_option("--train-seed", reproduce_args.config.train.rng_seed, "training RNG seed")
      ->capture_default_str();
  reproduce->add_option("--jobs", reproduce_args.config.jobs, "worker threads (0 = all cores)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) return run_synth(synth_args);
    if (extract->parsed()) return run_extract(extract_args);
    if (train->parsed()) return run_train(train_args);
    if (score->parsed()) return run_score(score_args);
    if (evaluate->parsed()) return run_evaluate(evaluate_args);
    if (ttest->parsed()) return run_ttest(ttest_args);
    if (reproduce->parsed()) return run_reproduce(reproduce_args);
  } catch (const std::invalid_argument& e) {
    log_error(e.what());
    return 2;
  } catch (const std::exception& e) {
    log_error(e.what());
    return 1;
  }
  return 2;
}
