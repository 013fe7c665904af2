// End-to-end checks of the hohmm binary. The test runner exports HOHMM_CLI
// with the tool path; without it these tests are skipped.

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "hohmm/features.hpp"
#include "hohmm/io_util.hpp"
#include "hohmm/manifest.hpp"
#include "hohmm/verify.hpp"
#include "hohmm/wav.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return std::getenv("HOHMM_CLI"); }

fs::path temp_dir(const std::string& tag) {
  const fs::path dir =
      fs::temp_directory_path() / ("hohmm_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string command = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("cli: synth validates, runs, and reruns identically") {
  if (!cli_path()) return;
  const fs::path dir = temp_dir("synth");

  CHECK(run_cli("synth --speakers 0 --sentences 2 --reps 2 --out " + (dir / "x").string()) == 2);
  CHECK(run_cli("synth --speakers 2 --sentences 2 --reps 2 --seed 5 --out missing-flag --order 9") ==
        2);

  const std::string flags =
      "synth --speakers 3 --sentences 2 --reps 2 --dim 2 --states 2 --order 1 "
      "--min-duration 4 --max-duration 8 --seed 5 --out ";
  CHECK(run_cli(flags + (dir / "a").string()) == 0);
  CHECK(run_cli(flags + (dir / "b").string()) == 0);
  CHECK(hohmm::read_file_bytes(dir / "a" / "manifest.csv") ==
        hohmm::read_file_bytes(dir / "b" / "manifest.csv"));
  CHECK(hohmm::read_file_bytes(dir / "a" / "features" / "spk001_s01_r01.hofv") ==
        hohmm::read_file_bytes(dir / "b" / "features" / "spk001_s01_r01.hofv"));
  CHECK(hohmm::load_manifest(dir / "a" / "manifest.csv").records.size() == 12);
  fs::remove_all(dir);
}

TEST_CASE("cli: train/score/evaluate pipeline on a tiny corpus") {
  if (!cli_path()) return;
  const fs::path dir = temp_dir("pipeline");

  REQUIRE(run_cli("synth --speakers 4 --sentences 2 --reps 3 --dim 2 --states 2 --order 1 "
                  "--mean-separation 3 --min-duration 6 --max-duration 10 --seed 11 --out " +
                  (dir / "corpus").string()) == 0);

  CHECK(run_cli("train --manifest " + (dir / "corpus" / "manifest.csv").string() +
                " --split 1 --order 4 --out-dir " + (dir / "models").string()) == 2);

  REQUIRE(run_cli("train --manifest " + (dir / "corpus" / "manifest.csv").string() +
                  " --split 1 --order 1 --states 2 --mixtures 1 --max-iterations 4 "
                  "--seed 3 --out-dir " +
                  (dir / "models").string()) == 0);
  for (int i = 1; i <= 4; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "spk%03d.hohm", i);
    CHECK(fs::exists(dir / "models" / name));
  }

  // Deterministic rerun produces bit-identical model files.
  REQUIRE(run_cli("train --manifest " + (dir / "corpus" / "manifest.csv").string() +
                  " --split 1 --order 1 --states 2 --mixtures 1 --max-iterations 4 "
                  "--seed 3 --out-dir " +
                  (dir / "models2").string()) == 0);
  CHECK(hohmm::read_file_bytes(dir / "models" / "spk001.hohm") ==
        hohmm::read_file_bytes(dir / "models2" / "spk001.hohm"));

  // Hand-written trial list over sentence-2 utterances.
  const hohmm::CorpusManifest manifest = hohmm::load_manifest(dir / "corpus" / "manifest.csv");
  std::vector<hohmm::TrialRecord> trials;
  int counter = 0;
  for (const hohmm::UtteranceRecord& rec : manifest.records) {
    if (rec.sentence_id != 2) continue;
    const std::string claimed = rec.speaker_id == "spk004" ? "spk001" : rec.speaker_id;
    trials.push_back({"t" + std::to_string(++counter), claimed, rec.speaker_id, rec.payload});
  }
  hohmm::save_trials(trials, dir / "corpus" / "trials.csv");

  CHECK(run_cli("score --models-dir " + (dir / "models").string() +
                " --cohort-ids spk003,ghost --trials " +
                (dir / "corpus" / "trials.csv").string() + " --out " +
                (dir / "scores.csv").string()) == 1);

  REQUIRE(run_cli("score --models-dir " + (dir / "models").string() +
                  " --cohort-ids spk003,spk004 --trials " +
                  (dir / "corpus" / "trials.csv").string() + " --out " +
                  (dir / "scores.csv").string()) == 0);
  const std::vector<hohmm::ScoreRecord> scores = hohmm::load_scores(dir / "scores.csv");
  CHECK(scores.size() == trials.size());

  CHECK(run_cli("evaluate --scores " + (dir / "scores.csv").string() +
                " --labels A --labels B --out-report " + (dir / "report.json").string() +
                " --out-det " + (dir / "det.csv").string()) == 2);

  REQUIRE(run_cli("evaluate --scores " + (dir / "scores.csv").string() +
                  " --labels HMM1s --out-report " + (dir / "report.json").string() +
                  " --out-det " + (dir / "det.csv").string()) == 0);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(fs::exists(dir / "det.csv"));
  CHECK(fs::exists(dir / "det.svg"));
  fs::remove_all(dir);
}

TEST_CASE("cli: extract turns WAV manifests into 38-dim features") {
  if (!cli_path()) return;
  const fs::path dir = temp_dir("extract");
  fs::create_directories(dir / "audio");

  std::vector<hohmm::UtteranceRecord> records;
  for (int spk = 1; spk <= 2; ++spk) {
    for (int rep = 1; rep <= 2; ++rep) {
      hohmm::AudioSignal s;
      s.sample_rate = 12000.0;
      s.samples.resize(6000);
      for (std::size_t i = 0; i < s.samples.size(); ++i)
        s.samples[i] = 0.4 * std::sin(0.05 * static_cast<double>(i) * spk + rep);
      char name[32];
      std::snprintf(name, sizeof(name), "spk%02d_r%d.wav", spk, rep);
      hohmm::write_wav(s, dir / "audio" / name);
      records.push_back({"spk" + std::to_string(spk),
                         spk % 2 ? hohmm::Gender::male : hohmm::Gender::female, 1, rep,
                         std::string("audio/") + name});
    }
  }
  hohmm::save_manifest(hohmm::make_manifest(records), dir / "audio.csv");

  REQUIRE(run_cli("extract --manifest " + (dir / "audio.csv").string() + " --out " +
                  (dir / "feat").string()) == 0);
  const hohmm::CorpusManifest derived = hohmm::load_manifest(dir / "feat" / "manifest.csv");
  CHECK(derived.records.size() == 4);
  for (const hohmm::UtteranceRecord& rec : derived.records) {
    const hohmm::FeatureSequence f = hohmm::read_hofv(dir / "feat" / rec.payload);
    CHECK(f.dim == 38);
  }

  // Feature-typed input is refused.
  CHECK(run_cli("extract --manifest " + (dir / "feat" / "manifest.csv").string() + " --out " +
                (dir / "feat2").string()) == 1);

  // A missing audio file fails that record but keeps the rest.
  fs::remove(dir / "audio" / "spk01_r1.wav");
  CHECK(run_cli("extract --manifest " + (dir / "audio.csv").string() + " --out " +
                (dir / "feat3").string()) == 1);
  CHECK(hohmm::load_manifest(dir / "feat3" / "manifest.csv").records.size() == 3);
  fs::remove_all(dir);
}

TEST_CASE("cli: ttest compares numeric columns") {
  if (!cli_path()) return;
  const fs::path dir = temp_dir("ttest");
  hohmm::atomic_write_file(dir / "a.csv", "0\n2\n");
  hohmm::atomic_write_file(dir / "b.csv", "-1\n1\n");
  hohmm::atomic_write_file(dir / "short.csv", "1\n");

  CHECK(run_cli("ttest --a " + (dir / "a.csv").string() + " --b " + (dir / "a.csv").string()) == 0);
  CHECK(run_cli("ttest --a " + (dir / "a.csv").string() + " --b " + (dir / "b.csv").string()) == 0);
  CHECK(run_cli("ttest --a " + (dir / "a.csv").string() + " --b " + (dir / "short.csv").string()) ==
        2);
  fs::remove_all(dir);
}

TEST_CASE("cli: reproduce runs the whole pipeline at micro scale") {
  if (!cli_path()) return;
  const fs::path dir = temp_dir("reproduce");
  REQUIRE(run_cli("reproduce --speakers 4 --sentences 2 --reps 3 --dim 2 --truth-states 2 "
                  "--truth-order 1 --mean-separation 2 --min-duration 6 --max-duration 10 "
                  "--claimants 2 --imposters 2 --orders 1 --states 2 --mixtures 1 "
                  "--max-iterations 3 --seed 21 --out " +
                  dir.string()) == 0);
  CHECK(fs::exists(dir / "corpus" / "manifest.csv"));
  CHECK(fs::exists(dir / "trials.csv"));
  CHECK(fs::exists(dir / "scores_hmm1.csv"));
  CHECK(fs::exists(dir / "models_hmm1" / "spk001.hohm"));
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "det.svg"));
  fs::remove_all(dir);
}

TEST_CASE("cli: help exits zero") {
  if (!cli_path()) return;
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("synth --help") == 0);
  CHECK(run_cli("train --help") == 0);
}

TEST_CASE("cli: config file supplies flags and rejects unknown keys") {
  if (!cli_path()) return;
  const fs::path dir = temp_dir("config");

  hohmm::atomic_write_file(dir / "synth.conf",
                           "speakers = 2\nsentences = 2\nreps = 2\ndim = 2\nstates = 2\n"
                           "order = 1\nmin-duration = 4\nmax-duration = 6\nseed = 9\n");
  CHECK(run_cli("synth --config " + (dir / "synth.conf").string() + " --out " +
                (dir / "corpus").string()) == 0);
  CHECK(hohmm::load_manifest(dir / "corpus" / "manifest.csv").records.size() == 8);

  // A flag on the command line overrides the config file.
  CHECK(run_cli("synth --config " + (dir / "synth.conf").string() + " --reps 3 --out " +
                (dir / "corpus3").string()) == 0);
  CHECK(hohmm::load_manifest(dir / "corpus3" / "manifest.csv").records.size() == 12);

  hohmm::atomic_write_file(dir / "bad.conf", "speakers = 2\nsentences = 2\nreps = 2\n"
                                             "unknown-key = 1\n");
  CHECK(run_cli("synth --config " + (dir / "bad.conf").string() + " --out " +
                (dir / "corpus2").string()) == 2);
  fs::remove_all(dir);
}
