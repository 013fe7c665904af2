#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

#include "doctest.h"
#include "hohmm/features.hpp"
#include "hohmm/io_util.hpp"
#include "hohmm/manifest.hpp"
#include "hohmm/synth.hpp"

using namespace hohmm;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("hohmm_test_" + tag + "_" +
                                                    std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CorpusManifest full_manifest(int speakers, int sentences, int repetitions) {
  std::vector<UtteranceRecord> records;
  for (int spk = 0; spk < speakers; ++spk) {
    char name[16];
    std::snprintf(name, sizeof(name), "spk%03d", spk + 1);
    for (int s = 1; s <= sentences; ++s)
      for (int r = 1; r <= repetitions; ++r)
        records.push_back({name, spk % 2 == 0 ? Gender::male : Gender::female, s, r,
                           std::string(name) + "_" + std::to_string(s) + "_" +
                               std::to_string(r) + ".hofv"});
  }
  return make_manifest(std::move(records));
}

}  // namespace

TEST_CASE("load_manifest reads the full corpus shape") {
  const fs::path dir = temp_dir("manifest_full");
  const CorpusManifest written = full_manifest(50, 8, 9);
  REQUIRE(written.records.size() == 3600);
  save_manifest(written, dir / "manifest.csv");

  const CorpusManifest loaded = load_manifest(dir / "manifest.csv");
  CHECK(loaded.records.size() == 3600);
  CHECK(loaded.n_speakers == 50);
  CHECK(loaded.n_sentences == 8);
  CHECK(loaded.n_repetitions == 9);
  fs::remove_all(dir);
}

TEST_CASE("load_manifest of a header-only file is empty") {
  const fs::path dir = temp_dir("manifest_empty");
  atomic_write_file(dir / "empty.csv", "speaker_id,gender,sentence_id,repetition,payload\n");
  const CorpusManifest m = load_manifest(dir / "empty.csv");
  CHECK(m.records.empty());
  CHECK(m.n_speakers == 0);
  CHECK(m.n_sentences == 0);
  CHECK(m.n_repetitions == 0);
  fs::remove_all(dir);
}

TEST_CASE("load_manifest rejects malformed input") {
  const fs::path dir = temp_dir("manifest_bad");
  const std::string header = "speaker_id,gender,sentence_id,repetition,payload\n";

  SUBCASE("duplicate record") {
    atomic_write_file(dir / "dup.csv",
                      header + "spk01,m,3,5,a.hofv\nspk01,m,3,5,b.hofv\n");
    CHECK_THROWS_WITH_AS(load_manifest(dir / "dup.csv"),
                         doctest::Contains("duplicate record"), std::runtime_error);
  }
  SUBCASE("missing header") {
    atomic_write_file(dir / "nohdr.csv", "spk01,m,3,5,a.hofv\n");
    CHECK_THROWS_AS(load_manifest(dir / "nohdr.csv"), std::runtime_error);
  }
  SUBCASE("bad gender") {
    atomic_write_file(dir / "gender.csv", header + "spk01,x,3,5,a.hofv\n");
    CHECK_THROWS_AS(load_manifest(dir / "gender.csv"), std::runtime_error);
  }
  SUBCASE("missing payload") {
    atomic_write_file(dir / "nopayload.csv", header + "spk01,m,3,5,\n");
    CHECK_THROWS_WITH_AS(load_manifest(dir / "nopayload.csv"),
                         doctest::Contains("missing payload"), std::runtime_error);
  }
  SUBCASE("wrong field count") {
    atomic_write_file(dir / "fields.csv", header + "spk01,m,3,5\n");
    CHECK_THROWS_AS(load_manifest(dir / "fields.csv"), std::runtime_error);
  }
  SUBCASE("non-numeric sentence") {
    atomic_write_file(dir / "sentence.csv", header + "spk01,m,three,5,a.hofv\n");
    CHECK_THROWS_AS(load_manifest(dir / "sentence.csv"), std::runtime_error);
  }
  fs::remove_all(dir);
}

TEST_CASE("split reproduces the 4/4 sentence protocol") {
  const CorpusManifest manifest = full_manifest(50, 8, 9);
  SplitSpec spec;
  spec.train_sentences = {1, 2, 3, 4};
  spec.test_sentences = {5, 6, 7, 8};
  const SplitResult parts = split(manifest, spec);

  CHECK(parts.test.size() == 1800);
  CHECK(parts.train.size() == 1800);

  std::map<std::string, int> train_per_speaker;
  for (const UtteranceRecord& rec : parts.train) ++train_per_speaker[rec.speaker_id];
  for (const auto& [speaker, count] : train_per_speaker) CHECK(count == 36);
  CHECK(train_per_speaker.size() == 50);
}

TEST_CASE("split with no train sentences puts everything in test") {
  const CorpusManifest manifest = full_manifest(3, 4, 2);
  SplitSpec spec;
  spec.test_sentences = {1, 2, 3, 4};
  const SplitResult parts = split(manifest, spec);
  CHECK(parts.train.empty());
  CHECK(parts.test.size() == manifest.records.size());
}

TEST_CASE("split validates the spec against the manifest") {
  const CorpusManifest manifest = full_manifest(3, 4, 2);
  SplitSpec spec;
  spec.train_sentences = {9};
  CHECK_THROWS_AS(split(manifest, spec), std::invalid_argument);

  spec.train_sentences = {1};
  spec.test_sentences = {1};
  CHECK_THROWS_AS(split(manifest, spec), std::invalid_argument);

  spec.test_sentences = {2};
  spec.claimant_ids = {"spk001"};
  spec.imposter_ids = {"spk001"};
  CHECK_THROWS_AS(split(manifest, spec), std::invalid_argument);

  spec.imposter_ids = {"ghost"};
  CHECK_THROWS_AS(split(manifest, spec), std::invalid_argument);
}

TEST_CASE("split partitions the selected records") {
  const CorpusManifest manifest = full_manifest(4, 6, 3);
  SplitSpec spec;
  spec.train_sentences = {1, 4};
  spec.test_sentences = {2, 5};
  const SplitResult parts = split(manifest, spec);

  std::set<std::string> train_keys, test_keys;
  for (const UtteranceRecord& rec : parts.train)
    train_keys.insert(rec.speaker_id + "/" + std::to_string(rec.sentence_id) + "/" +
                      std::to_string(rec.repetition));
  for (const UtteranceRecord& rec : parts.test)
    test_keys.insert(rec.speaker_id + "/" + std::to_string(rec.sentence_id) + "/" +
                     std::to_string(rec.repetition));
  for (const std::string& key : train_keys) CHECK(test_keys.count(key) == 0);

  std::size_t covered = 0;
  for (const UtteranceRecord& rec : manifest.records)
    if (spec.train_sentences.count(rec.sentence_id) || spec.test_sentences.count(rec.sentence_id))
      ++covered;
  CHECK(parts.train.size() + parts.test.size() == covered);
}

TEST_CASE("make_default_split assigns claimants and imposters from the id order") {
  const CorpusManifest manifest = full_manifest(10, 8, 2);
  const SplitSpec spec = make_default_split(manifest, 6, 3);
  CHECK(spec.train_sentences == std::set<int>{1, 2, 3, 4});
  CHECK(spec.test_sentences == std::set<int>{5, 6, 7, 8});
  CHECK(spec.claimant_ids.size() == 6);
  CHECK(spec.imposter_ids.size() == 3);
  CHECK(spec.claimant_ids.count("spk001") == 1);
  CHECK(spec.imposter_ids.count("spk010") == 1);
  CHECK_THROWS_AS(make_default_split(manifest, 8, 3), std::invalid_argument);
}

TEST_CASE("synth_corpus writes the requested corpus shape") {
  const fs::path dir = temp_dir("synth_shape");
  SynthConfig config;
  config.n_speakers = 10;
  config.n_sentences = 8;
  config.n_repetitions = 9;
  config.feature_dim = 3;
  config.states = 2;
  config.order = 1;
  config.min_duration = 5;
  config.max_duration = 9;
  config.rng_seed = 7;

  const SynthResult result = synth_corpus(config, dir);
  CHECK(result.manifest.records.size() == 720);
  CHECK(result.ground_truth.size() == 10);
  CHECK(fs::exists(dir / "manifest.csv"));
  fs::remove_all(dir);
}

TEST_CASE("synth_corpus is byte-reproducible") {
  const fs::path a = temp_dir("synth_det_a");
  const fs::path b = temp_dir("synth_det_b");
  SynthConfig config;
  config.n_speakers = 3;
  config.n_sentences = 2;
  config.n_repetitions = 2;
  config.feature_dim = 2;
  config.states = 2;
  config.order = 3;
  config.min_duration = 6;
  config.max_duration = 10;
  config.rng_seed = 123;

  synth_corpus(config, a);
  synth_corpus(config, b);

  CHECK(read_file_bytes(a / "manifest.csv") == read_file_bytes(b / "manifest.csv"));
  CHECK(read_file_bytes(a / "features" / "spk002_s01_r02.hofv") ==
        read_file_bytes(b / "features" / "spk002_s01_r02.hofv"));
  CHECK(read_file_bytes(a / "ground_truth" / "spk003.hohm") ==
        read_file_bytes(b / "ground_truth" / "spk003.hohm"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("synth_corpus durations stay in range and the manifest round-trips") {
  const fs::path dir = temp_dir("synth_range");
  SynthConfig config;
  config.n_speakers = 10;
  config.n_sentences = 8;
  config.n_repetitions = 3;
  config.feature_dim = 8;
  config.states = 2;
  config.order = 3;
  config.min_duration = 4;
  config.max_duration = 12;
  config.rng_seed = 99;

  const SynthResult result = synth_corpus(config, dir);
  REQUIRE(result.manifest.records.size() == 240);

  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "features")) {
    ++files;
    const FeatureSequence fs_data = read_hofv(entry.path());
    CHECK(fs_data.dim == 8);
    CHECK(fs_data.frames() >= 4);
    CHECK(fs_data.frames() <= 12);
  }
  CHECK(files == 240);

  const CorpusManifest reloaded = load_manifest(dir / "manifest.csv");
  REQUIRE(reloaded.records.size() == result.manifest.records.size());
  for (std::size_t i = 0; i < reloaded.records.size(); ++i) {
    CHECK(reloaded.records[i].speaker_id == result.manifest.records[i].speaker_id);
    CHECK(reloaded.records[i].sentence_id == result.manifest.records[i].sentence_id);
    CHECK(reloaded.records[i].repetition == result.manifest.records[i].repetition);
    CHECK(reloaded.records[i].payload == result.manifest.records[i].payload);
    CHECK((reloaded.records[i].gender == result.manifest.records[i].gender));
  }
  fs::remove_all(dir);
}

TEST_CASE("synth_corpus validates its configuration") {
  SynthConfig config;
  config.n_speakers = 0;
  config.n_sentences = 1;
  config.n_repetitions = 1;
  CHECK_THROWS_AS(validate_synth_config(config), std::invalid_argument);
  config.n_speakers = 1;
  config.mean_separation = 0.0;
  CHECK_THROWS_AS(validate_synth_config(config), std::invalid_argument);
  config.mean_separation = 1.0;
  config.min_duration = 10;
  config.max_duration = 5;
  CHECK_THROWS_AS(validate_synth_config(config), std::invalid_argument);
}
