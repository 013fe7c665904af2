#ifndef HOHMM_MANIFEST_HPP
#define HOHMM_MANIFEST_HPP

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace hohmm {

enum class Gender { male, female };

struct UtteranceRecord {
  std::string speaker_id;
  Gender gender = Gender::male;
  int sentence_id = 0;   // 1-based
  int repetition = 0;    // 1-based
  std::string payload;   // path relative to the manifest location
};

struct CorpusManifest {
  std::vector<UtteranceRecord> records;
  int n_speakers = 0;
  int n_sentences = 0;    // max sentence id
  int n_repetitions = 0;  // max repetition
};

// CSV with header `speaker_id,gender,sentence_id,repetition,payload`,
// gender in {m,f}. Duplicate (speaker, sentence, repetition) keys and
// empty payloads are rejected.
CorpusManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);

// Recomputes the count fields from the records and checks uniqueness.
CorpusManifest make_manifest(std::vector<UtteranceRecord> records);

struct SplitSpec {
  std::set<int> train_sentences;
  std::set<int> test_sentences;
  std::set<std::string> claimant_ids;
  std::set<std::string> imposter_ids;
};

void validate_split_spec(const SplitSpec& spec, const CorpusManifest& manifest);

struct SplitResult {
  std::vector<UtteranceRecord> train;
  std::vector<UtteranceRecord> test;
};

// Partitions records by sentence membership; records in neither sentence
// set are dropped.
SplitResult split(const CorpusManifest& manifest, const SplitSpec& spec);

// First-half/second-half sentence split with the first n_claimants speaker
// ids (sorted) as claimants and the last n_imposters as imposters.
SplitSpec make_default_split(const CorpusManifest& manifest, int n_claimants, int n_imposters);

}  // namespace hohmm

#endif
