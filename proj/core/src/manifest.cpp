#include "hohmm/manifest.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

#include "hohmm/io_util.hpp"

namespace hohmm {

namespace {

constexpr const char* kHeader = "speaker_id,gender,sentence_id,repetition,payload";

std::string gender_code(Gender g) { return g == Gender::male ? "m" : "f"; }

Gender parse_gender(const std::string& code, const std::string& context) {
  if (code == "m") return Gender::male;
  if (code == "f") return Gender::female;
  throw std::runtime_error(context + ": gender must be 'm' or 'f', got '" + code + "'");
}

}  // namespace

CorpusManifest make_manifest(std::vector<UtteranceRecord> records) {
  CorpusManifest manifest;
  std::set<std::string> speakers;
  std::set<std::tuple<std::string, int, int>> keys;
  for (const UtteranceRecord& rec : records) {
    if (rec.speaker_id.empty()) throw std::runtime_error("manifest: empty speaker id");
    if (rec.sentence_id < 1) throw std::runtime_error("manifest: sentence_id must be >= 1");
    if (rec.repetition < 1) throw std::runtime_error("manifest: repetition must be >= 1");
    if (rec.payload.empty())
      throw std::runtime_error("manifest: missing payload for " + rec.speaker_id + " sentence " +
                               std::to_string(rec.sentence_id) + " repetition " +
                               std::to_string(rec.repetition));
    if (!keys.emplace(rec.speaker_id, rec.sentence_id, rec.repetition).second)
      throw std::runtime_error("manifest: duplicate record (" + rec.speaker_id + ", " +
                               std::to_string(rec.sentence_id) + ", " +
                               std::to_string(rec.repetition) + ")");
    speakers.insert(rec.speaker_id);
    manifest.n_sentences = std::max(manifest.n_sentences, rec.sentence_id);
    manifest.n_repetitions = std::max(manifest.n_repetitions, rec.repetition);
  }
  manifest.n_speakers = static_cast<int>(speakers.size());
  manifest.records = std::move(records);
  return manifest;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_text_lines(path);
  if (lines.empty() || lines[0] != kHeader)
    throw std::runtime_error("manifest " + path.string() + ": missing header '" + kHeader + "'");

  std::vector<UtteranceRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string context = "manifest " + path.string() + " line " + std::to_string(i + 1);
    const std::vector<std::string> fields = split_csv_row(lines[i]);
    if (fields.size() != 5)
      throw std::runtime_error(context + ": expected 5 fields, got " +
                               std::to_string(fields.size()));
    UtteranceRecord rec;
    rec.speaker_id = fields[0];
    rec.gender = parse_gender(fields[1], context);
    rec.sentence_id = static_cast<int>(parse_long(fields[2], context));
    rec.repetition = static_cast<int>(parse_long(fields[3], context));
    rec.payload = fields[4];
    records.push_back(std::move(rec));
  }
  return make_manifest(std::move(records));
}

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  std::string out(kHeader);
  out.push_back('\n');
  for (const UtteranceRecord& rec : manifest.records) {
    out += rec.speaker_id;
    out += ',';
    out += gender_code(rec.gender);
    out += ',';
    out += std::to_string(rec.sentence_id);
    out += ',';
    out += std::to_string(rec.repetition);
    out += ',';
    out += rec.payload;
    out.push_back('\n');
  }
  atomic_write_file(path, out);
}

void validate_split_spec(const SplitSpec& spec, const CorpusManifest& manifest) {
  std::set<int> sentences;
  std::set<std::string> speakers;
  for (const UtteranceRecord& rec : manifest.records) {
    sentences.insert(rec.sentence_id);
    speakers.insert(rec.speaker_id);
  }
  for (int s : spec.train_sentences)
    if (!sentences.count(s))
      throw std::invalid_argument("split: unknown train sentence " + std::to_string(s));
  for (int s : spec.test_sentences)
    if (!sentences.count(s))
      throw std::invalid_argument("split: unknown test sentence " + std::to_string(s));
  for (const std::string& id : spec.claimant_ids)
    if (!speakers.count(id)) throw std::invalid_argument("split: unknown claimant id " + id);
  for (const std::string& id : spec.imposter_ids)
    if (!speakers.count(id)) throw std::invalid_argument("split: unknown imposter id " + id);

  for (int s : spec.train_sentences)
    if (spec.test_sentences.count(s))
      throw std::invalid_argument("split: sentence " + std::to_string(s) +
                                  " in both train and test sets");
  for (const std::string& id : spec.claimant_ids)
    if (spec.imposter_ids.count(id))
      throw std::invalid_argument("split: speaker " + id + " is both claimant and imposter");
}

SplitResult split(const CorpusManifest& manifest, const SplitSpec& spec) {
  validate_split_spec(spec, manifest);
  SplitResult result;
  for (const UtteranceRecord& rec : manifest.records) {
    if (spec.train_sentences.count(rec.sentence_id))
      result.train.push_back(rec);
    else if (spec.test_sentences.count(rec.sentence_id))
      result.test.push_back(rec);
  }
  return result;
}

SplitSpec make_default_split(const CorpusManifest& manifest, int n_claimants, int n_imposters) {
  std::set<std::string> speakers;
  for (const UtteranceRecord& rec : manifest.records) speakers.insert(rec.speaker_id);
  if (n_claimants < 0 || n_imposters < 0 ||
      static_cast<std::size_t>(n_claimants) + static_cast<std::size_t>(n_imposters) >
          speakers.size())
    throw std::invalid_argument("split: claimant/imposter counts exceed " +
                                std::to_string(speakers.size()) + " speakers");

  SplitSpec spec;
  for (int s = 1; s <= manifest.n_sentences; ++s)
    (s <= manifest.n_sentences / 2 ? spec.train_sentences : spec.test_sentences).insert(s);

  std::vector<std::string> ordered(speakers.begin(), speakers.end());
  for (int i = 0; i < n_claimants; ++i) spec.claimant_ids.insert(ordered[i]);
  for (int i = 0; i < n_imposters; ++i) spec.imposter_ids.insert(ordered[ordered.size() - 1 - i]);
  return spec;
}

}  // namespace hohmm
