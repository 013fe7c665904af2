#ifndef HOHMM_FEATURES_HPP
#define HOHMM_FEATURES_HPP

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hohmm {

// Observation sequence: T frames of D-dimensional feature vectors,
// stored row-major.
struct FeatureSequence {
  int dim = 0;
  std::vector<double> values;  // frames() * dim
  std::string source_id;       // optional utterance key

  std::size_t frames() const { return dim > 0 ? values.size() / static_cast<std::size_t>(dim) : 0; }

  std::span<const double> frame(std::size_t t) const {
    return {values.data() + t * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }

  double& at(std::size_t t, int d) { return values[t * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)]; }
  double at(std::size_t t, int d) const { return values[t * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)]; }
};

// Validates T >= 1, D >= 1 and that every value is finite.
void validate_features(const FeatureSequence& fs);

// HOFV feature file: magic "HOFV", u32 version = 1, u32 T, u32 D,
// then T*D float64 values, row-major, little-endian.
FeatureSequence read_hofv(const std::filesystem::path& path);
void write_hofv(const FeatureSequence& fs, const std::filesystem::path& path);

}  // namespace hohmm

#endif
