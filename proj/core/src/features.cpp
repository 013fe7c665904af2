#include "hohmm/features.hpp"

#include <cmath>
#include <stdexcept>

#include "hohmm/io_util.hpp"

namespace hohmm {

namespace {
constexpr char kMagic[4] = {'H', 'O', 'F', 'V'};
constexpr uint32_t kVersion = 1;
}  // namespace

void validate_features(const FeatureSequence& fs) {
  if (fs.dim <= 0) throw std::invalid_argument("feature sequence: dim must be >= 1");
  if (fs.values.empty() || fs.values.size() % static_cast<std::size_t>(fs.dim) != 0)
    throw std::invalid_argument("feature sequence: value count must be a positive multiple of dim");
  for (double v : fs.values)
    if (!std::isfinite(v))
      throw std::invalid_argument("feature sequence: non-finite value" +
                                  (fs.source_id.empty() ? std::string() : " in " + fs.source_id));
}

FeatureSequence read_hofv(const std::filesystem::path& path) {
  const std::string bytes = read_file_bytes(path);
  ByteReader r(bytes, "HOFV " + path.string());
  r.expect_magic(kMagic);
  const uint32_t version = r.u32_le();
  if (version != kVersion)
    throw std::runtime_error("HOFV " + path.string() + ": unsupported version " + std::to_string(version));
  const uint32_t rows = r.u32_le();
  const uint32_t cols = r.u32_le();
  if (rows == 0 || cols == 0)
    throw std::runtime_error("HOFV " + path.string() + ": empty shape");
  FeatureSequence fs;
  fs.dim = static_cast<int>(cols);
  fs.values.resize(static_cast<std::size_t>(rows) * cols);
  for (double& v : fs.values) v = r.f64_le();
  r.require_exhausted();
  fs.source_id = path.stem().string();
  validate_features(fs);
  return fs;
}

void write_hofv(const FeatureSequence& fs, const std::filesystem::path& path) {
  validate_features(fs);
  std::string bytes;
  bytes.reserve(16 + fs.values.size() * 8);
  bytes.append(kMagic, 4);
  put_u32_le(bytes, kVersion);
  put_u32_le(bytes, static_cast<uint32_t>(fs.frames()));
  put_u32_le(bytes, static_cast<uint32_t>(fs.dim));
  for (double v : fs.values) put_f64_le(bytes, v);
  atomic_write_file(path, bytes);
}

}  // namespace hohmm
