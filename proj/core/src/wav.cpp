#include "hohmm/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "hohmm/io_util.hpp"

namespace hohmm {

namespace {

uint16_t get_u16_le(const std::string& b, std::size_t pos) {
  return static_cast<uint16_t>(static_cast<uint8_t>(b[pos]) |
                               (static_cast<uint16_t>(static_cast<uint8_t>(b[pos + 1])) << 8));
}

uint32_t get_u32_le(const std::string& b, std::size_t pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<uint32_t>(static_cast<uint8_t>(b[pos + i])) << (8 * i);
  return v;
}

void put_u16_le(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

AudioSignal read_wav(const std::filesystem::path& path) {
  const std::string bytes = read_file_bytes(path);
  const std::string where = "WAV " + path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error(where + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  uint16_t channels = 0;
  uint16_t bits = 0;
  uint32_t rate = 0;
  AudioSignal signal;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const uint32_t size = get_u32_le(bytes, pos + 4);
    pos += 8;
    if (pos + size > bytes.size()) throw std::runtime_error(where + ": truncated chunk " + id);
    if (id == "fmt ") {
      if (size < 16) throw std::runtime_error(where + ": short fmt chunk");
      const uint16_t format = get_u16_le(bytes, pos);
      channels = get_u16_le(bytes, pos + 2);
      rate = get_u32_le(bytes, pos + 4);
      bits = get_u16_le(bytes, pos + 14);
      if (format != 1) throw std::runtime_error(where + ": only PCM (format 1) is supported");
      if (channels != 1)
        throw std::runtime_error(where + ": " + std::to_string(channels) +
                                 " channels, only mono is supported");
      if (bits != 16) throw std::runtime_error(where + ": only 16-bit samples are supported");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw std::runtime_error(where + ": data chunk before fmt");
      if (size % 2 != 0) throw std::runtime_error(where + ": odd data chunk size");
      signal.samples.resize(size / 2);
      for (std::size_t i = 0; i < signal.samples.size(); ++i) {
        const auto raw = static_cast<int16_t>(get_u16_le(bytes, pos + 2 * i));
        signal.samples[i] = static_cast<double>(raw) / 32768.0;
      }
      have_data = true;
    }
    pos += size + (size % 2);  // chunks are word-aligned
  }
  if (!have_fmt || !have_data) throw std::runtime_error(where + ": missing fmt or data chunk");
  signal.sample_rate = static_cast<double>(rate);
  return signal;
}

void write_wav(const AudioSignal& signal, const std::filesystem::path& path) {
  if (signal.samples.empty()) throw std::invalid_argument("write_wav: empty signal");
  if (!(signal.sample_rate > 0.0)) throw std::invalid_argument("write_wav: bad sample rate");
  const uint32_t rate = static_cast<uint32_t>(std::lround(signal.sample_rate));
  const uint32_t data_size = static_cast<uint32_t>(signal.samples.size() * 2);

  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF", 4);
  put_u32_le(out, 36 + data_size);
  out.append("WAVE", 4);
  out.append("fmt ", 4);
  put_u32_le(out, 16);
  put_u16_le(out, 1);  // PCM
  put_u16_le(out, 1);  // mono
  put_u32_le(out, rate);
  put_u32_le(out, rate * 2);  // byte rate
  put_u16_le(out, 2);         // block align
  put_u16_le(out, 16);        // bits per sample
  out.append("data", 4);
  put_u32_le(out, data_size);
  for (double v : signal.samples) {
    const long scaled = std::lround(std::clamp(v, -1.0, 1.0) * 32768.0);
    const auto raw = static_cast<int16_t>(std::clamp(scaled, -32768L, 32767L));
    put_u16_le(out, static_cast<uint16_t>(raw));
  }
  atomic_write_file(path, out);
}

}  // namespace hohmm
