#ifndef HOHMM_IO_UTIL_HPP
#define HOHMM_IO_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hohmm {

// Little-endian byte packing used by the HOFV and HOHM binary formats.
void put_u8(std::string& out, uint8_t v);
void put_u32_le(std::string& out, uint32_t v);
void put_f64_le(std::string& out, double v);

class ByteReader {
 public:
  ByteReader(const std::string& data, std::string context);
  uint8_t u8();
  uint32_t u32_le();
  double f64_le();
  void expect_magic(const char magic[4]);
  bool exhausted() const { return pos_ == data_.size(); }
  void require_exhausted() const;

 private:
  const std::string& data_;
  std::size_t pos_ = 0;
  std::string context_;
  void need(std::size_t n) const;
};

std::string read_file_bytes(const std::filesystem::path& path);

// Writes via a temp file in the target directory, then renames into place.
void atomic_write_file(const std::filesystem::path& path, const std::string& bytes);

// Lines split on '\n' with a trailing '\r' stripped (tolerates CRLF input).
std::vector<std::string> read_text_lines(const std::filesystem::path& path);

std::vector<std::string> split_csv_row(const std::string& line);

double parse_double(const std::string& text, const std::string& context);
long parse_long(const std::string& text, const std::string& context);

std::string format_double(double v);  // shortest text that round-trips exactly

}  // namespace hohmm

#endif
