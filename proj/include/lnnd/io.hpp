#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lnnd {

/// Locale-independent, round-trip-safe rendering: 17 significant digits,
/// '.' decimal point. NaN renders as "nan" and infinities as "inf"/"-inf".
std::string format_real(double v);

/// Write `contents` to `path` via a temporary sibling file and rename, so
/// readers never observe a partially written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// Minimal CSV builder: fields are written verbatim, so callers only pass
/// numbers and identifiers (no commas or quotes).
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& add(std::string field);
  CsvWriter& add(double v);
  CsvWriter& add_int(long long v);
  void end_row();

  const std::string& str() const { return out_; }
  std::size_t columns() const { return columns_; }

 private:
  std::string out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

}  // namespace lnnd
