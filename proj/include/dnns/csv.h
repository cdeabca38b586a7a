#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dnns {

// Fixed-precision rendering shared by every CSV writer so output is
// byte-stable across runs.
std::string fmt_double(double v, int precision = 6);

// Accumulates a CSV document: `#` comment lines, a header row, data rows.
class CsvWriter {
 public:
  void comment(std::string_view text);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

  const std::string& str() const { return buf_; }

  // Throws std::runtime_error naming the path on failure.
  void save(const std::filesystem::path& path) const;

 private:
  std::string buf_;
};

}  // namespace dnns
