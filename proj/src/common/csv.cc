#include "dnns/csv.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dnns {

std::string fmt_double(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  std::string s(buf);
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
    // Normalize negative zero.
    if (!s.empty() && s[0] == '-') s.erase(0, 1);
  }
  return s;
}

void CsvWriter::comment(std::string_view text) {
  buf_ += "# ";
  buf_ += text;
  buf_ += '\n';
}

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += cells[i];
  }
  buf_ += '\n';
}

void CsvWriter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  out << buf_;
  if (!out) throw std::runtime_error("failed writing output file: " + path.string());
}

}  // namespace dnns
