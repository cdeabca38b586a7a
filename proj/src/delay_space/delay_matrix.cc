#include "dnns/delay_matrix.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dnns {

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Parses one cell. Empty, "-1", "nan", "NA" and "-" mean Missing.
Millis parse_cell(std::string_view tok, std::size_t row, std::size_t col) {
  tok = trim(tok);
  if (tok.empty() || tok == "-" || tok == "NA" || tok == "na" || tok == "nan" || tok == "NaN") {
    return kMissing;
  }
  std::string s(tok);
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ParseError("row " + std::to_string(row) + " col " + std::to_string(col) +
                     ": not a number: '" + s + "'");
  }
  if (v == -1.0) return kMissing;
  if (v < 0) {
    throw ParseError("row " + std::to_string(row) + " col " + std::to_string(col) +
                     ": negative delay " + s);
  }
  return v;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = trim(text.substr(pos, nl - pos));
    if (!line.empty() && line[0] != '#') lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t pos = 0;
  while (true) {
    auto c = line.find(',', pos);
    if (c == std::string_view::npos) {
      toks.push_back(line.substr(pos));
      break;
    }
    toks.push_back(line.substr(pos, c - pos));
    pos = c + 1;
  }
  return toks;
}

}  // namespace

MatrixFormat parse_matrix_format(std::string_view name) {
  if (name == "king" || name == "king-text" || name == "text") return MatrixFormat::kKingText;
  if (name == "csv") return MatrixFormat::kCsv;
  throw ParseError("unknown matrix format: " + std::string(name));
}

DelayMatrix::DelayMatrix(std::size_t n, std::vector<Millis> row_major)
    : n_(n), d_(std::move(row_major)) {
  if (d_.size() != n_ * n_) throw ContractError("matrix data size does not match n*n");
  for (std::size_t i = 0; i < n_; ++i) {
    Millis& diag = d_[i * n_ + i];
    if (!is_missing(diag) && diag != 0.0) {
      throw ParseError("diagonal entry " + std::to_string(i) + " is not zero");
    }
    diag = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      Millis v = d_[i * n_ + j];
      if (!is_missing(v) && v < 0) {
        throw ParseError("negative delay at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  for (std::size_t i = 0; i < n_ && symmetric_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      Millis a = d_[i * n_ + j], b = d_[j * n_ + i];
      if (!is_missing(a) && !is_missing(b) && a != b) {
        symmetric_ = false;
        break;
      }
    }
  }
}

std::size_t DelayMatrix::missing_count() const {
  std::size_t c = 0;
  for (Millis v : d_) c += is_missing(v);
  return c;
}

DelayMatrix parse_matrix(std::string_view text, MatrixFormat format) {
  auto lines = split_lines(text);
  std::size_t n = 0;
  std::size_t first = 0;
  if (format == MatrixFormat::kCsv) {
    if (lines.empty()) throw ParseError("csv matrix: missing 'n=<N>' header");
    auto head = lines[0];
    if (head.substr(0, 2) != "n=") throw ParseError("csv matrix: first row must be 'n=<N>'");
    std::string num(trim(head.substr(2)));
    char* end = nullptr;
    long v = std::strtol(num.c_str(), &end, 10);
    if (num.empty() || end != num.c_str() + num.size() || v <= 0) {
      throw ParseError("csv matrix: bad node count '" + num + "'");
    }
    n = static_cast<std::size_t>(v);
    first = 1;
    if (lines.size() - first != n) {
      throw ParseError("csv matrix: expected " + std::to_string(n) + " rows, found " +
                       std::to_string(lines.size() - first));
    }
  } else {
    n = lines.size();
  }
  if (n == 0) throw ParseError("empty matrix");

  std::vector<Millis> data;
  data.reserve(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    auto toks = format == MatrixFormat::kCsv ? split_commas(lines[first + r]) : split_ws(lines[first + r]);
    if (toks.size() != n) {
      throw ParseError("row " + std::to_string(r) + " has " + std::to_string(toks.size()) +
                       " entries, expected " + std::to_string(n));
    }
    for (std::size_t c = 0; c < n; ++c) data.push_back(parse_cell(toks[c], r, c));
  }
  return DelayMatrix(n, std::move(data));
}

DelayMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read matrix file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_matrix(ss.str(), format);
}

std::string serialize_matrix(const DelayMatrix& m, MatrixFormat format) {
  std::string out;
  const std::size_t n = m.size();
  if (format == MatrixFormat::kCsv) out += "n=" + std::to_string(n) + "\n";
  const char sep = format == MatrixFormat::kCsv ? ',' : ' ';
  char buf[40];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out += sep;
      Millis v = m(static_cast<NodeId>(i), static_cast<NodeId>(j));
      if (is_missing(v)) {
        out += "-1";
      } else {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

void save_matrix(const DelayMatrix& m, const std::filesystem::path& path, MatrixFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  out << serialize_matrix(m, format);
}

}  // namespace dnns
