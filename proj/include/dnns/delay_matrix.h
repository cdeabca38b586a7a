#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dnns/types.h"

namespace dnns {

enum class MatrixFormat { kKingText, kCsv };

MatrixFormat parse_matrix_format(std::string_view name);

// Dense N x N one-way delay table, row = source, column = destination.
// Immutable after construction; safe to share across threads.
class DelayMatrix {
 public:
  DelayMatrix() = default;

  // Takes a row-major table. Enforces the zero diagonal and non-negativity,
  // and records whether every present (i,j)/(j,i) pair agrees.
  DelayMatrix(std::size_t n, std::vector<Millis> row_major);

  std::size_t size() const { return n_; }
  bool symmetric() const { return symmetric_; }

  Millis operator()(NodeId from, NodeId to) const { return d_[from * n_ + to]; }
  bool present(NodeId from, NodeId to) const { return !is_missing((*this)(from, to)); }

  std::size_t missing_count() const;

  const std::vector<Millis>& data() const { return d_; }

 private:
  std::size_t n_ = 0;
  std::vector<Millis> d_;
  bool symmetric_ = true;
};

DelayMatrix parse_matrix(std::string_view text, MatrixFormat format);
DelayMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);

// Writes values with round-trip precision so reloading is bit-identical.
std::string serialize_matrix(const DelayMatrix& m, MatrixFormat format);
void save_matrix(const DelayMatrix& m, const std::filesystem::path& path, MatrixFormat format);

enum class SyntheticKind { kEuclidean, kClustered, kAsymmetric };

SyntheticKind parse_synthetic_kind(std::string_view name);
std::string_view to_string(SyntheticKind kind);

struct SyntheticParams {
  std::size_t n = 100;
  SyntheticKind kind = SyntheticKind::kEuclidean;
  // Multiplicative inflation: d = dist * (1 + U[0, noise)), per unordered pair.
  double noise = 0.0;
  // Asymmetric kind: each direction scaled by (1 + U[0, asym_factor)).
  double asym_factor = 0.0;
  std::size_t clusters = 3;
  std::size_t dim = 5;
  double box_ms = 100.0;
  // Axis a of the box has side box_ms * aspect^a; 1 gives a cube.
  double aspect = 1.0;
  std::uint64_t seed = 1;
};

DelayMatrix gen_synthetic(const SyntheticParams& params);

}  // namespace dnns
