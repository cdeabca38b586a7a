#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dnns/types.h"

namespace dnns {

struct QueryRecord {
  std::uint64_t query = 0;
  double time = 0;  // arrival, sim seconds
  NodeId target = kNoNode;
  NodeId entry = kNoNode;
  NodeId returned = kNoNode;
  Millis returned_delay = kMissing;  // ground truth d_jT
  NodeId oracle = kNoNode;
  Millis oracle_delay = kMissing;  // d_iT
  std::size_t hops = 0;
  std::size_t probes = 0;
  std::size_t bootstrap_probes = 0;
  std::uint64_t bytes = 0;
  double wall_ms = 0;
  bool budget_exhausted = false;
  bool no_result = false;
};

// d_jT - d_iT. Throws ContractError when either delay is missing.
double absolute_error(const QueryRecord& rec);

struct RelativeError {
  double value = 0;
  bool infinite = false;  // d_iT = 0 and d_jT > 0
};

RelativeError relative_error(const QueryRecord& rec);

// Visited service nodes minus one, clamped at 0.
std::size_t search_hops(std::size_t path_length);

// Returned server attains the optimal delay (a tie with the oracle counts).
bool exact_hit(const QueryRecord& rec);

// (x, fraction of values strictly greater than x) per point. Throws
// ContractError on empty input.
std::vector<std::pair<double, double>> ccdf(std::span<const double> values, std::span<const double> points);

struct Distribution {
  double median = 0;
  double p90 = 0;
  double mean = 0;
};

Distribution distribution(std::vector<double> values);

struct Summary {
  std::string algorithm;
  std::size_t trial = 0;
  std::size_t queries = 0;
  std::size_t answered = 0;
  double hit_fraction = 0;
  Distribution abs_error;
  Distribution rel_error;
  std::size_t rel_infinite = 0;
  Distribution hops;
  double within4_fraction = 0;
  double mean_probes = 0;
  double mean_bootstrap_probes = 0;
  double mean_bytes = 0;
  double mean_wall_ms = 0;
  std::size_t budget_exhausted = 0;
};

// Records without a result count toward `queries` but not `answered`.
Summary summarize(std::string algorithm, std::span<const QueryRecord> records);

std::string records_csv(std::span<const QueryRecord> records, const std::string& header_comment);
std::string summary_csv(std::span<const Summary> rows, const std::string& header_comment,
                        const std::vector<std::pair<std::string, std::vector<std::string>>>& extra = {});

}  // namespace dnns
