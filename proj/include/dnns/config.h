#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dnns/byte_cost.h"
#include "dnns/concentric_ring.h"
#include "dnns/coordinate.h"
#include "dnns/delay_matrix.h"
#include "dnns/inframetric.h"
#include "dnns/protocol.h"

namespace dnns {

enum class LatencyMode { kInstant, kMatrix };

// What a probe from s to t reports on an asymmetric matrix.
enum class MeasureMode { kForward, kRttAverage };

struct ChurnEvent {
  double time = 0;
  bool join = false;
  NodeId node = kNoNode;

  friend bool operator==(const ChurnEvent&, const ChurnEvent&) = default;
};

struct SimConfig {
  // An empty matrix path selects the synthetic generator.
  std::string matrix_path;
  MatrixFormat matrix_format = MatrixFormat::kKingText;
  SyntheticParams synth{2000, SyntheticKind::kEuclidean, 0.1, 0.0, 3, 5, 100.0, 0.35, 1};

  std::size_t servers = 500;
  std::size_t trials = 5;
  std::size_t queries = 10000;
  double gossip_mean = 1.0;
  double ring_mgmt_mean = 2.0;
  double oversample_mean = 60.0;
  double query_mean = 60.0;  // per live server
  double warmup = 600.0;
  std::uint64_t seed = 1;

  LatencyMode latency_mode = LatencyMode::kInstant;
  MeasureMode measure = MeasureMode::kForward;
  OracleDirection oracle = OracleDirection::kServerToTarget;
  double probe_jitter = 0.0;
  bool oversample = true;

  std::vector<Algorithm> algorithms{Algorithm::kHybridNN, Algorithm::kCoordNN, Algorithm::kDirectDN2S,
                                    Algorithm::kMeridian, Algorithm::kVivaldi};

  ProtocolParams protocol;
  RingParams ring;
  VivaldiParams vivaldi;

  double meridian_beta = 0.5;
  std::size_t meridian_ring_capacity = 10;
  std::size_t meridian_ring_tolerance = 2;
  std::size_t vivaldi_rounds = 1000;

  std::string byte_model = "default";
  ByteCostModel bytes;

  std::vector<ChurnEvent> churn;
  std::size_t churn_leaves = 0;  // random leaves spread over the query phase
  std::size_t churn_joins = 0;   // random joins, drawn from non-server nodes
};

// Sets one key from its text value. Throws ParseError("<key>: ...") for an
// unknown key or malformed value.
void apply_setting(SimConfig& cfg, std::string_view key, std::string_view value);

// Parses flat `key = value` lines; `#` starts a comment.
SimConfig parse_config(std::string_view text, SimConfig base = {});
SimConfig load_config(const std::filesystem::path& path, SimConfig base = {});

// Throws ContractError("<key>: ...") for the first invalid field.
void validate(const SimConfig& cfg);

// Every key in documented order with its current value.
std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& cfg);
std::string canonical_config(const SimConfig& cfg);
std::uint64_t config_hash(const SimConfig& cfg);

std::vector<ChurnEvent> parse_churn(std::string_view text);
std::string format_churn(const std::vector<ChurnEvent>& events);

DelayMatrix load_or_generate(const SimConfig& cfg);

}  // namespace dnns
