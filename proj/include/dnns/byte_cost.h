#pragma once

#include <cstdint>
#include <string_view>

namespace dnns {

// Wire-size constants in bytes. The defaults are a calibration: a Meridian
// step probing a full 20-member band costs about 4-5x a HybridNN step
// probing m = 4 candidates.
struct ByteCostModel {
  std::uint64_t header = 16;
  std::uint64_t per_path_entry = 4;
  std::uint64_t per_coordinate = 24;
  std::uint64_t per_ring_sample = 28;
  std::uint64_t per_probe = 20;
};

enum class MessageKind {
  kGossipRequest,
  kGossipAck,
  kContactRequest,
  kContactAck,
  kProbe,       // request/reply pair
  kDelegation,  // ask a neighbor to probe, and its report
  kQuery,
  kResult,
};

std::string_view to_string(MessageKind kind);

struct MessageShape {
  MessageKind kind = MessageKind::kQuery;
  std::uint64_t path = 0;
  std::uint64_t samples = 0;
  std::uint64_t coordinates = 0;
  std::uint64_t omega = 0;  // result entries, each an id plus a coordinate
};

std::uint64_t account(const MessageShape& msg, const ByteCostModel& model);

}  // namespace dnns
