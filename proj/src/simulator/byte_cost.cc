#include "dnns/byte_cost.h"

namespace dnns {

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::kGossipRequest: return "gossip";
    case MessageKind::kGossipAck: return "gossip_ack";
    case MessageKind::kContactRequest: return "contact";
    case MessageKind::kContactAck: return "contact_ack";
    case MessageKind::kProbe: return "probe";
    case MessageKind::kDelegation: return "delegate";
    case MessageKind::kQuery: return "query";
    case MessageKind::kResult: return "result";
  }
  return "?";
}

std::uint64_t account(const MessageShape& msg, const ByteCostModel& model) {
  if (msg.kind == MessageKind::kProbe || msg.kind == MessageKind::kDelegation) return 2 * model.per_probe;
  return model.header + msg.path * model.per_path_entry + msg.samples * model.per_ring_sample +
         msg.coordinates * model.per_coordinate + msg.omega * (model.per_path_entry + model.per_coordinate);
}

}  // namespace dnns
