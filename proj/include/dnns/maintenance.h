#pragma once

#include <vector>

#include "dnns/protocol.h"
#include "dnns/rng.h"

namespace dnns {

struct GossipRequest {
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  std::vector<NodeId> samples;  // one per non-empty ring, ring order
};

// The bootstrap contact until the node has exchanged with it, and whenever the
// ring is empty; otherwise a uniform ring neighbor. kNoNode when neither exists.
NodeId choose_gossip_peer(const NodeState& node, Rng& rng);

// One uniformly drawn neighbor per non-empty ring, excluding the peer.
GossipRequest make_gossip(const NodeState& node, NodeId peer, Rng& rng);

// Folds one measurement of `peer` into `self`: ring observation with the
// peer's current coordinate and ring count, then a coordinate update.
void absorb_contact(NodeState& self, const NodeState& peer, Millis measured, double now,
                    const VivaldiParams& vparams);

// Inserts search results into a ring without touching the coordinate.
void absorb_results(NodeState& self, const std::vector<OmegaEntry>& results, double now);

}  // namespace dnns
