#include "dnns/maintenance.h"

namespace dnns {

NodeId choose_gossip_peer(const NodeState& node, Rng& rng) {
  const bool usable = node.bootstrap != kNoNode && node.bootstrap != node.id;
  if (!node.joined || node.ring.empty()) {
    if (usable) return node.bootstrap;
    if (node.ring.empty()) return kNoNode;
  }
  auto all = node.ring.all();
  return all[rng.below(all.size())]->neighbor;
}

GossipRequest make_gossip(const NodeState& node, NodeId peer, Rng& rng) {
  GossipRequest req{node.id, peer, {}};
  for (std::size_t i = 1; i <= node.ring.params().max_rings; ++i) {
    const auto& members = node.ring.ring_members(i);
    std::vector<NodeId> pool;
    pool.reserve(members.size());
    for (NodeId id : members) {
      if (id != peer) pool.push_back(id);
    }
    if (!pool.empty()) req.samples.push_back(pool[rng.below(pool.size())]);
  }
  return req;
}

void absorb_contact(NodeState& self, const NodeState& peer, Millis measured, double now,
                    const VivaldiParams& vparams) {
  if (peer.id == self.id || !(measured > 0)) return;
  self.ring.observe(peer.id, measured, peer.coord, peer.ring.nonempty_count(), now);
  self.coord = vivaldi_update(self.coord, peer.coord, measured, vparams, self.id, peer.id);
}

void absorb_results(NodeState& self, const std::vector<OmegaEntry>& results, double now) {
  for (const OmegaEntry& e : results) {
    if (e.id == self.id || e.coord.dim() != self.coord.dim()) continue;
    self.ring.observe(e.id, e.delay, e.coord, e.nonempty_rings, now);
  }
}

}  // namespace dnns
