#include <algorithm>
#include <limits>
#include <tuple>

#include "dnns/protocol.h"

namespace dnns {

StepResult coordnn_step(const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                        const VivaldiParams& vparams, Network& net) {
  StepResult res;
  auto d = prepare_target(node, msg, params, vparams, net, res);
  res.local_best = msg.best;
  res.local_best_delay = msg.best_delay;
  if (!d) return res;
  auto cands = choose_candidates(node, msg, *d, params);
  res.candidates = cands.size();
  std::optional<std::tuple<double, double, NodeId>> best;
  for (const RingEntry* e : cands) {
    std::tuple<double, double, NodeId> k{distance(e->coord, msg.target_coord), e->coord.e, e->neighbor};
    if (!best || k < *best) best = k;
  }
  if (!best || !(std::get<0>(*best) <= params.beta * *d)) return res;
  if (msg.hop_budget == 0) {
    msg.budget_exhausted = true;
    return res;
  }
  --msg.hop_budget;
  msg.path.push_back(node.id);
  res.action = StepAction::kForward;
  res.next = std::get<2>(*best);
  return res;
}

StepResult meridian_step(const NodeState& node, QueryMessage& msg, const ProtocolParams& params, Network& net) {
  StepResult res;
  auto d = net.probe(node.id, msg.target);
  ++res.probes;
  if (!d) {
    res.local_best = msg.best;
    res.local_best_delay = msg.best_delay;
    return res;
  }
  res.d_pt = *d;
  res.probe_time = 2.0 * *d;
  msg.note_measurement(node.id, *d);

  const double lo = (1.0 - params.beta) * *d, hi = (1.0 + params.beta) * *d;
  std::optional<std::pair<Millis, NodeId>> best;
  for (const RingEntry* e : node.ring.all()) {
    if (e->filtered_delay < lo || e->filtered_delay > hi) continue;
    const NodeId id = e->neighbor;
    if (id == node.id || id == msg.origin || id == msg.target || msg.on_path(id)) continue;
    ++res.candidates;
    res.probed.push_back(id);
    auto m = net.probe(id, msg.target);
    ++res.probes;
    if (!m) continue;
    res.probe_time = std::max(res.probe_time, 2.0 * e->filtered_delay + 2.0 * *m);
    msg.note_measurement(id, *m);
    std::pair<Millis, NodeId> k{*m, id};
    if (!best || k < *best) best = k;
  }
  std::sort(res.probed.begin(), res.probed.end());

  if (best && best->first <= params.beta * *d) {
    if (msg.hop_budget > 0) {
      --msg.hop_budget;
      msg.path.push_back(node.id);
      res.action = StepAction::kForward;
      res.next = best->second;
      return res;
    }
    msg.budget_exhausted = true;
  }
  res.local_best = msg.best;
  res.local_best_delay = msg.best_delay;
  return res;
}

NodeId vivaldi_centralized(std::span<const Coordinate> coords, std::span<const NodeId> servers,
                           const Coordinate& target_coord) {
  if (servers.empty()) throw ContractError("vivaldi_centralized: empty server set");
  NodeId best = kNoNode;
  double best_d = std::numeric_limits<double>::infinity();
  for (NodeId s : servers) {
    const double d = distance(coords[s], target_coord);
    if (d < best_d || (d == best_d && s < best)) {
      best = s;
      best_d = d;
    }
  }
  return best;
}

}  // namespace dnns
