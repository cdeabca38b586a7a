#include <algorithm>

#include "dnns/protocol.h"

namespace dnns {

namespace {

OmegaEntry omega_entry(const NodeState& node, NodeId id, Millis delay) {
  if (id == node.id) return {id, delay, node.coord, node.ring.nonempty_count()};
  const RingEntry* e = node.ring.find(id);
  if (e == nullptr) return {id, delay, {}, 0};
  return {id, delay, e->coord, e->nonempty_rings};
}

StepResult& backtrack_or_stop(QueryMessage& msg, StepResult& res) {
  if (msg.path.empty() || msg.hop_budget == 0) {
    if (msg.hop_budget == 0 && !msg.path.empty()) msg.budget_exhausted = true;
    msg.short_result = true;
    return res;
  }
  --msg.hop_budget;
  res.action = StepAction::kBacktrack;
  res.next = msg.path.back();
  msg.path.pop_back();
  return res;
}

// Shared backtracking skeleton; the two searches differ in candidate choice
// and in which direction counts as progress.
StepResult k_step(const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                  const VivaldiParams& vparams, Network& net, bool farthest) {
  StepResult res;
  if (msg.omega.size() >= msg.k) return res;

  auto d = prepare_target(node, msg, params, vparams, net, res);
  if (!d) return backtrack_or_stop(msg, res);
  for (bool first = true;; first = false) {
    auto cands = farthest ? choose_farthest_candidates(node, msg, *d, params)
                          : (*d > 0 ? choose_candidates(node, msg, *d, params) : std::vector<const RingEntry*>{});
    res.candidates = cands.size();
    Detection det = nearest_detector(node, cands, msg, *d, params, net, ProbeSelection::kShortlist, farthest,
                                     !msg.in_omega(node.id));
    res.probes += det.probed.size();
    res.probed.insert(res.probed.end(), det.probed.begin(), det.probed.end());
    res.probe_time = first ? std::max(res.probe_time, det.probe_time) : res.probe_time + det.probe_time;
    for (std::size_t i = 0; i < det.probed.size(); ++i) msg.note_measurement(det.probed[i], det.measured[i]);
    record_anchors(node, det, msg, params);

    const bool progress = det.best != kNoNode && det.best != node.id &&
                          (farthest ? det.best_delay > *d
                                    : det.best_delay <= params.beta * *d ||
                                          (params.beta_cutoff > 0 && det.best_delay <= *d));
    if (progress) {
      if (msg.hop_budget > 0) {
        --msg.hop_budget;
        msg.path.push_back(node.id);
        res.action = StepAction::kForward;
        res.next = det.best;
        return res;
      }
      msg.budget_exhausted = true;
    }

    bool added = false;
    if (det.best != kNoNode && !msg.in_omega(det.best)) {
      msg.omega.push_back(omega_entry(node, det.best, det.best_delay));
      added = true;
    }
    res.local_best = det.best;
    res.local_best_delay = det.best_delay;
    if (msg.omega.size() >= msg.k) return res;
    // Without a predecessor the node resumes as its own, for as long as that
    // still turns up a new result.
    if (!msg.resume_at_entry || !msg.path.empty() || !added || msg.budget_exhausted) {
      return backtrack_or_stop(msg, res);
    }
  }
}

}  // namespace

StepResult kdnns_step(const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                      const VivaldiParams& vparams, Network& net) {
  return k_step(node, msg, params, vparams, net, false);
}

StepResult kdfns_step(const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                      const VivaldiParams& vparams, Network& net) {
  return k_step(node, msg, params, vparams, net, true);
}

}  // namespace dnns
