#include <stdexcept>

#include "dnns/protocol.h"

namespace dnns {

namespace {

bool should_forward(Millis best, Millis d_pt, const ProtocolParams& params) {
  if (params.beta_cutoff > 0) return best <= params.beta_cutoff * d_pt || best <= d_pt;
  return best <= params.beta * d_pt;
}

}  // namespace

StepResult hybridnn_step(const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                         const VivaldiParams& vparams, Network& net, ProbeSelection selection) {
  StepResult res;
  auto d = prepare_target(node, msg, params, vparams, net, res);
  if (!d) {
    res.local_best = msg.best;
    res.local_best_delay = msg.best_delay;
    return res;
  }
  auto cands = choose_candidates(node, msg, *d, params);
  res.candidates = cands.size();
  Detection det = nearest_detector(node, cands, msg, *d, params, net, selection);
  res.probes += det.probed.size();
  res.probed = det.probed;
  res.probe_time = std::max(res.probe_time, det.probe_time);
  for (std::size_t i = 0; i < det.probed.size(); ++i) msg.note_measurement(det.probed[i], det.measured[i]);
  record_anchors(node, det, msg, params);

  res.local_best = det.best;
  res.local_best_delay = det.best_delay;
  if (det.best != node.id && should_forward(det.best_delay, *d, params)) {
    if (msg.hop_budget == 0) {
      msg.budget_exhausted = true;
      return res;
    }
    --msg.hop_budget;
    msg.path.push_back(node.id);
    res.action = StepAction::kForward;
    res.next = det.best;
  }
  return res;
}

StepResult directdnns_step(const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                           const VivaldiParams& vparams, Network& net) {
  return hybridnn_step(node, msg, params, vparams, net, ProbeSelection::kAll);
}

namespace {

StepResult dispatch(Algorithm algo, const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                    const VivaldiParams& vparams, Network& net) {
  if (msg.mode == SearchMode::kKNN) return kdnns_step(node, msg, params, vparams, net);
  if (msg.mode == SearchMode::kKFN) return kdfns_step(node, msg, params, vparams, net);
  switch (algo) {
    case Algorithm::kHybridNN: return hybridnn_step(node, msg, params, vparams, net);
    case Algorithm::kDirectDN2S: return directdnns_step(node, msg, params, vparams, net);
    case Algorithm::kCoordNN: return coordnn_step(node, msg, params, vparams, net);
    case Algorithm::kMeridian: return meridian_step(node, msg, params, net);
    case Algorithm::kVivaldi: break;
  }
  throw ContractError("run_search: the centralized baseline has no distributed step");
}

}  // namespace

SearchOutcome run_search(Algorithm algo, NodeId entry, QueryMessage msg, const ProtocolParams& params,
                         const VivaldiParams& vparams, Network& net, const StepObserver& observer) {
  SearchOutcome out;
  NodeId cur = entry;
  // hop_budget bounds forwards and backtracks; the extra steps cover the
  // handling at each terminal node.
  const std::size_t max_steps = msg.hop_budget + msg.k + 2;
  for (std::size_t step = 0;; ++step) {
    const NodeState* node = net.node(cur);
    if (node == nullptr || !node->alive || step > max_steps) {
      out.no_result = true;
      out.terminal = cur;
      break;
    }
    StepResult r = dispatch(algo, *node, msg, params, vparams, net);
    out.visited.push_back(cur);
    out.probes += r.probes;
    out.bootstrap_probes += r.bootstrap_probes;
    if (observer) observer(cur, msg, r);
    if (r.action == StepAction::kForward) {
      ++out.hops;
      cur = r.next;
      continue;
    }
    if (r.action == StepAction::kBacktrack) {
      ++out.backtracks;
      cur = r.next;
      continue;
    }
    out.terminal = cur;
    if (msg.mode == SearchMode::kNN) {
      out.result = r.local_best;
      out.result_delay = r.local_best_delay;
    } else if (!msg.omega.empty()) {
      out.result = msg.omega.front().id;
      out.result_delay = msg.omega.front().delay;
    }
    break;
  }
  out.omega = msg.omega;
  out.budget_exhausted = msg.budget_exhausted;
  out.short_result = msg.short_result;
  if (out.result == kNoNode) out.no_result = true;
  return out;
}

}  // namespace dnns
