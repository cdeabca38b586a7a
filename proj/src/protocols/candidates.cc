#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "dnns/protocol.h"

namespace dnns {

void validate(const ProtocolParams& p) {
  if (!(p.rho > 1)) throw ContractError("rho: must be > 1");
  if (!(p.beta > 0 && p.beta <= 1)) throw ContractError("beta: must be in (0,1]");
  if (p.m < 1) throw ContractError("m: must be >= 1");
  if (p.K < 1) throw ContractError("K: must be >= 1");
  if (!(p.err_gate > 0)) throw ContractError("err_gate: must be > 0");
  if (!(p.tiv_gap > 0)) throw ContractError("tiv_gap: must be > 0");
  if (!(p.beta_farthest > 0)) throw ContractError("beta_farthest: must be > 0");
  if (p.hop_cap < 1) throw ContractError("hop_cap: must be >= 1");
  if (p.bootstrap_probes < 1 || p.bootstrap_probes > kMaxBootstrapProbes) {
    throw ContractError("bootstrap_probes: must be in [1," + std::to_string(kMaxBootstrapProbes) + "]");
  }
  if (!(p.beta_cutoff >= 0 && p.beta_cutoff <= 1)) throw ContractError("beta_cutoff: must be in [0,1]");
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "hybridnn") return Algorithm::kHybridNN;
  if (name == "coordnn") return Algorithm::kCoordNN;
  if (name == "directdn2s" || name == "directdnns") return Algorithm::kDirectDN2S;
  if (name == "meridian") return Algorithm::kMeridian;
  if (name == "vivaldi") return Algorithm::kVivaldi;
  throw ParseError("unknown algorithm: " + std::string(name));
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kHybridNN: return "hybridnn";
    case Algorithm::kCoordNN: return "coordnn";
    case Algorithm::kDirectDN2S: return "directdn2s";
    case Algorithm::kMeridian: return "meridian";
    case Algorithm::kVivaldi: return "vivaldi";
  }
  return "?";
}

bool QueryMessage::on_path(NodeId id) const { return std::find(path.begin(), path.end(), id) != path.end(); }

bool QueryMessage::in_omega(NodeId id) const {
  return std::any_of(omega.begin(), omega.end(), [id](const OmegaEntry& e) { return e.id == id; });
}

void QueryMessage::note_measurement(NodeId id, Millis delay) {
  if (is_missing(delay)) return;
  if (best == kNoNode || delay < best_delay || (delay == best_delay && id < best)) {
    best = id;
    best_delay = delay;
  }
}

QueryMessage make_query(NodeId target, NodeId origin, SearchMode mode, std::size_t k,
                        const ProtocolParams& params) {
  if (k < 1) throw ContractError("query k must be >= 1");
  QueryMessage msg;
  msg.target = target;
  msg.origin = origin;
  msg.mode = mode;
  msg.k = k;
  msg.hop_budget = params.hop_cap * k;
  return msg;
}

namespace {

bool excluded(const NodeState& node, const QueryMessage& msg, NodeId id) {
  return id == node.id || id == msg.origin || id == msg.target || msg.on_path(id) || msg.in_omega(id);
}

}  // namespace

std::vector<const RingEntry*> choose_candidates(const NodeState& node, const QueryMessage& msg, Millis d_pt,
                                                const ProtocolParams& params) {
  std::vector<const RingEntry*> out;
  if (!(d_pt > 0)) return out;
  const std::size_t hi = node.ring.ring_of(params.rho * d_pt);
  for (const RingEntry* e : node.ring.neighbors_in_rings(1, hi)) {
    if (excluded(node, msg, e->neighbor)) continue;
    if (e->nonempty_rings < params.tau) continue;
    out.push_back(e);
  }
  return out;
}

std::vector<const RingEntry*> choose_farthest_candidates(const NodeState& node, const QueryMessage& msg,
                                                         Millis d_pt, const ProtocolParams& params) {
  std::vector<const RingEntry*> out;
  const double threshold = params.rho * (1.0 + params.beta_farthest) * d_pt;
  for (const RingEntry* e : node.ring.all()) {
    if (e->filtered_delay < threshold) continue;
    if (excluded(node, msg, e->neighbor)) continue;
    out.push_back(e);
  }
  return out;
}

std::vector<NodeId> probe_set(const NodeState& node, std::span<const RingEntry* const> candidates,
                              const Coordinate& target_coord, const ProtocolParams& params, bool farthest) {
  std::vector<std::tuple<double, double, NodeId>> ranked;
  ranked.reserve(candidates.size());
  for (const RingEntry* e : candidates) {
    double d = distance(e->coord, target_coord);
    ranked.emplace_back(farthest ? -d : d, e->coord.e, e->neighbor);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<NodeId> chosen;
  for (std::size_t i = 0; i < ranked.size() && i < params.m; ++i) chosen.push_back(std::get<2>(ranked[i]));
  for (const RingEntry* e : candidates) {
    if (e->coord.e > params.err_gate) {
      chosen.push_back(e->neighbor);
    } else if (std::abs(distance(e->coord, node.coord) - e->filtered_delay) > params.tiv_gap) {
      chosen.push_back(e->neighbor);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  return chosen;
}

Detection nearest_detector(const NodeState& node, std::span<const RingEntry* const> candidates,
                           const QueryMessage& msg, Millis d_pt, const ProtocolParams& params, Network& net,
                           ProbeSelection selection, bool farthest, bool include_self) {
  Detection det;
  std::vector<const RingEntry*> by_id(candidates.begin(), candidates.end());
  std::sort(by_id.begin(), by_id.end(),
            [](const RingEntry* a, const RingEntry* b) { return a->neighbor < b->neighbor; });

  if (selection == ProbeSelection::kAll) {
    for (const RingEntry* e : by_id) det.probed.push_back(e->neighbor);
  } else {
    det.probed = probe_set(node, candidates, msg.target_coord, params, farthest);
  }

  // (signed delay, coordinate error, id); the minimum wins.
  using Key = std::tuple<double, double, NodeId>;
  std::optional<Key> best;
  auto offer = [&](NodeId id, Millis d, double e) {
    Key k{farthest ? -d : d, e, id};
    if (!best || k < *best) best = k;
  };
  if (include_self && !is_missing(d_pt)) offer(node.id, d_pt, node.coord.e);

  std::size_t j = 0;
  det.measured.reserve(det.probed.size());
  for (NodeId id : det.probed) {
    while (by_id[j]->neighbor != id) ++j;
    const RingEntry* e = by_id[j];
    auto d = net.probe(id, msg.target);
    if (!d) {
      det.measured.push_back(kMissing);
      ++det.failed;
      continue;
    }
    det.measured.push_back(*d);
    det.probe_time = std::max(det.probe_time, 2.0 * e->filtered_delay + 2.0 * *d);
    offer(id, *d, e->coord.e);
  }
  if (best) {
    det.best = std::get<2>(*best);
    det.best_delay = farthest ? -std::get<0>(*best) : std::get<0>(*best);
  }
  return det;
}

std::vector<const RingEntry*> bootstrap_neighbors(const NodeState& node, std::size_t cap) {
  std::vector<std::vector<const RingEntry*>> rings;
  for (std::size_t i = 1; i <= node.ring.params().max_rings; ++i) {
    auto members = node.ring.neighbors_in_rings(i, i);
    if (!members.empty()) rings.push_back(std::move(members));
  }
  std::vector<const RingEntry*> out;
  for (std::size_t round = 0; out.size() < cap; ++round) {
    bool any = false;
    for (const auto& r : rings) {
      if (round < r.size()) {
        any = true;
        out.push_back(r[round]);
        if (out.size() == cap) break;
      }
    }
    if (!any) break;
  }
  return out;
}

std::optional<Millis> prepare_target(const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                                     const VivaldiParams& vparams, Network& net, StepResult& res) {
  auto d = net.probe(node.id, msg.target);
  ++res.probes;
  if (!d) return std::nullopt;
  res.d_pt = *d;
  res.probe_time = 2.0 * *d;
  msg.note_measurement(node.id, *d);

  if (!msg.init) {
    std::vector<TargetProbe> probes;
    for (const RingEntry* e : bootstrap_neighbors(node, params.bootstrap_probes)) {
      if (e->neighbor == msg.target) continue;
      auto m = net.probe(e->neighbor, msg.target);
      ++res.bootstrap_probes;
      res.bootstrapped.push_back(e->neighbor);
      if (!m || !(*m > 0)) continue;
      res.probe_time = std::max(res.probe_time, 2.0 * e->filtered_delay + 2.0 * *m);
      probes.push_back({e->coord, *m, e->neighbor});
    }
    if (probes.empty() && *d > 0) probes.push_back({node.coord, *d, node.id});
    msg.target_coord = probes.empty() ? Coordinate(vparams.dim)
                                      : bootstrap_target(probes, vparams, msg.target, params.bootstrap_probes);
    msg.init = true;
    if (params.target_refit > 0) msg.anchors = std::move(probes);
  } else {
    msg.target_coord = vivaldi_update(msg.target_coord, node.coord, *d, vparams, msg.target, node.id);
    if (params.target_refit > 0 && *d > 0) msg.anchors.push_back({node.coord, *d, node.id});
  }
  for (std::size_t pass = 0; pass < params.target_refit; ++pass) {
    for (const TargetProbe& a : msg.anchors) {
      msg.target_coord = vivaldi_update(msg.target_coord, a.coord, a.measured, vparams, msg.target, a.prober);
    }
  }
  return d;
}

void record_anchors(const NodeState& node, const Detection& det, QueryMessage& msg, const ProtocolParams& params) {
  if (params.target_refit == 0) return;
  for (std::size_t i = 0; i < det.probed.size(); ++i) {
    const Millis d = det.measured[i];
    if (is_missing(d) || !(d > 0)) continue;
    if (const RingEntry* e = node.ring.find(det.probed[i])) msg.anchors.push_back({e->coord, d, e->neighbor});
  }
}

}  // namespace dnns
