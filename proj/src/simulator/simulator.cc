#include "dnns/simulator.h"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <future>
#include <numeric>
#include <sstream>

#include "dnns/inframetric.h"

namespace dnns {

std::string_view to_string(Profile p) { return p == Profile::kHybrid ? "hybrid" : "meridian"; }

std::vector<Algorithm> profile_algorithms(Profile p, const std::vector<Algorithm>& requested) {
  std::vector<Algorithm> out;
  for (Algorithm a : requested) {
    const bool meridian = a == Algorithm::kMeridian;
    if (a == Algorithm::kVivaldi) continue;
    if ((p == Profile::kMeridian) == meridian) out.push_back(a);
  }
  return out;
}

std::vector<QuerySpec> make_query_specs(const SimConfig& cfg, std::size_t servers, std::uint64_t trial_seed) {
  Rng rng = Rng::stream(trial_seed, "queries");
  const double mean = cfg.query_mean / static_cast<double>(std::max<std::size_t>(servers, 1));
  std::vector<QuerySpec> out;
  out.reserve(cfg.queries);
  double t = cfg.warmup;
  for (std::uint64_t i = 0; i < cfg.queries; ++i) {
    t += rng.exponential(mean);
    const double target_u = rng.uniform();
    const double entry_u = rng.uniform();
    out.push_back({i, t, target_u, entry_u});
  }
  return out;
}

Membership::Membership(std::size_t n, std::vector<NodeId> servers) : servers_(std::move(servers)) {
  std::sort(servers_.begin(), servers_.end());
  std::vector<bool> is(n, false);
  for (NodeId s : servers_) {
    if (s >= n) throw ContractError("server id out of range");
    is[s] = true;
  }
  for (NodeId i = 0; i < n; ++i) {
    if (!is[i]) clients_.push_back(i);
  }
}

bool Membership::is_server(NodeId id) const { return std::binary_search(servers_.begin(), servers_.end(), id); }

void Membership::apply(const ChurnEvent& e) {
  if (e.join) {
    if (is_server(e.node)) throw ContractError("churn: join of live server " + std::to_string(e.node));
    auto it = std::lower_bound(clients_.begin(), clients_.end(), e.node);
    if (it == clients_.end() || *it != e.node) {
      throw ContractError("churn: join of unknown node " + std::to_string(e.node));
    }
    clients_.erase(it);
    servers_.insert(std::lower_bound(servers_.begin(), servers_.end(), e.node), e.node);
  } else {
    auto it = std::lower_bound(servers_.begin(), servers_.end(), e.node);
    if (it == servers_.end() || *it != e.node) {
      throw ContractError("churn: leave of unknown node " + std::to_string(e.node));
    }
    servers_.erase(it);
  }
}

namespace {

NodeId pick(const std::vector<NodeId>& v, double u) {
  if (v.empty()) return kNoNode;
  auto i = static_cast<std::size_t>(u * static_cast<double>(v.size()));
  return v[std::min(i, v.size() - 1)];
}

}  // namespace

NodeId Membership::pick_server(double u) const { return pick(servers_, u); }
NodeId Membership::pick_client(double u) const { return pick(clients_, u); }

Simulation::Simulation(const SimConfig& cfg, const DelayMatrix& m, std::vector<NodeId> servers, Profile profile,
                       std::uint64_t trial_seed, std::ostream* trace)
    : cfg_(cfg),
      m_(m),
      profile_(profile),
      seed_(trial_seed),
      trace_(trace),
      protocol_(cfg.protocol),
      ring_params_(cfg.ring),
      oversample_(cfg.oversample && profile == Profile::kHybrid),
      members_(m.size(), servers),
      nodes_(m.size()),
      join_rng_(Rng::stream(trial_seed, "join")),
      jitter_rng_(Rng::stream(trial_seed, "jitter")),
      node_bytes_(m.size(), 0) {
  if (profile == Profile::kMeridian) {
    protocol_.beta = cfg.meridian_beta;
    ring_params_.capacity = cfg.meridian_ring_capacity;
    ring_params_.tolerance = cfg.meridian_ring_tolerance;
  }
  gossip_rng_.reserve(m.size());
  mgmt_rng_.reserve(m.size());
  oversample_rng_.reserve(m.size());
  for (NodeId i = 0; i < m.size(); ++i) {
    gossip_rng_.push_back(Rng::stream(trial_seed, "gossip", i));
    mgmt_rng_.push_back(Rng::stream(trial_seed, "ringmgmt", i));
    oversample_rng_.push_back(Rng::stream(trial_seed, "oversample", i));
  }
  // random join order; each server bootstraps off an earlier one so the
  // initial contact graph is a tree
  Rng boot = Rng::stream(trial_seed, "bootstrap");
  std::vector<NodeId> order = members_.servers();
  boot.shuffle(order);
  for (std::size_t k = 0; k < order.size(); ++k) {
    start_node(order[k], 0.0);
    if (k > 0) {
      nodes_[order[k]]->bootstrap = order[boot.below(k)];
    } else if (order.size() > 1) {
      nodes_[order[k]]->bootstrap = order[1];
    }
  }
}

void Simulation::push(double time, EventKind kind, NodeId subject, std::uint64_t payload) {
  queue_.push({time, seq_++, kind, subject, payload});
}

void Simulation::start_node(NodeId id, double t) {
  nodes_[id] = std::make_unique<NodeState>(id, cfg_.vivaldi.dim, ring_params_);
  push(t + gossip_rng_[id].exponential(cfg_.gossip_mean), EventKind::kGossipTick, id);
  push(t + mgmt_rng_[id].exponential(cfg_.ring_mgmt_mean), EventKind::kRingMgmtTick, id);
  if (oversample_) {
    push(t + oversample_rng_[id].exponential(cfg_.oversample_mean), EventKind::kOversampleTick, id);
  }
}

void Simulation::schedule_queries(std::vector<QuerySpec> specs, std::vector<Algorithm> algos) {
  queries_ = std::move(specs);
  query_algos_ = std::move(algos);
  runs_.clear();
  for (Algorithm a : query_algos_) runs_.push_back({a, {}});
  for (std::size_t i = 0; i < queries_.size(); ++i) {
    push(queries_[i].time, EventKind::kQueryArrival, kNoNode, i);
  }
}

void Simulation::schedule_churn(std::vector<ChurnEvent> events) {
  churn_ = std::move(events);
  for (std::size_t i = 0; i < churn_.size(); ++i) {
    push(churn_[i].time, churn_[i].join ? EventKind::kNodeJoin : EventKind::kNodeLeave, churn_[i].node, i);
  }
}

double Simulation::end_time() const {
  double t = cfg_.warmup;
  if (!queries_.empty()) t = std::max(t, queries_.back().time);
  return t;
}

void Simulation::run_until(double t) {
  while (!queue_.empty() && queue_.top().time <= t) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    ++events_processed_;
    switch (ev.kind) {
      case EventKind::kGossipTick: {
        NodeState* n = nodes_[ev.subject].get();
        if (n == nullptr || !n->alive) break;
        gossip(ev.subject);
        push(now_ + gossip_rng_[ev.subject].exponential(cfg_.gossip_mean), EventKind::kGossipTick, ev.subject);
        break;
      }
      case EventKind::kRingMgmtTick: {
        NodeState* n = nodes_[ev.subject].get();
        if (n == nullptr || !n->alive) break;
        n->ring.manage_all();
        push(now_ + mgmt_rng_[ev.subject].exponential(cfg_.ring_mgmt_mean), EventKind::kRingMgmtTick,
             ev.subject);
        break;
      }
      case EventKind::kOversampleTick: {
        NodeState* n = nodes_[ev.subject].get();
        if (n == nullptr || !n->alive) break;
        oversample(ev.subject);
        push(now_ + oversample_rng_[ev.subject].exponential(cfg_.oversample_mean), EventKind::kOversampleTick,
             ev.subject);
        break;
      }
      case EventKind::kQueryArrival:
        query(queries_[ev.payload]);
        break;
      case EventKind::kDelivery: {
        Delivery& d = deliveries_[ev.payload];
        NodeState* n = nodes_[d.node].get();
        if (n != nullptr && n->alive) absorb_results(*n, d.results, now_);
        d.results.clear();
        break;
      }
      case EventKind::kNodeJoin:
      case EventKind::kNodeLeave:
        churn(churn_[ev.payload]);
        break;
    }
  }
  now_ = std::max(now_, t);
}

std::optional<Millis> Simulation::probe(NodeId from, NodeId to) {
  for (NodeId id : {from, to}) {
    const NodeState* n = nodes_[id].get();
    if (n != nullptr && !n->alive) return std::nullopt;
  }
  if (from == to) return 0.0;
  double d = m_(from, to);
  if (cfg_.measure == MeasureMode::kRttAverage) {
    const double back = m_(to, from);
    if (is_missing(d)) {
      d = back;
    } else if (!is_missing(back)) {
      d = 0.5 * (d + back);
    }
  }
  if (is_missing(d)) return std::nullopt;
  if (cfg_.probe_jitter > 0) d *= 1.0 + jitter_rng_.uniform(0.0, cfg_.probe_jitter);
  return d;
}

const NodeState* Simulation::node(NodeId id) const { return id < nodes_.size() ? nodes_[id].get() : nullptr; }

std::uint64_t Simulation::send(NodeId src, NodeId dst, const MessageShape& shape, bool maintenance) {
  const std::uint64_t b = account(shape, cfg_.bytes);
  bytes_.by_kind[static_cast<std::size_t>(shape.kind)] += b;
  ++bytes_.messages;
  if (maintenance) {
    bytes_.maintenance += b;
    if (src < node_bytes_.size()) node_bytes_[src] += b;
  } else {
    bytes_.queries += b;
  }
  if (trace_ != nullptr) {
    char line[160];
    std::snprintf(line, sizeof line, "%.6f\t%u\t%u\t%s\t%" PRIu64 "\n", now_, src, dst,
                  std::string(to_string(shape.kind)).c_str(), b);
    *trace_ << line;
  }
  return b;
}

void Simulation::gossip(NodeId id) {
  NodeState& p = *nodes_[id];
  Rng& rng = gossip_rng_[id];
  const NodeId q = choose_gossip_peer(p, rng);
  if (q == kNoNode) return;
  if (q == p.bootstrap) p.joined = true;
  GossipRequest req = make_gossip(p, q, rng);
  send(id, q, {MessageKind::kGossipRequest, 0, req.samples.size(), 0, 0}, true);
  NodeState* qs = nodes_[q].get();
  if (qs == nullptr || !qs->alive) {
    p.ring.remove(q);
    return;
  }
  send(q, id, {MessageKind::kGossipAck, 0, 0, 1, 0}, true);
  if (auto d = probe(id, q)) absorb_contact(p, *qs, *d, now_, cfg_.vivaldi);

  req.samples.push_back(id);
  for (NodeId s : req.samples) {
    send(q, s, {MessageKind::kContactRequest, 0, 0, 0, 0}, true);
    NodeState* ss = nodes_[s].get();
    if (ss == nullptr || !ss->alive) {
      qs->ring.remove(s);
      continue;
    }
    send(s, q, {MessageKind::kContactAck, 0, 0, 1, 0}, true);
    if (auto d = probe(q, s)) absorb_contact(*qs, *ss, *d, now_, cfg_.vivaldi);
    if (s != id) {
      if (auto d = probe(s, q)) absorb_contact(*ss, *qs, *d, now_, cfg_.vivaldi);
    }
  }
}

StepObserver Simulation::accounting_observer(NodeId origin, bool maintenance, Millis& wall, std::uint64_t& bytes) {
  const bool timed = cfg_.latency_mode == LatencyMode::kMatrix;
  return [this, origin, maintenance, timed, &wall, &bytes](NodeId cur, const QueryMessage& msg,
                                                          const StepResult& r) {
    if (r.probes > 0) bytes += send(cur, msg.target, {MessageKind::kProbe}, maintenance);
    for (NodeId b : r.bootstrapped) {
      bytes += send(cur, b, {MessageKind::kDelegation}, maintenance);
      bytes += send(b, msg.target, {MessageKind::kProbe}, maintenance);
    }
    for (NodeId i : r.probed) {
      bytes += send(cur, i, {MessageKind::kDelegation}, maintenance);
      bytes += send(i, msg.target, {MessageKind::kProbe}, maintenance);
    }
    if (timed) wall += r.probe_time;
    if (r.action == StepAction::kTerminate) {
      const std::uint64_t entries = msg.mode == SearchMode::kNN ? 1 : msg.omega.size();
      bytes += send(cur, origin, {MessageKind::kResult, 0, 0, 0, entries}, maintenance);
      if (timed && cur != origin && m_.present(cur, origin)) wall += m_(cur, origin);
    } else {
      bytes += send(cur, r.next,
                    {MessageKind::kQuery, msg.path.size(), 0, (msg.init ? 1u : 0u) + msg.anchors.size(), msg.omega.size()},
                    maintenance);
      if (timed && m_.present(cur, r.next)) wall += m_(cur, r.next);
    }
  };
}

SearchOutcome Simulation::search(Algorithm algo, NodeId entry, QueryMessage msg, const StepObserver& observer) {
  return run_search(algo, entry, std::move(msg), protocol_, cfg_.vivaldi, *this, observer);
}

void Simulation::oversample(NodeId id) {
  NodeState& o = *nodes_[id];
  if (o.ring.empty()) return;
  auto all = o.ring.all();
  const NodeId p = all[oversample_rng_[id].below(all.size())]->neighbor;
  const NodeState* ps = nodes_[p].get();
  if (ps == nullptr || !ps->alive) {
    o.ring.remove(p);
    return;
  }
  std::vector<OmegaEntry> results;
  Millis slowest = 0;
  for (SearchMode mode : {SearchMode::kKNN, SearchMode::kKFN}) {
    QueryMessage msg = make_query(id, id, mode, protocol_.K, protocol_);
    msg.init = true;
    msg.target_coord = o.coord;
    // Partial results are inserted as they are; full sets of K near
    // neighbors crowd the inner rings and dispersion eviction drops the
    // closest ones.
    msg.resume_at_entry = false;
    Millis wall = 0;
    std::uint64_t bytes = 0;
    if (cfg_.latency_mode == LatencyMode::kMatrix && m_.present(id, p)) wall += m_(id, p);
    bytes += send(id, p, {MessageKind::kQuery, 0, 0, 1, 0}, true);
    SearchOutcome out = search(Algorithm::kHybridNN, p, std::move(msg), accounting_observer(id, true, wall, bytes));
    slowest = std::max(slowest, wall);
    results.insert(results.end(), out.omega.begin(), out.omega.end());
  }
  deliveries_.push_back({id, std::move(results)});
  push(now_ + slowest / 1000.0, EventKind::kDelivery, id, deliveries_.size() - 1);
}

void Simulation::query(const QuerySpec& spec) {
  const NodeId target = members_.pick_client(spec.target_u);
  const NodeId entry = members_.pick_server(spec.entry_u);
  if (target == kNoNode || entry == kNoNode) return;
  const auto oracle = exact_nearest(m_, members_.servers(), target, 1, cfg_.oracle);
  for (AlgorithmRun& run : runs_) {
    QueryRecord rec;
    rec.query = spec.id;
    rec.time = spec.time;
    rec.target = target;
    rec.entry = entry;
    rec.oracle = oracle.front().first;
    rec.oracle_delay = oracle.front().second;
    Millis wall = 0;
    std::uint64_t bytes = 0;
    if (cfg_.latency_mode == LatencyMode::kMatrix && m_.present(target, entry)) wall += m_(target, entry);
    bytes += send(target, entry, {MessageKind::kQuery, 0, 0, 0, 0}, false);
    QueryMessage msg = make_query(target, target, SearchMode::kNN, 1, protocol_);
    SearchOutcome out = search(run.algo, entry, std::move(msg), accounting_observer(target, false, wall, bytes));
    rec.hops = out.hops;
    rec.probes = out.probes;
    rec.bootstrap_probes = out.bootstrap_probes;
    rec.bytes = bytes;
    rec.wall_ms = wall;
    rec.budget_exhausted = out.budget_exhausted;
    rec.no_result = out.no_result;
    if (!out.no_result) {
      rec.returned = out.result;
      rec.returned_delay = oracle_delay(m_, out.result, target, cfg_.oracle);
      if (is_missing(rec.returned_delay)) rec.no_result = true;
    }
    run.records.push_back(rec);
  }
}

void Simulation::churn(const ChurnEvent& e) {
  members_.apply(e);
  if (e.join) {
    const auto& live = members_.servers();
    NodeId contact = e.node;
    if (live.size() > 1) {
      while (contact == e.node) contact = live[join_rng_.below(live.size())];
    }
    start_node(e.node, now_);
    nodes_[e.node]->bootstrap = contact;
  } else {
    nodes_[e.node]->alive = false;
  }
}

std::vector<Coordinate> centralized_coordinates(const DelayMatrix& m, const std::vector<NodeId>& servers,
                                                const SimConfig& cfg, std::uint64_t trial_seed) {
  Rng rng = Rng::stream(trial_seed, "vivaldi");
  std::vector<Coordinate> coords(m.size(), Coordinate(cfg.vivaldi.dim));
  if (servers.empty()) return coords;
  for (std::size_t r = 0; r < cfg.vivaldi_rounds; ++r) {
    for (NodeId i = 0; i < m.size(); ++i) {
      const NodeId s = servers[rng.below(servers.size())];
      if (s == i) continue;
      double d = m(s, i);
      if (cfg.measure == MeasureMode::kRttAverage && m.present(i, s)) {
        d = is_missing(d) ? m(i, s) : 0.5 * (d + m(i, s));
      }
      if (is_missing(d)) continue;
      coords[i] = vivaldi_update(coords[i], coords[s], d, cfg.vivaldi, i, s);
    }
  }
  return coords;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  return Rng::stream(seed, "trial", trial).next_u64();
}

std::vector<NodeId> trial_servers(std::size_t n, std::size_t servers, std::uint64_t tseed) {
  if (servers >= n) {
    throw ContractError("servers: " + std::to_string(servers) + " servers need a matrix larger than " +
                        std::to_string(n) + " nodes");
  }
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng = Rng::stream(tseed, "servers");
  rng.shuffle(ids);
  ids.resize(servers);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<ChurnEvent> trial_churn(const SimConfig& cfg, const std::vector<NodeId>& servers, std::size_t n,
                                    std::uint64_t tseed) {
  std::vector<ChurnEvent> events = cfg.churn;
  if (cfg.churn_leaves > 0 || cfg.churn_joins > 0) {
    Rng rng = Rng::stream(tseed, "churn");
    const double span = cfg.query_mean * static_cast<double>(cfg.queries) /
                        static_cast<double>(std::max<std::size_t>(servers.size(), 1));
    std::vector<NodeId> live = servers;
    Membership probe_members(n, servers);
    std::vector<NodeId> leavers = live;
    rng.shuffle(leavers);
    leavers.resize(std::min(cfg.churn_leaves, leavers.size() > 1 ? leavers.size() - 1 : 0));
    for (NodeId s : leavers) events.push_back({cfg.warmup + rng.uniform() * span, false, s});
    std::vector<NodeId> joiners = probe_members.clients();
    rng.shuffle(joiners);
    joiners.resize(std::min(cfg.churn_joins, joiners.size() > 1 ? joiners.size() - 1 : 0));
    for (NodeId c : joiners) events.push_back({cfg.warmup + rng.uniform() * span, true, c});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const ChurnEvent& a, const ChurnEvent& b) { return a.time < b.time; });
  return events;
}

TrialReport run_trial(const SimConfig& cfg, const DelayMatrix& m, std::size_t trial, std::ostream* trace) {
  TrialReport rep;
  rep.trial = trial;
  rep.seed = trial_seed(cfg.seed, trial);
  rep.servers = trial_servers(m.size(), cfg.servers, rep.seed);
  rep.churn = trial_churn(cfg, rep.servers, m.size(), rep.seed);
  const auto specs = make_query_specs(cfg, rep.servers.size(), rep.seed);

  std::vector<AlgorithmRun> collected;
  for (Profile p : {Profile::kHybrid, Profile::kMeridian}) {
    auto algos = profile_algorithms(p, cfg.algorithms);
    if (algos.empty()) continue;
    Simulation sim(cfg, m, rep.servers, p, rep.seed, trace);
    sim.schedule_churn(rep.churn);
    sim.schedule_queries(specs, algos);
    sim.run();
    for (const AlgorithmRun& r : sim.runs()) collected.push_back(r);
    rep.profiles.push_back({p, sim.bytes(), sim.node_bytes()});
  }

  if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), Algorithm::kVivaldi) != cfg.algorithms.end()) {
    const auto coords = centralized_coordinates(m, rep.servers, cfg, rep.seed);
    AlgorithmRun run{Algorithm::kVivaldi, {}};
    Membership members(m.size(), rep.servers);
    std::size_t next_churn = 0;
    for (const QuerySpec& q : specs) {
      while (next_churn < rep.churn.size() && rep.churn[next_churn].time <= q.time) {
        members.apply(rep.churn[next_churn++]);
      }
      const NodeId target = members.pick_client(q.target_u);
      const NodeId entry = members.pick_server(q.entry_u);
      if (target == kNoNode || entry == kNoNode) continue;
      const auto oracle = exact_nearest(m, members.servers(), target, 1, cfg.oracle);
      QueryRecord rec;
      rec.query = q.id;
      rec.time = q.time;
      rec.target = target;
      rec.entry = entry;
      rec.oracle = oracle.front().first;
      rec.oracle_delay = oracle.front().second;
      rec.returned = vivaldi_centralized(coords, members.servers(), coords[target]);
      rec.returned_delay = oracle_delay(m, rec.returned, target, cfg.oracle);
      rec.no_result = is_missing(rec.returned_delay);
      run.records.push_back(rec);
    }
    collected.push_back(std::move(run));
  }

  for (Algorithm a : cfg.algorithms) {
    for (AlgorithmRun& r : collected) {
      if (r.algo == a) rep.runs.push_back(std::move(r));
    }
  }
  return rep;
}

RunReport run(const SimConfig& cfg, const DelayMatrix& m, const RunOptions& opts) {
  validate(cfg);
  if (cfg.servers >= m.size()) {
    throw ContractError("servers: " + std::to_string(cfg.servers) + " servers need a matrix larger than " +
                        std::to_string(m.size()) + " nodes");
  }
  RunReport rep;
  rep.trials.resize(cfg.trials);
  const std::size_t jobs = std::max<std::size_t>(opts.jobs, 1);
  std::vector<std::ostringstream> traces(opts.trace != nullptr ? cfg.trials : 0);
  for (std::size_t start = 0; start < cfg.trials; start += jobs) {
    const std::size_t stop = std::min(cfg.trials, start + jobs);
    std::vector<std::future<TrialReport>> pending;
    for (std::size_t t = start; t < stop; ++t) {
      std::ostream* trace = opts.trace != nullptr ? &traces[t] : nullptr;
      pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                   [&cfg, &m, t, trace] { return run_trial(cfg, m, t, trace); }));
    }
    for (std::size_t t = start; t < stop; ++t) rep.trials[t] = pending[t - start].get();
  }
  if (opts.trace != nullptr) {
    for (auto& t : traces) *opts.trace << t.str();
  }
  return rep;
}

}  // namespace dnns
