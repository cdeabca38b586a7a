#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dnns/concentric_ring.h"
#include "dnns/coordinate.h"
#include "dnns/types.h"

namespace dnns {

struct ProtocolParams {
  double rho = 3.0;
  double beta = 1.0;
  std::size_t m = 4;
  std::size_t tau = 4;
  std::size_t K = 10;
  double err_gate = 0.7;
  Millis tiv_gap = 50.0;
  double beta_farthest = 1.2;
  std::size_t hop_cap = 32;
  std::size_t bootstrap_probes = kMaxBootstrapProbes;
  // 0 disables the cutoff variant. Otherwise a step forwards when the best
  // candidate is within beta_cutoff * d_PT, or else delegates across an
  // equal-or-closer plateau.
  double beta_cutoff = 0.0;
  // Passes of TIV-Vivaldi over every target measurement the message carries,
  // run at each hop after the single per-hop update. 0 keeps only that update.
  std::size_t target_refit = 20;
};

void validate(const ProtocolParams& p);

enum class Algorithm { kHybridNN, kCoordNN, kDirectDN2S, kMeridian, kVivaldi };

Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm a);

enum class SearchMode { kNN, kKNN, kKFN };

struct OmegaEntry {
  NodeId id = kNoNode;
  Millis delay = 0;  // measured delay from id to the target
  Coordinate coord;
  std::uint32_t nonempty_rings = 0;
};

struct QueryMessage {
  NodeId target = kNoNode;
  NodeId origin = kNoNode;
  Coordinate target_coord;  // empty while init is false
  bool init = false;
  std::vector<NodeId> path;
  std::vector<OmegaEntry> omega;
  std::size_t k = 1;
  SearchMode mode = SearchMode::kNN;
  std::size_t hop_budget = 0;
  // Best real measurement seen so far; used by the coordinate-only and
  // Meridian terminations.
  NodeId best = kNoNode;
  Millis best_delay = kMissing;
  bool budget_exhausted = false;
  bool short_result = false;
  // K searches: a node that terminates with an empty path searches again
  // with Omega excluded instead of returning a short result.
  bool resume_at_entry = true;
  // Target measurements gathered along the path (bootstrap probes, each
  // hop's d_PT, detector probes); only kept when target_refit > 0.
  std::vector<TargetProbe> anchors;

  bool on_path(NodeId id) const;
  bool in_omega(NodeId id) const;
  void note_measurement(NodeId id, Millis delay);
};

// hop_budget = hop_cap * k.
QueryMessage make_query(NodeId target, NodeId origin, SearchMode mode, std::size_t k,
                        const ProtocolParams& params);

struct NodeState {
  NodeId id = kNoNode;
  Coordinate coord;
  ConcentricRing ring;
  bool alive = true;
  NodeId bootstrap = kNoNode;
  bool joined = false;  // set once the bootstrap contact has been gossiped with

  NodeState() = default;
  NodeState(NodeId node_id, std::size_t dim, RingParams ring_params)
      : id(node_id), coord(dim), ring(ring_params) {}
};

// Measurement and lookup surface the protocols run against.
class Network {
 public:
  virtual ~Network() = default;
  // What a probe issued by `from` reports for `to`; nullopt if either end is down.
  virtual std::optional<Millis> probe(NodeId from, NodeId to) = 0;
  virtual const NodeState* node(NodeId id) const = 0;
};

// Rings 1..ring_of(rho * d_PT) minus path, origin, target, self, Omega and
// neighbors advertising fewer than tau non-empty rings.
std::vector<const RingEntry*> choose_candidates(const NodeState& node, const QueryMessage& msg, Millis d_pt,
                                                const ProtocolParams& params);

// Entries with filtered delay >= rho (1 + beta_farthest) d_PT, minus path,
// origin, target, self and Omega. No tau pruning.
std::vector<const RingEntry*> choose_farthest_candidates(const NodeState& node, const QueryMessage& msg,
                                                         Millis d_pt, const ProtocolParams& params);

enum class ProbeSelection { kShortlist, kAll };

struct Detection {
  NodeId best = kNoNode;
  Millis best_delay = kMissing;
  std::vector<NodeId> probed;    // ascending ids
  std::vector<Millis> measured;  // parallel to probed, Missing on failure
  std::size_t failed = 0;
  Millis probe_time = 0;
};

// Ids chosen for direct probing: top-m by coordinate distance to the target
// (largest first when farthest), those with e > err_gate, and those whose
// coordinate distance to the current node misses its filtered delay by more
// than tiv_gap. Returned in ascending id order.
std::vector<NodeId> probe_set(const NodeState& node, std::span<const RingEntry* const> candidates,
                              const Coordinate& target_coord, const ProtocolParams& params, bool farthest);

// Probes the selected candidates toward the target and returns the argmin
// (argmax when farthest) of measured delay over probed members plus the
// current node. Ties go to the smaller coordinate error, then the smaller id.
// The current node enters the comparison unless include_self is false.
Detection nearest_detector(const NodeState& node, std::span<const RingEntry* const> candidates,
                           const QueryMessage& msg, Millis d_pt, const ProtocolParams& params, Network& net,
                           ProbeSelection selection = ProbeSelection::kShortlist, bool farthest = false,
                           bool include_self = true);

enum class StepAction { kForward, kBacktrack, kTerminate };

struct StepResult {
  StepAction action = StepAction::kTerminate;
  NodeId next = kNoNode;
  Millis d_pt = kMissing;
  std::size_t probes = 0;            // target probes of this step, d_PT included
  std::size_t bootstrap_probes = 0;  // target-coordinate bootstrap probes
  std::size_t candidates = 0;
  std::vector<NodeId> probed;
  std::vector<NodeId> bootstrapped;  // neighbors asked to probe for the bootstrap
  // Elapsed probing time of the step in ms, estimated from probe delays.
  Millis probe_time = 0;
  // Result held by the node when it terminates (NN modes).
  NodeId local_best = kNoNode;
  Millis local_best_delay = kMissing;
};

// Measures d_PT; bootstraps the target coordinate on first contact,
// updates it once otherwise. Returns nullopt if the node cannot reach the target.
std::optional<Millis> prepare_target(const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                                     const VivaldiParams& vparams, Network& net, StepResult& res);

// Appends the detector's successful probes to msg.anchors when refitting is on.
void record_anchors(const NodeState& node, const Detection& det, QueryMessage& msg, const ProtocolParams& params);

// Neighbors asked to probe the target on first contact: one per ring in
// ring order, cycling until `cap` are chosen.
std::vector<const RingEntry*> bootstrap_neighbors(const NodeState& node, std::size_t cap);

StepResult hybridnn_step(const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                         const VivaldiParams& vparams, Network& net,
                         ProbeSelection selection = ProbeSelection::kShortlist);

StepResult directdnns_step(const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                           const VivaldiParams& vparams, Network& net);

StepResult coordnn_step(const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                        const VivaldiParams& vparams, Network& net);

// `params.beta` is the Meridian reduction threshold.
StepResult meridian_step(const NodeState& node, QueryMessage& msg, const ProtocolParams& params, Network& net);

StepResult kdnns_step(const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                      const VivaldiParams& vparams, Network& net);

StepResult kdfns_step(const NodeState& node, QueryMessage& msg, const ProtocolParams& params,
                      const VivaldiParams& vparams, Network& net);

struct SearchOutcome {
  NodeId result = kNoNode;
  Millis result_delay = kMissing;  // measured by the protocol
  std::vector<OmegaEntry> omega;   // KNN/KFN results in discovery order
  std::vector<NodeId> visited;     // every node that handled the message
  NodeId terminal = kNoNode;
  std::size_t hops = 0;            // forwards
  std::size_t backtracks = 0;
  std::size_t probes = 0;
  std::size_t bootstrap_probes = 0;
  bool budget_exhausted = false;
  bool short_result = false;
  bool no_result = false;
};

// Called after every step with the handling node, the message as it leaves
// the node, and the step result.
using StepObserver = std::function<void(NodeId, const QueryMessage&, const StepResult&)>;

// Drives a query from the entry node until termination.
SearchOutcome run_search(Algorithm algo, NodeId entry, QueryMessage msg, const ProtocolParams& params,
                         const VivaldiParams& vparams, Network& net, const StepObserver& observer = {});

// Server whose coordinate is nearest to the target coordinate; ties by id.
NodeId vivaldi_centralized(std::span<const Coordinate> coords, std::span<const NodeId> servers,
                           const Coordinate& target_coord);

}  // namespace dnns
