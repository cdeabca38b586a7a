#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "dnns/byte_cost.h"
#include "dnns/config.h"
#include "dnns/delay_matrix.h"
#include "dnns/maintenance.h"
#include "dnns/metrics.h"
#include "dnns/protocol.h"
#include "dnns/rng.h"

namespace dnns {

enum class Profile { kHybrid, kMeridian };

std::string_view to_string(Profile p);

// Algorithms that run on the overlay maintained under a profile.
std::vector<Algorithm> profile_algorithms(Profile p, const std::vector<Algorithm>& requested);

struct QuerySpec {
  std::uint64_t id = 0;
  double time = 0;
  double target_u = 0;  // uniform draws mapped onto the live sets at arrival
  double entry_u = 0;
};

// Query arrivals after warmup at aggregate rate servers / query_mean.
std::vector<QuerySpec> make_query_specs(const SimConfig& cfg, std::size_t servers, std::uint64_t trial_seed);

// Live server and client sets under a churn schedule.
class Membership {
 public:
  Membership(std::size_t n, std::vector<NodeId> servers);

  // Throws ContractError for a leave of a node that is not a live server,
  // or a join of a live server or an out-of-range id.
  void apply(const ChurnEvent& e);

  const std::vector<NodeId>& servers() const { return servers_; }  // ascending
  const std::vector<NodeId>& clients() const { return clients_; }  // ascending
  bool is_server(NodeId id) const;

  NodeId pick_server(double u) const;
  NodeId pick_client(double u) const;

 private:
  std::vector<NodeId> servers_;
  std::vector<NodeId> clients_;
};

struct ByteTotals {
  std::array<std::uint64_t, 8> by_kind{};
  std::uint64_t maintenance = 0;
  std::uint64_t queries = 0;
  std::uint64_t messages = 0;

  std::uint64_t total() const { return maintenance + queries; }
};

struct AlgorithmRun {
  Algorithm algo = Algorithm::kHybridNN;
  std::vector<QueryRecord> records;
};

struct ProfileStats {
  Profile profile = Profile::kHybrid;
  ByteTotals bytes;
  std::vector<std::uint64_t> node_bytes;  // maintenance bytes sent per node
};

// One trial's overlay under one profile. Also the Network the protocols
// probe through.
class Simulation : public Network {
 public:
  Simulation(const SimConfig& cfg, const DelayMatrix& m, std::vector<NodeId> servers, Profile profile,
             std::uint64_t trial_seed, std::ostream* trace = nullptr);

  // Must be called before the first run_until.
  void schedule_queries(std::vector<QuerySpec> specs, std::vector<Algorithm> algos);
  void schedule_churn(std::vector<ChurnEvent> events);

  // Processes every event with time <= t.
  void run_until(double t);
  double now() const { return now_; }
  double end_time() const;
  void run() { run_until(end_time()); }

  std::optional<Millis> probe(NodeId from, NodeId to) override;
  const NodeState* node(NodeId id) const override;

  const Membership& membership() const { return members_; }
  const SimConfig& config() const { return cfg_; }
  const ProtocolParams& protocol() const { return protocol_; }
  const ByteTotals& bytes() const { return bytes_; }
  const std::vector<std::uint64_t>& node_bytes() const { return node_bytes_; }
  const std::vector<AlgorithmRun>& runs() const { return runs_; }
  std::uint64_t events_processed() const { return events_processed_; }

  // Runs one search now on the current overlay without recording it.
  SearchOutcome search(Algorithm algo, NodeId entry, QueryMessage msg, const StepObserver& observer = {});

 private:
  enum class EventKind : std::uint8_t {
    kGossipTick,
    kRingMgmtTick,
    kOversampleTick,
    kQueryArrival,
    kDelivery,
    kNodeJoin,
    kNodeLeave,
  };
  struct Event {
    double time;
    std::uint64_t seq;
    EventKind kind;
    NodeId subject;
    std::uint64_t payload;
    bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
  };
  struct Delivery {
    NodeId node;
    std::vector<OmegaEntry> results;
  };

  void push(double time, EventKind kind, NodeId subject, std::uint64_t payload = 0);
  void start_node(NodeId id, double t);
  void gossip(NodeId id);
  void oversample(NodeId id);
  void query(const QuerySpec& spec);
  void churn(const ChurnEvent& e);
  std::uint64_t send(NodeId src, NodeId dst, const MessageShape& shape, bool maintenance);
  StepObserver accounting_observer(NodeId origin, bool maintenance, Millis& wall, std::uint64_t& bytes);

  const SimConfig& cfg_;
  const DelayMatrix& m_;
  Profile profile_;
  std::uint64_t seed_;
  std::ostream* trace_;
  ProtocolParams protocol_;
  RingParams ring_params_;
  bool oversample_;

  Membership members_;
  std::vector<std::unique_ptr<NodeState>> nodes_;
  std::vector<Rng> gossip_rng_, mgmt_rng_, oversample_rng_;
  Rng join_rng_;
  Rng jitter_rng_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  double now_ = 0;
  std::uint64_t events_processed_ = 0;

  std::vector<QuerySpec> queries_;
  std::vector<Algorithm> query_algos_;
  std::vector<ChurnEvent> churn_;
  std::vector<Delivery> deliveries_;
  std::vector<AlgorithmRun> runs_;

  ByteTotals bytes_;
  std::vector<std::uint64_t> node_bytes_;
};

// Coordinates of every node after `rounds` of updates, each node measuring
// one uniformly drawn server per round.
std::vector<Coordinate> centralized_coordinates(const DelayMatrix& m, const std::vector<NodeId>& servers,
                                                const SimConfig& cfg, std::uint64_t trial_seed);

struct TrialReport {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<NodeId> servers;
  std::vector<ChurnEvent> churn;
  std::vector<AlgorithmRun> runs;  // config order
  std::vector<ProfileStats> profiles;
};

struct RunReport {
  std::vector<TrialReport> trials;
};

struct RunOptions {
  std::ostream* trace = nullptr;
  std::size_t jobs = 1;
};

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);
std::vector<NodeId> trial_servers(std::size_t n, std::size_t servers, std::uint64_t trial_seed);
std::vector<ChurnEvent> trial_churn(const SimConfig& cfg, const std::vector<NodeId>& servers, std::size_t n,
                                    std::uint64_t trial_seed);

TrialReport run_trial(const SimConfig& cfg, const DelayMatrix& m, std::size_t trial,
                      std::ostream* trace = nullptr);

// Throws ContractError when the matrix cannot host the configured servers.
RunReport run(const SimConfig& cfg, const DelayMatrix& m, const RunOptions& opts = {});

}  // namespace dnns
