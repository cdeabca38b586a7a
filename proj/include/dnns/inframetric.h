#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dnns/delay_matrix.h"

namespace dnns {

// Smallest rho such that every ordered pair (u,v) of the triple satisfies
// d(u,v) <= rho * max{d(u,w), d(v,w)}, w being the third node. All six
// directed ratios are evaluated. Returns nullopt when any of the six
// delays is missing or zero (the triple is excluded from statistics).
std::optional<double> rho_of_triple(const DelayMatrix& m, NodeId i, NodeId j, NodeId k);

struct RhoStats {
  std::map<double, double> quantiles;  // percentile -> rho
  double mean = 0;
  double max = 0;
  double frac_rho_gt2 = 0;
  double frac_rho_gt3 = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  bool exhaustive = false;
};

inline constexpr double kRhoPercentiles[] = {5, 25, 50, 75, 90, 95, 99, 100};

// Monte Carlo over distinct triples. Enumerates every triple instead when
// C(n,3) <= sample_triples. Throws std::runtime_error if no complete triple
// can be drawn.
RhoStats rho_stats(const DelayMatrix& m, std::size_t sample_triples, std::uint64_t seed);

// Max triple rho plus 1e-9 slack. Exact when C(n,3) <= exhaustive_budget,
// otherwise the max over `sampled` random triples.
double instance_rho(const DelayMatrix& m, std::size_t exhaustive_budget = 25'000'000,
                    std::size_t sampled = 1'000'000, std::uint64_t seed = 1);

// Linear-interpolated percentile (p in [0,100]) of an ascending-sorted range.
double percentile_sorted(std::span<const double> sorted, double p);

struct BallQuery {
  NodeId center = 0;
  Millis radius = 0;
  std::vector<NodeId> members;  // ascending ids, includes center
};

BallQuery ball(const DelayMatrix& m, NodeId p, Millis r);
std::size_t ball_volume(const DelayMatrix& m, NodeId p, Millis r);

// Per-node ascending delay rows for repeated ball-volume queries.
class BallIndex {
 public:
  explicit BallIndex(const DelayMatrix& m);

  std::size_t volume(NodeId p, Millis r) const;
  // Number of members strictly closer than r.
  std::size_t volume_below(NodeId p, Millis r) const;
  const std::vector<Millis>& row(NodeId p) const { return rows_[p]; }
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<std::vector<Millis>> rows_;  // includes the 0 self-delay
};

double growth_at(const DelayMatrix& m, NodeId p, Millis r, double rho);

struct GrowthRow {
  Millis radius = 0;
  double median = 0;
  double p90 = 0;
  std::size_t nodes = 0;
};

// Median and 90th-percentile |B_p(rho r)| / |B_p(r)| over a seeded sample of
// ceil(node_fraction * n) centers, for each radius.
std::vector<GrowthRow> growth_stats(const DelayMatrix& m, double rho, std::span<const Millis> radii,
                                    double node_fraction, std::uint64_t seed);

// Exact sup over centers p and radii r > 0 of |B_p(x r)| / |B_p(r)|.
double growth_sup(const DelayMatrix& m, double x);

// log_x(|B_p(x r)| / |B_p(r)|). Throws ContractError for x <= 1 or r <= 0.
double alpha_of(const DelayMatrix& m, NodeId p, Millis r, double x);

struct AlphaRow {
  Millis radius = 0;
  double x = 0;
  double median = 0;
};

std::vector<AlphaRow> alpha_stats(const DelayMatrix& m, std::span<const Millis> radii,
                                  std::span<const double> xs, double node_fraction, std::uint64_t seed);

struct SandwichResult {
  bool holds = true;
  NodeId witness = kNoNode;
  // 1: B_q(r) is not inside B_p(rho r); 2: B_p(rho r) is not inside B_q(rho^2 r).
  int failed_inclusion = 0;
};

// Checks B_q(r) ⊆ B_p(rho r) ⊆ B_q(rho^2 r). Throws ContractError when
// d(p,q) > r or is missing.
SandwichResult verify_sandwich(const DelayMatrix& m, double rho, NodeId p, NodeId q, Millis r);

// ceil(3 (rho^2 / beta)^alpha). Throws ContractError for beta outside (0,1],
// rho <= 1 or alpha < 0.
std::uint64_t required_samples(double rho, double beta, double alpha);

enum class OracleDirection { kServerToTarget, kTargetToServer, kRttAverage };

// Delay between a server and the target under the given direction, or
// Missing.
Millis oracle_delay(const DelayMatrix& m, NodeId server, NodeId target,
                    OracleDirection dir = OracleDirection::kServerToTarget);

// Servers sorted by delay to the target, ties by smaller id, missing delays
// excluded, truncated to k. Throws std::runtime_error if every delay is missing.
std::vector<std::pair<NodeId, Millis>> exact_nearest(const DelayMatrix& m, std::span<const NodeId> servers,
                                                     NodeId target, std::size_t k,
                                                     OracleDirection dir = OracleDirection::kServerToTarget);

// Max present delay over min positive present delay.
double delta_ratio(const DelayMatrix& m);

// Hop bound log_{1/beta}(delta); infinite for beta = 1.
double hop_bound(double beta, double delta);

struct RingOccupancy {
  std::size_t max_ring = 0;
  // per_node[i][k] is the fraction of node i's present delays in ring k+1.
  std::vector<std::vector<double>> per_node;
  std::vector<double> aggregate;
};

RingOccupancy ring_occupancy(const DelayMatrix& m, double alpha_base, double s, std::size_t max_ring);

}  // namespace dnns
