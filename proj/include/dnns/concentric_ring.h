#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "dnns/coordinate.h"
#include "dnns/types.h"

namespace dnns {

struct RingParams {
  std::size_t capacity = 8;   // Δ
  std::size_t tolerance = 2;  // Δ_t; management triggers at Δ + Δ_t
  double alpha_base = 1.0;
  double s = 2.0;
  std::size_t max_rings = 20;  // outermost ring is collapsed
  std::size_t window = 5;      // moving-median samples
};

void validate(const RingParams& p);

// Smallest i >= 1 with delay <= alpha_base * s^i, clamped to [1, i_max].
// Ring i covers (alpha_base s^(i-1), alpha_base s^i]. Throws ContractError for
// delay <= 0.
std::size_t ring_index(Millis delay, double alpha_base, double s, std::size_t i_max);

double median_of(std::deque<Millis> window);

struct RingEntry {
  NodeId neighbor = kNoNode;
  std::deque<Millis> window;
  Millis filtered_delay = 0;
  Coordinate coord;
  std::uint32_t nonempty_rings = 0;  // advertised by the neighbor
  double last_seen = 0;
  std::size_t ring = 0;
};

// Per-node neighbor store organized into exponentially spaced delay rings.
// A neighbor appears in at most one ring.
class ConcentricRing {
 public:
  explicit ConcentricRing(RingParams params = {});

  const RingParams& params() const { return params_; }

  // Inserts or refreshes a neighbor and re-files it by its median delay.
  // Non-positive samples are ignored.
  void observe(NodeId neighbor, Millis sample, const Coordinate& coord, std::uint32_t nonempty_rings,
               double now);

  // Reduces an over-full ring to Δ entries by greedy max-min dispersion over
  // cached coordinate distances. Returns the evicted ids, or nullopt when
  // the ring holds fewer than Δ + Δ_t entries.
  std::optional<std::vector<NodeId>> manage(std::size_t ring_i);

  // Runs manage() on every ring at or above the threshold.
  std::vector<NodeId> manage_all();

  // Entries of rings lo..min(hi, i_max), ordered by ring then node id.
  std::vector<const RingEntry*> neighbors_in_rings(std::size_t lo, std::size_t hi) const;

  std::vector<const RingEntry*> all() const { return neighbors_in_rings(1, params_.max_rings); }

  const RingEntry* find(NodeId neighbor) const;
  bool contains(NodeId neighbor) const { return entries_.count(neighbor) != 0; }
  bool remove(NodeId neighbor);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t ring_size(std::size_t ring_i) const;
  std::uint32_t nonempty_count() const;
  // Ascending ids in ring i.
  const std::set<NodeId>& ring_members(std::size_t ring_i) const;

  std::size_t ring_of(Millis delay) const {
    return ring_index(delay, params_.alpha_base, params_.s, params_.max_rings);
  }

  // Throws std::logic_error describing the first broken invariant.
  void check_invariants() const;

 private:
  RingParams params_;
  std::map<NodeId, RingEntry> entries_;
  std::vector<std::set<NodeId>> rings_;  // rings_[i] for i in 1..max_rings
};

}  // namespace dnns
