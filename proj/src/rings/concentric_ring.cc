#include "dnns/concentric_ring.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dnns {

void validate(const RingParams& p) {
  if (p.capacity < 1) throw ContractError("ring capacity must be >= 1");
  if (!(p.alpha_base > 0)) throw ContractError("ring alpha_base must be > 0");
  if (!(p.s > 1)) throw ContractError("ring growth factor s must be > 1");
  if (p.max_rings < 1) throw ContractError("ring count must be >= 1");
  if (p.window < 1) throw ContractError("median window must be >= 1");
}

std::size_t ring_index(Millis delay, double alpha_base, double s, std::size_t i_max) {
  if (!(delay > 0)) throw ContractError("ring_index: delay must be > 0");
  if (delay <= alpha_base * s) return 1;
  double guess = std::ceil(std::log(delay / alpha_base) / std::log(s));
  if (!(guess < static_cast<double>(i_max))) return i_max;
  auto i = static_cast<std::size_t>(std::max(1.0, guess));
  // Correct floating-point error in the log estimate against the exact bounds.
  while (i > 1 && delay <= alpha_base * std::pow(s, static_cast<double>(i - 1))) --i;
  while (i < i_max && delay > alpha_base * std::pow(s, static_cast<double>(i))) ++i;
  return i;
}

double median_of(std::deque<Millis> window) {
  if (window.empty()) return 0;
  std::sort(window.begin(), window.end());
  const std::size_t n = window.size();
  if (n % 2 == 1) return window[n / 2];
  return 0.5 * (window[n / 2 - 1] + window[n / 2]);
}

ConcentricRing::ConcentricRing(RingParams params) : params_(params) {
  validate(params_);
  rings_.resize(params_.max_rings + 1);
}

void ConcentricRing::observe(NodeId neighbor, Millis sample, const Coordinate& coord,
                             std::uint32_t nonempty_rings, double now) {
  if (!(sample > 0) || !std::isfinite(sample)) return;
  auto [it, inserted] = entries_.try_emplace(neighbor);
  RingEntry& e = it->second;
  if (inserted) e.neighbor = neighbor;
  e.window.push_back(sample);
  while (e.window.size() > params_.window) e.window.pop_front();
  e.filtered_delay = median_of(e.window);
  e.coord = coord;
  e.nonempty_rings = nonempty_rings;
  e.last_seen = now;
  const std::size_t ring = ring_of(e.filtered_delay);
  if (!inserted && ring == e.ring) return;
  if (!inserted) rings_[e.ring].erase(neighbor);
  e.ring = ring;
  rings_[ring].insert(neighbor);
}

std::optional<std::vector<NodeId>> ConcentricRing::manage(std::size_t ring_i) {
  if (ring_i < 1 || ring_i > params_.max_rings) return std::nullopt;
  const auto& members_set = rings_[ring_i];
  if (members_set.size() < params_.capacity + params_.tolerance) return std::nullopt;

  std::vector<NodeId> members(members_set.begin(), members_set.end());
  const std::size_t n = members.size();
  std::vector<const Coordinate*> coords(n);
  for (std::size_t i = 0; i < n; ++i) coords[i] = &entries_.at(members[i]).coord;

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i * n + j] = dist[j * n + i] = distance(*coords[i], *coords[j]);
    }
  }

  std::vector<bool> kept(n, false);
  std::size_t a = 0, b = 1;
  double best = -1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist[i * n + j] > best) {
        best = dist[i * n + j];
        a = i;
        b = j;
      }
    }
  }
  kept[a] = true;
  std::size_t kept_count = 1;
  if (params_.capacity >= 2) {
    kept[b] = true;
    kept_count = 2;
  }

  // min distance from each candidate to the kept set
  std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (kept[k]) min_d[i] = std::min(min_d[i], dist[i * n + k]);
    }
  }
  while (kept_count < params_.capacity) {
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (kept[i]) continue;
      if (pick == n || min_d[i] > min_d[pick]) pick = i;
    }
    kept[pick] = true;
    ++kept_count;
    for (std::size_t i = 0; i < n; ++i) min_d[i] = std::min(min_d[i], dist[i * n + pick]);
  }

  std::vector<NodeId> evicted;
  for (std::size_t i = 0; i < n; ++i) {
    if (!kept[i]) evicted.push_back(members[i]);
  }
  for (NodeId id : evicted) remove(id);
  return evicted;
}

std::vector<NodeId> ConcentricRing::manage_all() {
  std::vector<NodeId> evicted;
  for (std::size_t i = 1; i <= params_.max_rings; ++i) {
    if (auto ev = manage(i)) evicted.insert(evicted.end(), ev->begin(), ev->end());
  }
  return evicted;
}

std::vector<const RingEntry*> ConcentricRing::neighbors_in_rings(std::size_t lo, std::size_t hi) const {
  std::vector<const RingEntry*> out;
  lo = std::max<std::size_t>(lo, 1);
  hi = std::min(hi, params_.max_rings);
  for (std::size_t i = lo; i <= hi; ++i) {
    for (NodeId id : rings_[i]) out.push_back(&entries_.at(id));
  }
  return out;
}

const RingEntry* ConcentricRing::find(NodeId neighbor) const {
  auto it = entries_.find(neighbor);
  return it == entries_.end() ? nullptr : &it->second;
}

bool ConcentricRing::remove(NodeId neighbor) {
  auto it = entries_.find(neighbor);
  if (it == entries_.end()) return false;
  rings_[it->second.ring].erase(neighbor);
  entries_.erase(it);
  return true;
}

std::size_t ConcentricRing::ring_size(std::size_t ring_i) const {
  if (ring_i < 1 || ring_i > params_.max_rings) return 0;
  return rings_[ring_i].size();
}

std::uint32_t ConcentricRing::nonempty_count() const {
  std::uint32_t c = 0;
  for (std::size_t i = 1; i <= params_.max_rings; ++i) c += !rings_[i].empty();
  return c;
}

const std::set<NodeId>& ConcentricRing::ring_members(std::size_t ring_i) const {
  static const std::set<NodeId> kEmpty;
  if (ring_i < 1 || ring_i > params_.max_rings) return kEmpty;
  return rings_[ring_i];
}

void ConcentricRing::check_invariants() const {
  std::size_t total = 0;
  for (std::size_t i = 1; i <= params_.max_rings; ++i) {
    for (NodeId id : rings_[i]) {
      auto it = entries_.find(id);
      if (it == entries_.end()) throw std::logic_error("ring member without entry: " + std::to_string(id));
      const RingEntry& e = it->second;
      if (e.ring != i) throw std::logic_error("entry filed in wrong ring: " + std::to_string(id));
      if (!(e.filtered_delay > 0)) throw std::logic_error("non-positive filtered delay");
      if (e.window.empty() || e.window.size() > params_.window) throw std::logic_error("bad window length");
      if (e.filtered_delay != median_of(e.window)) throw std::logic_error("filtered delay is not the median");
      if (ring_of(e.filtered_delay) != i) throw std::logic_error("delay outside ring interval");
      ++total;
    }
  }
  if (total != entries_.size()) throw std::logic_error("neighbor filed in more than one ring or none");
}

}  // namespace dnns
