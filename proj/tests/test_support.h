#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "dnns/delay_matrix.h"
#include "dnns/protocol.h"
#include "dnns/rng.h"
#include <cmath>

namespace dnns::testing {

inline DelayMatrix matrix_of(std::vector<std::vector<double>> rows) {
  const std::size_t n = rows.size();
  std::vector<Millis> flat;
  for (auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return DelayMatrix(n, std::move(flat));
}

// Hand-built overlay: probes read straight from a delay table.
class TableNetwork : public Network {
 public:
  explicit TableNetwork(const DelayMatrix& m) : m_(m) {}

  NodeState& add(NodeId id, std::size_t dim = 2, RingParams rp = {}) {
    auto& slot = nodes_[id];
    slot = std::make_unique<NodeState>(id, dim, rp);
    return *slot;
  }
  NodeState& at(NodeId id) { return *nodes_.at(id); }

  std::optional<Millis> probe(NodeId from, NodeId to) override {
    ++probes;
    if (down.count(from) || down.count(to)) return std::nullopt;
    Millis d = m_(from, to);
    if (is_missing(d)) return std::nullopt;
    return d;
  }
  const NodeState* node(NodeId id) const override {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : it->second.get();
  }

  std::size_t probes = 0;
  std::map<NodeId, bool> down;

 private:
  const DelayMatrix& m_;
  std::map<NodeId, std::unique_ptr<NodeState>> nodes_;
};

// Points in the plane with exact coordinates; every node files every other
// node, then rings are trimmed to `capacity`.
struct PlaneOverlay {
  std::vector<std::pair<double, double>> pts;
  DelayMatrix m;
  TableNetwork net{m};

  PlaneOverlay(std::size_t n, std::uint64_t seed, std::size_t capacity = 8, double coord_error = 0.1,
               std::uint32_t nonempty = 6)
      : pts(make_points(n, seed)), m(make_matrix(pts)) {
    RingParams rp;
    rp.capacity = capacity;
    for (NodeId i = 0; i < n; ++i) {
      NodeState& s = net.add(i, 2, rp);
      s.coord = Coordinate({pts[i].first, pts[i].second}, coord_error);
    }
    for (NodeId i = 0; i < n; ++i) {
      NodeState& s = net.at(i);
      for (NodeId j = 0; j < n; ++j) {
        if (i == j || !(m(i, j) > 0)) continue;
        s.ring.observe(j, m(i, j), net.at(j).coord, nonempty, 0);
      }
      s.ring.manage_all();
    }
  }

  static std::vector<std::pair<double, double>> make_points(std::size_t n, std::uint64_t seed) {
    Rng r(seed);
    std::vector<std::pair<double, double>> out(n);
    for (auto& p : out) p = {r.uniform(0, 200), r.uniform(0, 200)};
    return out;
  }
  static DelayMatrix make_matrix(const std::vector<std::pair<double, double>>& pts) {
    const std::size_t n = pts.size();
    std::vector<Millis> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        d[i * n + j] = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
    return DelayMatrix(n, std::move(d));
  }
};

}  // namespace dnns::testing
