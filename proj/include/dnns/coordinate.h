#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dnns/types.h"

namespace dnns {

// Network coordinate with its confidence error. e is a dimensionless
// relative error; 1 means fully uncertain.
struct Coordinate {
  std::vector<double> x;
  double e = 1.0;

  Coordinate() = default;
  explicit Coordinate(std::size_t dim) : x(dim, 0.0) {}
  Coordinate(std::vector<double> components, double error) : x(std::move(components)), e(error) {}

  std::size_t dim() const { return x.size(); }
  bool finite() const;

  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

struct VivaldiParams {
  double cc = 0.25;
  double ce = 0.25;
  std::size_t dim = 5;
  // Relative sample error above which the sample weight is halved.
  double tiv_gate = 0.5;
  double e_min = 0.01;
};

void validate(const VivaldiParams& p);

// Euclidean distance. Throws ContractError on dimension mismatch.
double distance(const Coordinate& a, const Coordinate& b);

// One adaptive-timestep update of `self` against a peer sample:
//   w  = e_s / (e_s + e_p), halved when the relative error exceeds tiv_gate
//   e_s <- es * ce * w + e_s * (1 - ce * w), clamped to [e_min, 1]
//   x_s <- x_s + cc * w * (measured - |x_s - x_p|) * u(x_s - x_p)
// Coincident points move along a unit direction derived from the id pair.
// Samples with measured <= 0 are rejected and self is returned unchanged.
Coordinate vivaldi_update(const Coordinate& self, const Coordinate& peer, Millis measured,
                          const VivaldiParams& params, NodeId self_id = 0, NodeId peer_id = 0);

// Deterministic unit vector for the coincident-point case.
std::vector<double> pair_direction(NodeId a, NodeId b, std::size_t dim);

struct TargetProbe {
  Coordinate coord;
  Millis measured = 0;
  NodeId prober = 0;
};

inline constexpr std::size_t kMaxBootstrapProbes = 10;

// Places a target from up to `cap` neighbor probes: starts at the origin with
// e = 1 and applies one update per probe in order. Throws ContractError on an
// empty list or more than `cap` probes.
Coordinate bootstrap_target(std::span<const TargetProbe> probes, const VivaldiParams& params,
                            NodeId target_id = 0, std::size_t cap = kMaxBootstrapProbes);

}  // namespace dnns
