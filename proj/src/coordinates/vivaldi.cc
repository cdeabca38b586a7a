#include <algorithm>
#include <cmath>
#include <string>

#include "dnns/coordinate.h"
#include "dnns/rng.h"

namespace dnns {

bool Coordinate::finite() const {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return std::isfinite(e);
}

void validate(const VivaldiParams& p) {
  if (!(p.cc > 0 && p.cc <= 1)) throw ContractError("vivaldi cc must be in (0,1]");
  if (!(p.ce > 0 && p.ce <= 1)) throw ContractError("vivaldi ce must be in (0,1]");
  if (p.dim < 1) throw ContractError("coordinate dimension must be >= 1");
  if (!(p.e_min > 0 && p.e_min <= 1)) throw ContractError("vivaldi e_min must be in (0,1]");
  if (!(p.tiv_gate > 0)) throw ContractError("vivaldi tiv_gate must be > 0");
}

double distance(const Coordinate& a, const Coordinate& b) {
  if (a.dim() != b.dim()) {
    throw ContractError("coordinate dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                        std::to_string(b.dim()));
  }
  double s = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double d = a.x[i] - b.x[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<double> pair_direction(NodeId a, NodeId b, std::size_t dim) {
  Rng rng(splitmix64((static_cast<std::uint64_t>(a) << 32) ^ b ^ 0xD1B54A32D192ED03ULL));
  std::vector<double> u(dim);
  double norm = 0;
  while (norm < 1e-12) {
    norm = 0;
    for (double& c : u) {
      c = rng.normal();
      norm += c * c;
    }
    norm = std::sqrt(norm);
  }
  for (double& c : u) c /= norm;
  return u;
}

Coordinate vivaldi_update(const Coordinate& self, const Coordinate& peer, Millis measured,
                          const VivaldiParams& params, NodeId self_id, NodeId peer_id) {
  if (!(measured > 0) || !std::isfinite(measured) || !peer.finite()) return self;

  const double predicted = distance(self, peer);
  double w = self.e / (self.e + peer.e);
  const double sample_error = std::abs(predicted - measured) / measured;
  if (sample_error > params.tiv_gate) w *= 0.5;

  Coordinate out = self;
  out.e = sample_error * params.ce * w + self.e * (1.0 - params.ce * w);
  out.e = std::clamp(out.e, params.e_min, 1.0);

  const double step = params.cc * w * (measured - predicted);
  if (predicted > 0) {
    for (std::size_t i = 0; i < out.dim(); ++i) {
      out.x[i] += step * (self.x[i] - peer.x[i]) / predicted;
    }
  } else {
    auto u = pair_direction(self_id, peer_id, out.dim());
    for (std::size_t i = 0; i < out.dim(); ++i) out.x[i] += step * u[i];
  }
  return out;
}

Coordinate bootstrap_target(std::span<const TargetProbe> probes, const VivaldiParams& params,
                            NodeId target_id, std::size_t cap) {
  if (probes.empty()) throw ContractError("bootstrap_target: no probes");
  if (probes.size() > cap) {
    throw ContractError("bootstrap_target: " + std::to_string(probes.size()) + " probes exceed cap " +
                        std::to_string(cap));
  }
  Coordinate target(params.dim);
  target.e = 1.0;
  for (const auto& p : probes) {
    target = vivaldi_update(target, p.coord, p.measured, params, target_id, p.prober);
  }
  return target;
}

}  // namespace dnns
