#include <algorithm>
#include <cmath>

#include "dnns/delay_matrix.h"
#include "dnns/rng.h"

namespace dnns {

SyntheticKind parse_synthetic_kind(std::string_view name) {
  if (name == "euclidean") return SyntheticKind::kEuclidean;
  if (name == "clustered") return SyntheticKind::kClustered;
  if (name == "asymmetric") return SyntheticKind::kAsymmetric;
  throw ParseError("unknown synthetic kind: " + std::string(name));
}

std::string_view to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kEuclidean: return "euclidean";
    case SyntheticKind::kClustered: return "clustered";
    case SyntheticKind::kAsymmetric: return "asymmetric";
  }
  return "?";
}

DelayMatrix gen_synthetic(const SyntheticParams& p) {
  if (p.n < 2) throw ContractError("gen_synthetic: n must be >= 2");
  if (p.noise < 0 || p.asym_factor < 0) throw ContractError("gen_synthetic: noise and asym_factor must be >= 0");
  if (p.dim == 0) throw ContractError("gen_synthetic: dim must be >= 1");
  if (!(p.aspect > 0 && p.aspect <= 1)) throw ContractError("gen_synthetic: aspect must be in (0,1]");
  std::vector<double> side(p.dim);
  for (std::size_t a = 0; a < p.dim; ++a) side[a] = p.box_ms * std::pow(p.aspect, static_cast<double>(a));

  Rng points_rng = Rng::stream(p.seed, "synthetic.points");
  Rng noise_rng = Rng::stream(p.seed, "synthetic.noise");
  Rng asym_rng = Rng::stream(p.seed, "synthetic.asym");

  std::vector<double> pts(p.n * p.dim);
  if (p.kind == SyntheticKind::kClustered) {
    const std::size_t k = std::max<std::size_t>(1, p.clusters);
    // Centers spread over a box twice as wide; blobs are tight relative to
    // the inter-center spacing.
    std::vector<double> centers(k * p.dim);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t a = 0; a < p.dim; ++a) centers[c * p.dim + a] = points_rng.uniform(0.0, 2.0 * side[a]);
    }
    const double sigma = 0.06 * p.box_ms;
    for (std::size_t i = 0; i < p.n; ++i) {
      std::size_t c = points_rng.below(k);
      for (std::size_t a = 0; a < p.dim; ++a) {
        pts[i * p.dim + a] = centers[c * p.dim + a] + sigma * points_rng.normal();
      }
    }
  } else {
    for (std::size_t i = 0; i < p.n; ++i) {
      for (std::size_t a = 0; a < p.dim; ++a) pts[i * p.dim + a] = points_rng.uniform(0.0, side[a]);
    }
  }

  std::vector<Millis> d(p.n * p.n, 0.0);
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = i + 1; j < p.n; ++j) {
      double s = 0;
      for (std::size_t a = 0; a < p.dim; ++a) {
        double diff = pts[i * p.dim + a] - pts[j * p.dim + a];
        s += diff * diff;
      }
      double v = std::sqrt(s);
      if (p.noise > 0) v *= 1.0 + noise_rng.uniform(0.0, p.noise);
      d[i * p.n + j] = v;
      d[j * p.n + i] = v;
    }
  }
  if (p.kind == SyntheticKind::kAsymmetric && p.asym_factor > 0) {
    for (std::size_t i = 0; i < p.n; ++i) {
      for (std::size_t j = 0; j < p.n; ++j) {
        if (i != j) d[i * p.n + j] *= 1.0 + asym_rng.uniform(0.0, p.asym_factor);
      }
    }
  }
  return DelayMatrix(p.n, std::move(d));
}

}  // namespace dnns
