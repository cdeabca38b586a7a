#include "dnns/inframetric.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dnns/concentric_ring.h"
#include "dnns/rng.h"

namespace dnns {

namespace {

std::uint64_t choose3(std::uint64_t n) {
  if (n < 3) return 0;
  return n * (n - 1) / 2 * (n - 2) / 3;
}

std::vector<NodeId> sample_centers(std::size_t n, double node_fraction, std::uint64_t seed) {
  if (!(node_fraction > 0 && node_fraction <= 1)) throw ContractError("node_fraction must be in (0,1]");
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  auto count = static_cast<std::size_t>(std::ceil(node_fraction * static_cast<double>(n)));
  count = std::clamp<std::size_t>(count, 1, n);
  if (count < n) {
    Rng rng = Rng::stream(seed, "centers");
    rng.shuffle(ids);
    ids.resize(count);
    std::sort(ids.begin(), ids.end());
  }
  return ids;
}

template <typename F>
void for_each_triple(std::size_t n, F&& f) {
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      for (NodeId k = j + 1; k < n; ++k) f(i, j, k);
    }
  }
}

}  // namespace

std::optional<double> rho_of_triple(const DelayMatrix& m, NodeId i, NodeId j, NodeId k) {
  const NodeId t[3] = {i, j, k};
  double best = 0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      const NodeId u = t[a], v = t[b], w = t[3 - a - b];
      const double uv = m(u, v), uw = m(u, w), vw = m(v, w);
      if (is_missing(uv) || is_missing(uw) || is_missing(vw)) return std::nullopt;
      if (uv <= 0 || uw <= 0 || vw <= 0) return std::nullopt;
      best = std::max(best, uv / std::max(uw, vw));
    }
  }
  return best;
}

double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ContractError("percentile of an empty range");
  if (!(p >= 0 && p <= 100)) throw ContractError("percentile must be in [0,100]");
  const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

RhoStats rho_stats(const DelayMatrix& m, std::size_t sample_triples, std::uint64_t seed) {
  if (sample_triples < 1) throw ContractError("sample_triples must be >= 1");
  const std::size_t n = m.size();
  RhoStats st;
  std::vector<double> vals;
  auto take = [&](NodeId i, NodeId j, NodeId k) {
    if (auto r = rho_of_triple(m, i, j, k)) {
      vals.push_back(*r);
    } else {
      ++st.skipped;
    }
  };
  const std::uint64_t total = choose3(n);
  if (total == 0) throw std::runtime_error("matrix has fewer than 3 nodes; no triple to evaluate");
  if (total <= sample_triples) {
    st.exhaustive = true;
    vals.reserve(total);
    for_each_triple(n, take);
  } else {
    Rng rng = Rng::stream(seed, "rho_stats");
    vals.reserve(sample_triples);
    const std::size_t max_attempts = sample_triples * 20;
    for (std::size_t a = 0; a < max_attempts && vals.size() < sample_triples; ++a) {
      auto i = static_cast<NodeId>(rng.below(n));
      auto j = static_cast<NodeId>(rng.below(n));
      auto k = static_cast<NodeId>(rng.below(n));
      if (i == j || j == k || i == k) continue;
      take(i, j, k);
    }
  }
  if (vals.empty()) throw std::runtime_error("matrix too sparse: no complete triple found");
  std::sort(vals.begin(), vals.end());
  st.evaluated = vals.size();
  double sum = 0;
  std::size_t gt2 = 0, gt3 = 0;
  for (double v : vals) {
    sum += v;
    gt2 += v > 2;
    gt3 += v > 3;
  }
  st.mean = sum / static_cast<double>(vals.size());
  st.max = vals.back();
  st.frac_rho_gt2 = static_cast<double>(gt2) / static_cast<double>(vals.size());
  st.frac_rho_gt3 = static_cast<double>(gt3) / static_cast<double>(vals.size());
  for (double p : kRhoPercentiles) st.quantiles[p] = percentile_sorted(vals, p);
  return st;
}

double instance_rho(const DelayMatrix& m, std::size_t exhaustive_budget, std::size_t sampled,
                    std::uint64_t seed) {
  const std::size_t n = m.size();
  double best = 1.0;
  if (choose3(n) <= exhaustive_budget) {
    for_each_triple(n, [&](NodeId i, NodeId j, NodeId k) {
      if (auto r = rho_of_triple(m, i, j, k)) best = std::max(best, *r);
    });
  } else {
    Rng rng = Rng::stream(seed, "instance_rho");
    for (std::size_t a = 0; a < sampled; ++a) {
      auto i = static_cast<NodeId>(rng.below(n));
      auto j = static_cast<NodeId>(rng.below(n));
      auto k = static_cast<NodeId>(rng.below(n));
      if (i == j || j == k || i == k) continue;
      if (auto r = rho_of_triple(m, i, j, k)) best = std::max(best, *r);
    }
  }
  return best + 1e-9;
}

BallQuery ball(const DelayMatrix& m, NodeId p, Millis r) {
  if (r < 0) throw ContractError("ball radius must be >= 0");
  BallQuery q{p, r, {}};
  for (NodeId v = 0; v < m.size(); ++v) {
    const double d = m(p, v);
    if (v == p || (!is_missing(d) && d <= r)) q.members.push_back(v);
  }
  return q;
}

std::size_t ball_volume(const DelayMatrix& m, NodeId p, Millis r) { return ball(m, p, r).members.size(); }

BallIndex::BallIndex(const DelayMatrix& m) : rows_(m.size()) {
  for (NodeId p = 0; p < m.size(); ++p) {
    auto& row = rows_[p];
    row.reserve(m.size());
    for (NodeId v = 0; v < m.size(); ++v) {
      if (v == p) {
        row.push_back(0);
      } else if (m.present(p, v)) {
        row.push_back(m(p, v));
      }
    }
    std::sort(row.begin(), row.end());
  }
}

std::size_t BallIndex::volume(NodeId p, Millis r) const {
  const auto& row = rows_[p];
  return static_cast<std::size_t>(std::upper_bound(row.begin(), row.end(), r) - row.begin());
}

std::size_t BallIndex::volume_below(NodeId p, Millis r) const {
  const auto& row = rows_[p];
  return static_cast<std::size_t>(std::lower_bound(row.begin(), row.end(), r) - row.begin());
}

double growth_at(const DelayMatrix& m, NodeId p, Millis r, double rho) {
  if (!(r > 0)) throw ContractError("growth radius must be > 0");
  if (!(rho > 1)) throw ContractError("growth rho must be > 1");
  return static_cast<double>(ball_volume(m, p, rho * r)) / static_cast<double>(ball_volume(m, p, r));
}

std::vector<GrowthRow> growth_stats(const DelayMatrix& m, double rho, std::span<const Millis> radii,
                                    double node_fraction, std::uint64_t seed) {
  if (!(rho > 1)) throw ContractError("growth rho must be > 1");
  const BallIndex idx(m);
  const auto centers = sample_centers(m.size(), node_fraction, seed);
  std::vector<GrowthRow> out;
  std::vector<double> g(centers.size());
  for (Millis r : radii) {
    if (!(r > 0)) throw ContractError("growth radius must be > 0");
    for (std::size_t c = 0; c < centers.size(); ++c) {
      g[c] = static_cast<double>(idx.volume(centers[c], rho * r)) /
             static_cast<double>(idx.volume(centers[c], r));
    }
    std::sort(g.begin(), g.end());
    out.push_back({r, percentile_sorted(g, 50), percentile_sorted(g, 90), centers.size()});
  }
  return out;
}

double growth_sup(const DelayMatrix& m, double x) {
  if (!(x > 1)) throw ContractError("growth_sup factor must be > 1");
  const BallIndex idx(m);
  double sup = 1.0;
  for (NodeId p = 0; p < idx.size(); ++p) {
    const auto& row = idx.row(p);
    // |B(r)| is constant on [v_j, v_{j+1}); |B(x r)| peaks as r approaches v_{j+1}.
    std::size_t j = 0;
    while (j < row.size()) {
      std::size_t end = j;
      while (end < row.size() && row[end] == row[j]) ++end;
      if (end == row.size()) break;
      const double inner = static_cast<double>(end);
      const double outer = static_cast<double>(idx.volume_below(p, x * row[end]));
      sup = std::max(sup, outer / inner);
      j = end;
    }
  }
  return sup;
}

double alpha_of(const DelayMatrix& m, NodeId p, Millis r, double x) {
  if (!(x > 1)) throw ContractError("alpha_of: x must be > 1");
  if (!(r > 0)) throw ContractError("alpha_of: r must be > 0");
  const double ratio =
      static_cast<double>(ball_volume(m, p, x * r)) / static_cast<double>(ball_volume(m, p, r));
  if (ratio <= 1) return 0;
  return std::log(ratio) / std::log(x);
}

std::vector<AlphaRow> alpha_stats(const DelayMatrix& m, std::span<const Millis> radii,
                                  std::span<const double> xs, double node_fraction, std::uint64_t seed) {
  const BallIndex idx(m);
  const auto centers = sample_centers(m.size(), node_fraction, seed);
  std::vector<AlphaRow> out;
  std::vector<double> a(centers.size());
  for (Millis r : radii) {
    if (!(r > 0)) throw ContractError("alpha radius must be > 0");
    for (double x : xs) {
      if (!(x > 1)) throw ContractError("alpha x must be > 1");
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double ratio = static_cast<double>(idx.volume(centers[c], x * r)) /
                             static_cast<double>(idx.volume(centers[c], r));
        a[c] = ratio <= 1 ? 0 : std::log(ratio) / std::log(x);
      }
      std::sort(a.begin(), a.end());
      out.push_back({r, x, percentile_sorted(a, 50)});
    }
  }
  return out;
}

SandwichResult verify_sandwich(const DelayMatrix& m, double rho, NodeId p, NodeId q, Millis r) {
  const double dpq = p == q ? 0.0 : m(p, q);
  if (is_missing(dpq)) throw ContractError("verify_sandwich: d(p,q) is missing");
  if (dpq > r) throw ContractError("verify_sandwich: d(p,q) > r");
  auto in_ball = [&](NodeId c, NodeId v, double radius) {
    if (c == v) return true;
    const double d = m(c, v);
    return !is_missing(d) && d <= radius;
  };
  for (NodeId v = 0; v < m.size(); ++v) {
    if (in_ball(q, v, r) && !in_ball(p, v, rho * r)) return {false, v, 1};
  }
  for (NodeId v = 0; v < m.size(); ++v) {
    if (in_ball(p, v, rho * r) && !in_ball(q, v, rho * rho * r)) return {false, v, 2};
  }
  return {};
}

std::uint64_t required_samples(double rho, double beta, double alpha) {
  if (!(beta > 0 && beta <= 1)) throw ContractError("required_samples: beta must be in (0,1]");
  if (!(rho > 1)) throw ContractError("required_samples: rho must be > 1");
  if (!(alpha >= 0)) throw ContractError("required_samples: alpha must be >= 0");
  const double v = 3.0 * std::pow(rho * rho / beta, alpha);
  // Absorb pow() rounding so exact integers do not round up.
  return static_cast<std::uint64_t>(std::ceil(v - 1e-9 * std::max(1.0, v)));
}

Millis oracle_delay(const DelayMatrix& m, NodeId server, NodeId target, OracleDirection dir) {
  switch (dir) {
    case OracleDirection::kServerToTarget:
      return m(server, target);
    case OracleDirection::kTargetToServer:
      return m(target, server);
    case OracleDirection::kRttAverage: {
      const double a = m(server, target), b = m(target, server);
      if (is_missing(a)) return b;
      if (is_missing(b)) return a;
      return 0.5 * (a + b);
    }
  }
  return kMissing;
}

std::vector<std::pair<NodeId, Millis>> exact_nearest(const DelayMatrix& m, std::span<const NodeId> servers,
                                                     NodeId target, std::size_t k, OracleDirection dir) {
  if (servers.empty()) throw ContractError("exact_nearest: empty server set");
  if (k < 1) throw ContractError("exact_nearest: k must be >= 1");
  std::vector<std::pair<NodeId, Millis>> out;
  out.reserve(servers.size());
  for (NodeId s : servers) {
    const double d = oracle_delay(m, s, target, dir);
    if (!is_missing(d)) out.emplace_back(s, d);
  }
  if (out.empty()) {
    throw std::runtime_error("exact_nearest: every delay to target " + std::to_string(target) + " is missing");
  }
  auto less = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  };
  if (k < out.size()) {
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end(), less);
    out.resize(k);
  } else {
    std::sort(out.begin(), out.end(), less);
  }
  return out;
}

double delta_ratio(const DelayMatrix& m) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (NodeId i = 0; i < m.size(); ++i) {
    for (NodeId j = 0; j < m.size(); ++j) {
      if (i == j || !m.present(i, j)) continue;
      const double d = m(i, j);
      hi = std::max(hi, d);
      if (d > 0) lo = std::min(lo, d);
    }
  }
  if (!std::isfinite(lo)) throw std::runtime_error("delta_ratio: no positive delay present");
  return hi / lo;
}

double hop_bound(double beta, double delta) {
  if (!(beta > 0 && beta <= 1)) throw ContractError("hop_bound: beta must be in (0,1]");
  if (!(delta >= 1)) throw ContractError("hop_bound: delta must be >= 1");
  if (beta == 1) return std::numeric_limits<double>::infinity();
  return std::log(delta) / std::log(1.0 / beta);
}

RingOccupancy ring_occupancy(const DelayMatrix& m, double alpha_base, double s, std::size_t max_ring) {
  if (!(alpha_base > 0)) throw ContractError("ring_occupancy: alpha_base must be > 0");
  if (!(s > 1)) throw ContractError("ring_occupancy: s must be > 1");
  if (max_ring < 1) throw ContractError("ring_occupancy: max_ring must be >= 1");
  RingOccupancy occ;
  occ.max_ring = max_ring;
  occ.per_node.assign(m.size(), std::vector<double>(max_ring, 0.0));
  std::vector<double> total(max_ring, 0.0);
  double grand = 0;
  for (NodeId i = 0; i < m.size(); ++i) {
    auto& row = occ.per_node[i];
    double count = 0;
    for (NodeId j = 0; j < m.size(); ++j) {
      if (i == j || !m.present(i, j) || !(m(i, j) > 0)) continue;
      row[ring_index(m(i, j), alpha_base, s, max_ring) - 1] += 1;
      count += 1;
    }
    for (std::size_t k = 0; k < max_ring; ++k) {
      total[k] += row[k];
      if (count > 0) row[k] /= count;
    }
    grand += count;
  }
  occ.aggregate = total;
  if (grand > 0) {
    for (double& v : occ.aggregate) v /= grand;
  }
  return occ;
}

}  // namespace dnns
