#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dnns/coordinate.h"
#include "dnns/delay_matrix.h"
#include "dnns/rng.h"

namespace dnns {
namespace {

Coordinate at(std::vector<double> x, double e = 1.0) { return Coordinate(std::move(x), e); }

TEST(Distance, Examples) {
  auto a = at({0, 0, 0, 0, 0});
  auto b = at({3, 4, 0, 0, 0});
  EXPECT_DOUBLE_EQ(distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(distance(a, b), 5.0);
  EXPECT_THROW(distance(a, at({1, 2})), ContractError);
}

TEST(Distance, Symmetric) {
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    Coordinate a(5), b(5);
    for (auto& v : a.x) v = r.uniform(-50, 50);
    for (auto& v : b.x) v = r.uniform(-50, 50);
    ASSERT_EQ(distance(a, b), distance(b, a));
  }
}

TEST(VivaldiUpdate, ExactSampleLeavesPositionAndLowersError) {
  VivaldiParams vp;
  auto self = at({3, 4, 0, 0, 0}, 0.8);
  auto peer = at({0, 0, 0, 0, 0}, 0.5);
  auto out = vivaldi_update(self, peer, 5.0, vp);
  EXPECT_EQ(out.x, self.x);
  EXPECT_LT(out.e, self.e);
}

TEST(VivaldiUpdate, HandEvaluatedStep) {
  VivaldiParams vp;  // cc = ce = 0.25
  auto self = at({1, 0}, 1.0);
  auto peer = at({0, 0}, 1.0);
  // predicted 1, measured 3: w = 0.5, sample error 2/3 > 0.5 halves w to 0.25
  auto out = vivaldi_update(self, peer, 3.0, VivaldiParams{.dim = 2});
  const double w = 0.25;
  EXPECT_NEAR(out.x[0], 1 + 0.25 * w * 2.0, 1e-12);
  EXPECT_NEAR(out.x[1], 0.0, 1e-12);
  const double es = 2.0 / 3.0;
  EXPECT_NEAR(out.e, es * 0.25 * w + 1.0 * (1 - 0.25 * w), 1e-12);
  (void)vp;
}

TEST(VivaldiUpdate, UngatedWeight) {
  auto self = at({2, 0}, 0.5);
  auto peer = at({0, 0}, 0.5);
  // predicted 2, measured 2.5: error 0.2 keeps w = 0.5
  auto out = vivaldi_update(self, peer, 2.5, VivaldiParams{.dim = 2});
  EXPECT_NEAR(out.x[0], 2 + 0.25 * 0.5 * 0.5, 1e-12);
}

TEST(VivaldiUpdate, CoincidentPointsMoveAlongSeededDirection) {
  VivaldiParams vp{.dim = 3};
  Coordinate self(3), peer(3);
  auto out = vivaldi_update(self, peer, 10.0, vp, 4, 9);
  auto u = pair_direction(4, 9, 3);
  double norm = 0;
  for (double c : u) norm += c * c;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  // w = 0.5, relative error 1 gates it to 0.25
  const double step = 0.25 * 0.25 * 10.0;
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(out.x[i], step * u[i], 1e-12);
  EXPECT_EQ(out, vivaldi_update(self, peer, 10.0, vp, 4, 9));
  EXPECT_NEAR(distance(out, self), step, 1e-12);
}

TEST(VivaldiUpdate, RejectsNonPositiveSample) {
  auto self = at({1, 2}, 0.4);
  auto peer = at({3, 3}, 0.4);
  EXPECT_EQ(vivaldi_update(self, peer, 0.0, VivaldiParams{.dim = 2}), self);
  EXPECT_EQ(vivaldi_update(self, peer, -5.0, VivaldiParams{.dim = 2}), self);
}

TEST(VivaldiUpdate, ErrorStaysBoundedAndFinite) {
  VivaldiParams vp;
  Rng r(3);
  Coordinate self(5);
  for (int i = 0; i < 20000; ++i) {
    Coordinate peer(5);
    for (auto& v : peer.x) v = r.uniform(-100, 100);
    peer.e = r.uniform(0.01, 1);
    double measured = r.uniform() < 0.1 ? r.uniform(0.001, 0.01) : r.uniform(0.1, 300);
    self = vivaldi_update(self, peer, measured, vp, 0, i + 1);
    ASSERT_TRUE(self.finite());
    ASSERT_GE(self.e, vp.e_min);
    ASSERT_LE(self.e, 1.0);
  }
}

double median_rel_error(const std::vector<Coordinate>& c, const DelayMatrix& m) {
  std::vector<double> errs;
  for (NodeId i = 0; i < m.size(); ++i)
    for (NodeId j = i + 1; j < m.size(); ++j) errs.push_back(std::abs(distance(c[i], c[j]) - m(i, j)) / m(i, j));
  std::nth_element(errs.begin(), errs.begin() + errs.size() / 2, errs.end());
  return errs[errs.size() / 2];
}

std::vector<Coordinate> embed(const DelayMatrix& m, std::size_t rounds, std::uint64_t seed) {
  VivaldiParams vp;
  std::vector<Coordinate> c(m.size(), Coordinate(vp.dim));
  Rng r(seed);
  for (std::size_t round = 0; round < rounds; ++round) {
    for (NodeId i = 0; i < m.size(); ++i) {
      NodeId j = r.below(m.size() - 1);
      if (j >= i) ++j;
      c[i] = vivaldi_update(c[i], c[j], m(i, j), vp, i, j);
    }
  }
  return c;
}

TEST(VivaldiConvergence, LineMetric) {
  std::vector<Millis> d(100);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) d[i * 10 + j] = 10.0 * std::abs(i - j);
  DelayMatrix m(10, d);
  EXPECT_LT(median_rel_error(embed(m, 500, 1), m), 0.05);
}

TEST(VivaldiConvergence, FiveDimensionalEuclidean) {
  auto m = gen_synthetic({.n = 100, .seed = 2});
  EXPECT_LT(median_rel_error(embed(m, 1000, 2), m), 0.1);
}

TEST(VivaldiConvergence, DeterministicReplay) {
  auto m = gen_synthetic({.n = 30, .seed = 4});
  EXPECT_EQ(embed(m, 50, 7), embed(m, 50, 7));
}

TEST(BootstrapTarget, SingleProbeFromOrigin) {
  VivaldiParams vp;
  std::vector<TargetProbe> probes{{Coordinate(5), 10.0, 3}};
  auto t = bootstrap_target(probes, vp, 8);
  Coordinate origin(5);
  // w = 0.5, relative error 1 halves it: step 0.25 * 0.25 * 10
  EXPECT_NEAR(distance(t, origin), 0.25 * 0.25 * 10, 1e-12);
}

std::vector<TargetProbe> consistent_probes(Rng& r, const Coordinate& truth, std::size_t count) {
  std::vector<TargetProbe> probes;
  for (std::size_t i = 0; i < count; ++i) {
    Coordinate c(5);
    for (auto& v : c.x) v = r.uniform(-60, 60);
    c.e = 0.05;
    probes.push_back({c, distance(c, truth), static_cast<NodeId>(i + 1)});
  }
  return probes;
}

TEST(BootstrapTarget, ConsistentProbesLowerError) {
  VivaldiParams vp;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng r(seed);
    Coordinate truth(5);
    for (auto& v : truth.x) v = r.uniform(-40, 40);
    auto probes = consistent_probes(r, truth, 10);
    auto t10 = bootstrap_target(probes, vp, 0);
    auto t3 = bootstrap_target(std::span(probes).first(3), vp, 0);
    EXPECT_LT(t10.e, 1.0);
    EXPECT_LE(t10.e, t3.e) << "seed " << seed;
  }
}

TEST(BootstrapTarget, Errors) {
  VivaldiParams vp;
  std::vector<TargetProbe> none;
  EXPECT_THROW(bootstrap_target(none, vp), ContractError);
  std::vector<TargetProbe> many(11, TargetProbe{Coordinate(5), 5.0, 1});
  EXPECT_THROW(bootstrap_target(many, vp), ContractError);
}

TEST(VivaldiParamsCheck, Validate) {
  EXPECT_NO_THROW(validate(VivaldiParams{}));
  EXPECT_THROW(validate(VivaldiParams{.cc = 0}), ContractError);
  EXPECT_THROW(validate(VivaldiParams{.ce = 1.5}), ContractError);
  EXPECT_THROW(validate(VivaldiParams{.dim = 0}), ContractError);
}

}  // namespace
}  // namespace dnns
