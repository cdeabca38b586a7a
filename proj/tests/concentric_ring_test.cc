#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "dnns/concentric_ring.h"
#include "dnns/rng.h"

namespace dnns {
namespace {

Coordinate pt(double x, double y) { return Coordinate({x, y}, 0.2); }

std::size_t ring_scan(double d, double a, double s, std::size_t imax) {
  for (std::size_t i = 1; i < imax; ++i) {
    if (d <= a * std::pow(s, static_cast<double>(i))) return i;
  }
  return imax;
}

TEST(RingIndex, Examples) {
  EXPECT_EQ(ring_index(3, 1, 2, 20), 2u);
  EXPECT_EQ(ring_index(2, 1, 2, 20), 1u);
  EXPECT_EQ(ring_index(0.5, 1, 2, 20), 1u);
  EXPECT_EQ(ring_index(4, 1, 2, 20), 2u);
  EXPECT_EQ(ring_index(4.0000001, 1, 2, 20), 3u);
  EXPECT_EQ(ring_index(1e9, 1, 2, 20), 20u);
  EXPECT_THROW(ring_index(0, 1, 2, 20), ContractError);
  EXPECT_THROW(ring_index(-1, 1, 2, 20), ContractError);
}

TEST(RingIndex, MatchesIntervalScanAndIsMonotone) {
  Rng r(1);
  std::vector<double> ds;
  for (int i = 0; i < 1000000; ++i) {
    double d = std::exp(r.uniform(-3, 16));
    if (i % 10 == 0) d = std::pow(2.0, static_cast<double>(r.below(22)));  // exact boundaries
    ds.push_back(d);
    ASSERT_EQ(ring_index(d, 1, 2, 20), ring_scan(d, 1, 2, 20)) << d;
  }
  std::sort(ds.begin(), ds.end());
  for (std::size_t i = 1; i < ds.size(); i += 97) {
    ASSERT_LE(ring_index(ds[i - 1], 1, 2, 20), ring_index(ds[i], 1, 2, 20));
  }
  for (int i = 0; i < 10000; ++i) {
    double d = r.uniform(0.01, 5000);
    ASSERT_EQ(ring_index(d, 1.5, 3, 8), ring_scan(d, 1.5, 3, 8));
  }
}

TEST(MedianOf, Basics) {
  EXPECT_DOUBLE_EQ(median_of({3}), 3.0);
  EXPECT_DOUBLE_EQ(median_of({3, 3, 9, 9}), 6.0);
  EXPECT_DOUBLE_EQ(median_of({5, 1, 9}), 5.0);
}

TEST(Observe, NewNeighbor) {
  ConcentricRing ring;
  ring.observe(7, 3, pt(0, 0), 5, 1.0);
  const RingEntry* e = ring.find(7);
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->ring, 2u);
  EXPECT_EQ(e->window, std::deque<Millis>{3});
  EXPECT_DOUBLE_EQ(e->filtered_delay, 3);
  EXPECT_EQ(e->nonempty_rings, 5u);
  EXPECT_EQ(ring.ring_members(2).count(7), 1u);
}

TEST(Observe, MedianCrossesBoundary) {
  ConcentricRing ring;
  for (double s : {3.0, 3.0, 9.0}) ring.observe(1, s, pt(0, 0), 4, 0);
  EXPECT_EQ(ring.find(1)->ring, 2u);
  ring.observe(1, 9, pt(1, 1), 6, 5);
  EXPECT_DOUBLE_EQ(ring.find(1)->filtered_delay, 6.0);
  EXPECT_EQ(ring.find(1)->ring, 3u);
  EXPECT_EQ(ring.ring_size(2), 0u);
  EXPECT_EQ(ring.find(1)->coord, pt(1, 1));
  EXPECT_EQ(ring.find(1)->nonempty_rings, 6u);
  EXPECT_DOUBLE_EQ(ring.find(1)->last_seen, 5.0);
}

TEST(Observe, WindowCappedAtW) {
  ConcentricRing ring;
  for (double s : {100.0, 100.0, 100.0, 1.0, 1.0, 1.0, 1.0}) ring.observe(1, s, pt(0, 0), 4, 0);
  EXPECT_EQ(ring.find(1)->window.size(), 5u);
  EXPECT_DOUBLE_EQ(ring.find(1)->filtered_delay, 1.0);
}

TEST(Observe, NoDuplicates) {
  ConcentricRing ring;
  for (int i = 0; i < 50; ++i) ring.observe(3, 1 + i * 7.0, pt(0, 0), 4, i);
  EXPECT_EQ(ring.size(), 1u);
  EXPECT_EQ(ring.all().size(), 1u);
  EXPECT_NO_THROW(ring.check_invariants());
}

TEST(Observe, IgnoresNonPositiveSample) {
  ConcentricRing ring;
  ring.observe(3, 0, pt(0, 0), 4, 0);
  ring.observe(3, -2, pt(0, 0), 4, 0);
  EXPECT_TRUE(ring.empty());
}

TEST(Manage, EvictsDownToCapacity) {
  ConcentricRing ring;
  for (NodeId i = 0; i < 10; ++i) ring.observe(i, 3, pt(i * 1.0, 0), 4, 0);
  auto ev = ring.manage(2);
  ASSERT_TRUE(ev.has_value());
  EXPECT_EQ(ev->size(), 2u);
  EXPECT_EQ(ring.ring_size(2), 8u);
}

TEST(Manage, BelowThresholdIsNoop) {
  ConcentricRing ring;
  for (NodeId i = 0; i < 9; ++i) ring.observe(i, 3, pt(i * 1.0, 0), 4, 0);
  EXPECT_FALSE(ring.manage(2).has_value());
  EXPECT_EQ(ring.ring_size(2), 9u);
  EXPECT_FALSE(ring.manage(0).has_value());
  EXPECT_FALSE(ring.manage(99).has_value());
}

TEST(Manage, DuplicatesEvicted) {
  ConcentricRing ring;
  // eight well-spread points on a circle plus copies of two of them
  for (NodeId i = 0; i < 8; ++i) {
    double a = 2 * M_PI * i / 8;
    ring.observe(i, 3, pt(100 * std::cos(a), 100 * std::sin(a)), 4, 0);
  }
  ring.observe(20, 3, ring.find(2)->coord, 4, 0);
  ring.observe(21, 3, ring.find(5)->coord, 4, 0);
  auto ev = ring.manage(2);
  ASSERT_TRUE(ev.has_value());
  ASSERT_EQ(ev->size(), 2u);
  // one copy of each duplicated point goes
  std::vector<NodeId> got = *ev;
  std::sort(got.begin(), got.end());
  EXPECT_TRUE(got[0] == 2 || got[0] == 5 || got[0] == 20);
  EXPECT_TRUE(ring.contains(2) != ring.contains(20));
  EXPECT_TRUE(ring.contains(5) != ring.contains(21));
}

// Independent greedy max-min reference over the same coordinates.
std::vector<NodeId> greedy_reference(const std::vector<std::pair<NodeId, Coordinate>>& pts, std::size_t keep) {
  const std::size_t n = pts.size();
  std::size_t a = 0, b = 1;
  double best = -1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = distance(pts[i].second, pts[j].second);
      if (d > best) best = d, a = i, b = j;
    }
  std::vector<bool> kept(n);
  kept[a] = kept[b] = true;
  for (std::size_t c = 2; c < keep; ++c) {
    std::size_t pick = n;
    double pick_d = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (kept[i]) continue;
      double md = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k)
        if (kept[k]) md = std::min(md, distance(pts[i].second, pts[k].second));
      if (md > pick_d) pick_d = md, pick = i;
    }
    kept[pick] = true;
  }
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < n; ++i)
    if (kept[i]) out.push_back(pts[i].first);
  return out;
}

TEST(Manage, MatchesGreedyReference) {
  Rng r(4);
  for (int trial = 0; trial < 200; ++trial) {
    ConcentricRing ring;
    std::vector<std::pair<NodeId, Coordinate>> pts;
    const std::size_t count = 10 + r.below(8);
    for (NodeId i = 0; i < count; ++i) {
      Coordinate c({r.uniform(-50, 50), r.uniform(-50, 50)}, 0.3);
      pts.push_back({i * 3 + 1, c});
      ring.observe(i * 3 + 1, r.uniform(4.01, 8), c, 4, 0);
    }
    ASSERT_EQ(ring.ring_size(3), count);
    ring.manage(3);
    auto want = greedy_reference(pts, 8);
    std::vector<NodeId> have(ring.ring_members(3).begin(), ring.ring_members(3).end());
    ASSERT_EQ(have, want);
  }
}

TEST(NeighborsInRings, RangesAndOrder) {
  ConcentricRing ring;
  ring.observe(9, 30, pt(0, 0), 4, 0);   // ring 5
  ring.observe(4, 3, pt(0, 0), 4, 0);    // ring 2
  ring.observe(2, 3.5, pt(0, 0), 4, 0);  // ring 2
  ring.observe(7, 900, pt(0, 0), 4, 0);  // ring 10
  EXPECT_TRUE(ring.neighbors_in_rings(1, 1).empty());
  const std::size_t hi = ring.ring_of(3 * 10.0);
  EXPECT_EQ(hi, 5u);
  auto got = ring.neighbors_in_rings(1, hi);
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0]->neighbor, 2u);
  EXPECT_EQ(got[1]->neighbor, 4u);
  EXPECT_EQ(got[2]->neighbor, 9u);
  EXPECT_EQ(ring.neighbors_in_rings(1, 500).size(), 4u);
  EXPECT_EQ(ring.nonempty_count(), 3u);
}

TEST(ConcentricRing, RandomOperationsKeepInvariants) {
  RingParams rp;
  ConcentricRing ring(rp);
  Rng r(99);
  for (int step = 0; step < 10000; ++step) {
    const NodeId id = r.below(200);
    switch (r.below(10)) {
      case 0:
        ring.remove(id);
        break;
      case 1: {
        std::size_t i = 1 + r.below(rp.max_rings);
        std::size_t before = ring.ring_size(i);
        auto ev = ring.manage(i);
        if (before < rp.capacity + rp.tolerance) {
          ASSERT_FALSE(ev.has_value());
        } else {
          ASSERT_TRUE(ev.has_value());
          ASSERT_EQ(ring.ring_size(i), rp.capacity);
          ASSERT_EQ(ev->size(), before - rp.capacity);
        }
        break;
      }
      default:
        ring.observe(id, std::exp(r.uniform(-1, 9)), Coordinate({r.uniform(0, 99), r.uniform(0, 99)}, 0.5),
                     static_cast<std::uint32_t>(r.below(10)), step);
    }
    ASSERT_NO_THROW(ring.check_invariants()) << "step " << step;
    if (step % 50 == 0) ring.manage_all();
    for (const RingEntry* e : ring.all()) {
      ASSERT_DOUBLE_EQ(e->filtered_delay, median_of(e->window));
      ASSERT_LE(e->window.size(), rp.window);
    }
  }
}

TEST(ConcentricRing, ManageAllRespectsThreshold) {
  ConcentricRing ring;
  for (NodeId i = 0; i < 12; ++i) ring.observe(i, 3, pt(i, 0), 4, 0);
  for (NodeId i = 100; i < 109; ++i) ring.observe(i, 30, pt(i, 0), 4, 0);
  auto ev = ring.manage_all();
  EXPECT_EQ(ev.size(), 4u);
  EXPECT_EQ(ring.ring_size(2), 8u);
  EXPECT_EQ(ring.ring_size(5), 9u);
}

TEST(RingParamsCheck, Validate) {
  EXPECT_THROW(ConcentricRing(RingParams{.capacity = 0}), ContractError);
  EXPECT_THROW(ConcentricRing(RingParams{.s = 1.0}), ContractError);
}

}  // namespace
}  // namespace dnns
