#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "dnns/inframetric.h"
#include "dnns/protocol.h"
#include "test_support.h"

namespace dnns {
namespace {

using testing::PlaneOverlay;
using testing::TableNetwork;

const VivaldiParams kV2{.dim = 2};

Coordinate c2(double x, double y, double e = 0.1) { return Coordinate({x, y}, e); }

// T=0 at 0, origin A=1, B=2 at 100, P2=3 at 50, P1=4 at 10, P3=5 at 30 on a line.
struct Walkthrough {
  DelayMatrix m = PlaneOverlay::make_matrix({{0, 0}, {400, 0}, {100, 0}, {50, 0}, {10, 0}, {30, 0}});
  TableNetwork net{m};

  Walkthrough() {
    const double x[] = {0, 400, 100, 50, 10, 30};
    for (NodeId i = 2; i <= 5; ++i) net.add(i, 2).coord = c2(x[i], 0);
    auto link = [&](NodeId a, NodeId b) { net.at(a).ring.observe(b, m(a, b), net.at(b).coord, 4, 0); };
    link(2, 3);
    link(3, 4);
    link(3, 5);
    link(3, 2);
    link(4, 3);
    link(5, 3);
    link(5, 4);
  }
};

TEST(Kdnns, WalkthroughBacktracksToPredecessor) {
  Walkthrough w;
  ProtocolParams p;
  std::vector<std::pair<NodeId, StepAction>> steps;
  auto obs = [&](NodeId cur, const QueryMessage&, const StepResult& r) { steps.push_back({cur, r.action}); };
  auto out = run_search(Algorithm::kHybridNN, 2, make_query(0, 1, SearchMode::kKNN, 2, p), p, kV2, w.net, obs);
  std::vector<std::pair<NodeId, StepAction>> want{{2, StepAction::kForward},
                                                  {3, StepAction::kForward},
                                                  {4, StepAction::kBacktrack},
                                                  {3, StepAction::kForward},
                                                  {5, StepAction::kTerminate}};
  EXPECT_EQ(steps, want);
  ASSERT_EQ(out.omega.size(), 2u);
  EXPECT_EQ(out.omega[0].id, 4u);
  EXPECT_EQ(out.omega[1].id, 5u);
  EXPECT_DOUBLE_EQ(out.omega[1].delay, 30.0);
  EXPECT_FALSE(out.short_result);
  EXPECT_EQ(out.backtracks, 1u);
}

TEST(Kdnns, FirstHopTerminationIsShort) {
  Walkthrough w;
  ProtocolParams p;
  // P1 alone: nothing closer, no predecessor to return to
  auto out = run_search(Algorithm::kHybridNN, 4, make_query(0, 1, SearchMode::kKNN, 3, p), p, kV2, w.net);
  EXPECT_TRUE(out.short_result);
  EXPECT_EQ(out.omega.size(), 1u);
}

TEST(Kdnns, FirstHopResumesAtItself) {
  Walkthrough w;
  w.net.at(4).ring.observe(5, 20, w.net.at(5).coord, 4, 0);
  ProtocolParams p;
  std::vector<StepAction> actions;
  auto obs = [&](NodeId, const QueryMessage&, const StepResult& r) { actions.push_back(r.action); };
  auto out = run_search(Algorithm::kHybridNN, 4, make_query(0, 1, SearchMode::kKNN, 2, p), p, kV2, w.net, obs);
  EXPECT_FALSE(out.short_result);
  ASSERT_EQ(out.omega.size(), 2u);
  EXPECT_EQ(out.omega[0].id, 4u);
  EXPECT_EQ(out.omega[1].id, 5u);
  EXPECT_EQ(actions, std::vector<StepAction>{StepAction::kTerminate});
}

TEST(Kdnns, NoResumeKeepsPartialResult) {
  Walkthrough w;
  w.net.at(4).ring.observe(5, 20, w.net.at(5).coord, 4, 0);
  ProtocolParams p;
  auto msg = make_query(0, 1, SearchMode::kKNN, 2, p);
  msg.resume_at_entry = false;
  auto out = run_search(Algorithm::kHybridNN, 4, msg, p, kV2, w.net);
  EXPECT_TRUE(out.short_result);
  ASSERT_EQ(out.omega.size(), 1u);
  EXPECT_EQ(out.omega[0].id, 4u);
}

TEST(Kdnns, KOneMatchesSingleNearest) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    PlaneOverlay o(70, seed, 8, 0.3);
    ProtocolParams p;
    Rng r(seed);
    for (int q = 0; q < 25; ++q) {
      NodeId entry = r.below(70), target = r.below(70);
      if (entry == target) continue;
      auto nn = run_search(Algorithm::kHybridNN, entry, make_query(target, target, SearchMode::kNN, 1, p), p, kV2,
                           o.net);
      auto kn = run_search(Algorithm::kHybridNN, entry, make_query(target, target, SearchMode::kKNN, 1, p), p, kV2,
                           o.net);
      ASSERT_EQ(nn.result, kn.result);
      ASSERT_EQ(nn.visited, kn.visited);
    }
  }
}

TEST(Kdnns, LoopFreeAndDistinctResults) {
  double ratio_sum = 0;
  std::size_t runs = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    PlaneOverlay o(10, seed, 8, 0.2, 4);
    ProtocolParams p;
    p.tau = 1;
    Rng r(seed);
    NodeId entry = r.below(10), target = r.below(10);
    if (entry == target) continue;
    std::set<NodeId> forwarded{entry};
    std::size_t last_omega = 0;
    bool ok = true;
    auto obs = [&](NodeId, const QueryMessage& msg, const StepResult& s) {
      if (msg.omega.size() < last_omega || msg.omega.size() > msg.k) ok = false;
      last_omega = msg.omega.size();
      if (s.action == StepAction::kForward && !forwarded.insert(s.next).second) ok = false;
    };
    auto out = run_search(Algorithm::kHybridNN, entry, make_query(target, target, SearchMode::kKNN, 3, p), p, kV2,
                          o.net, obs);
    ASSERT_TRUE(ok) << "seed " << seed;
    std::set<NodeId> ids;
    for (auto& e : out.omega) {
      ids.insert(e.id);
      ASSERT_NE(e.id, target);
      ASSERT_DOUBLE_EQ(e.delay, o.m(e.id, target));
    }
    ASSERT_EQ(ids.size(), out.omega.size());
    if (out.omega.size() < 3) continue;
    std::vector<NodeId> servers;
    for (NodeId i = 0; i < 10; ++i)
      if (i != target) servers.push_back(i);
    auto best = exact_nearest(o.m, servers, target, 3);
    double got = 0, want = 0;
    for (int i = 0; i < 3; ++i) got += out.omega[i].delay, want += best[i].second;
    ratio_sum += got / want;
    ++runs;
  }
  ASSERT_GT(runs, 50u);
  EXPECT_LT(ratio_sum / runs, 1.5);
}

TEST(Kdfns, ThresholdRadius) {
  DelayMatrix m(1, {0});
  TableNetwork net(m);
  NodeState& n = net.add(0, 2);
  n.ring.observe(1, 65.5, c2(0, 0), 4, 0);
  n.ring.observe(2, 66.5, c2(0, 0), 4, 0);
  n.ring.observe(3, 200, c2(0, 0), 1, 0);
  ProtocolParams p;
  auto msg = make_query(9, 8, SearchMode::kKFN, 1, p);
  auto c = choose_farthest_candidates(n, msg, 10, p);
  std::vector<NodeId> ids;
  for (auto* e : c) ids.push_back(e->neighbor);
  EXPECT_EQ(ids, (std::vector<NodeId>{2, 3}));
}

TEST(Kdfns, NothingBeyondThresholdEndsLeg) {
  auto m = PlaneOverlay::make_matrix({{0, 0}, {10, 0}, {30, 0}});
  TableNetwork net(m);
  NodeState& n = net.add(1, 2);
  n.coord = c2(10, 0);
  n.ring.observe(2, 20, c2(30, 0), 4, 0);
  ProtocolParams p;
  auto msg = make_query(0, 0, SearchMode::kKFN, 1, p);
  auto r = kdfns_step(n, msg, p, kV2, net);
  EXPECT_EQ(r.action, StepAction::kTerminate);
  ASSERT_EQ(msg.omega.size(), 1u);
  EXPECT_EQ(msg.omega[0].id, 1u);
}

TEST(Kdfns, LineFarthestNearTop) {
  std::size_t good = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng r(seed);
    std::vector<std::pair<double, double>> pts(20);
    for (auto& q : pts) q = {r.uniform(0, 1000), 0};
    DelayMatrix m = PlaneOverlay::make_matrix(pts);
    TableNetwork net(m);
    RingParams rp;
    rp.capacity = 32;
    for (NodeId i = 0; i < 20; ++i) net.add(i, 2, rp).coord = c2(pts[i].first, 0);
    for (NodeId i = 0; i < 20; ++i)
      for (NodeId j = 0; j < 20; ++j)
        if (i != j && m(i, j) > 0) net.at(i).ring.observe(j, m(i, j), net.at(j).coord, 4, 0);
    NodeId target = r.below(20), entry = r.below(20);
    if (entry == target) continue;
    ProtocolParams p;
    p.beta_farthest = 0.01;
    p.rho = 1.01;
    auto out = run_search(Algorithm::kHybridNN, entry, make_query(target, target, SearchMode::kKFN, 1, p), p, kV2,
                          net);
    ASSERT_EQ(out.omega.size(), 1u);
    std::vector<double> d;
    for (NodeId i = 0; i < 20; ++i)
      if (i != target) d.push_back(m(i, target));
    std::sort(d.rbegin(), d.rend());
    ASSERT_GE(out.omega[0].delay, m(entry, target)) << "seed " << seed;
    good += out.omega[0].delay >= d[3];
    ++total;
  }
  EXPECT_GE(static_cast<double>(good) / total, 0.75);
}

}  // namespace
}  // namespace dnns
