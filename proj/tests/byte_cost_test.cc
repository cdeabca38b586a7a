#include <gtest/gtest.h>

#include "dnns/byte_cost.h"

namespace dnns {
namespace {

TEST(Account, EmptyGossipIsHeaderOnly) {
  ByteCostModel m;
  EXPECT_EQ(account({MessageKind::kGossipRequest, 0, 0, 0, 0}, m), m.header);
}

TEST(Account, QueryWithPath) {
  ByteCostModel m;
  EXPECT_EQ(account({MessageKind::kQuery, 3, 0, 1, 0}, m), m.header + 3 * m.per_path_entry + m.per_coordinate);
}

TEST(Account, ProbePair) {
  ByteCostModel m;
  EXPECT_EQ(account({MessageKind::kProbe, 0, 0, 0, 0}, m), 2 * m.per_probe);
}

TEST(Account, GossipSamplesAndResults) {
  ByteCostModel m{10, 1, 2, 3, 4};
  EXPECT_EQ(account({MessageKind::kGossipRequest, 0, 5, 1, 0}, m), 10u + 5 * 3 + 2);
  EXPECT_EQ(account({MessageKind::kResult, 0, 0, 0, 4}, m), 10u + 4 * (1 + 2));
}

TEST(Account, MeridianBandCostsSeveralHybridSteps) {
  ByteCostModel m;
  auto step = [&](std::uint64_t probes) {
    return account({MessageKind::kQuery, 2, 0, 1, 0}, m) + probes * account({MessageKind::kProbe}, m);
  };
  const double ratio = static_cast<double>(step(20)) / static_cast<double>(step(4));
  EXPECT_GT(ratio, 3.0);
  EXPECT_LT(ratio, 6.0);
}

}  // namespace
}  // namespace dnns
