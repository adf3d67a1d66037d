#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace igs;

TEST(ExhaustiveD, FullTreeCounts) {
  Dataset d = parse_dataset(igs::testing::kDatasetD);
  InductionResult r = exhaustive_search(d);
  EXPECT_EQ(r.completed_pfsa, 39'541'447u);
  EXPECT_EQ(r.nodes_created, 44'199'227u);
  EXPECT_EQ(r.nodes_created - r.completed_pfsa, 4'657'780u);
  EXPECT_NEAR(r.mml.total_nits(), igs::testing::kOptimumMmlD, 1e-9);
}
