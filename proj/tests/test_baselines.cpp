#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

using namespace igs;
using igs::testing::kDatasetD;

TEST(PrefixTree, AbAab) {
  Dataset d = parse_dataset("AB/AAB");
  Pfsa m = build_prefix_tree(d);
  const Symbol A = 0, B = 1, delim = d.alphabet().delimiter();
  ASSERT_EQ(m.num_states(), 5u);
  EXPECT_EQ(m.arc(0, A), (Arc{1, 2}));
  EXPECT_EQ(m.arc(1, B), (Arc{2, 1}));
  EXPECT_EQ(m.arc(1, A), (Arc{3, 1}));
  EXPECT_EQ(m.arc(3, B), (Arc{4, 1}));
  EXPECT_EQ(m.arc(2, delim), (Arc{0, 1}));
  EXPECT_EQ(m.arc(4, delim), (Arc{0, 1}));
  EXPECT_EQ(m.arc_count(), 6u);
}

TEST(PrefixTree, SingleSentence) {
  Dataset d = parse_dataset("A");
  Pfsa m = build_prefix_tree(d);
  EXPECT_EQ(m.num_states(), 2u);
  EXPECT_EQ(m.arc_count(), 2u);
  EXPECT_TRUE(accepts_all(m, d));
}

TEST(TailSets, PrefixTreeOfAbAab) {
  Dataset d = parse_dataset("AB/AAB");
  auto tails = tail_sets(build_prefix_tree(d), 3);
  const Symbol A = 0, B = 1, delim = d.alphabet().delimiter();
  EXPECT_EQ(tails[2], (TailSet{{}, {delim}}));
  EXPECT_EQ(tails[4], tails[2]);
  EXPECT_EQ(tails[3], (TailSet{{}, {B}, {B, delim}}));
  EXPECT_EQ(tails[1], (TailSet{{}, {A}, {B}, {A, B}, {B, delim}, {A, B, delim}}));
  for (const auto& t : tail_sets(build_prefix_tree(d), 0)) EXPECT_EQ(t, TailSet{{}});
}

TEST(KTails, AbAabByHand) {
  // Only the two sentence ends share their 3-tails.
  Dataset d = parse_dataset("AB/AAB");
  Pfsa m = k_tails(d, 3);
  EXPECT_EQ(m.num_states(), 4u);
  EXPECT_TRUE(accepts_all(m, d));
  EXPECT_EQ(k_tails(d, 0).num_states(), 1u);
}

TEST(KTails, CountsSummedOnMerge) {
  Dataset d = parse_dataset(kDatasetD);
  for (std::size_t k : {0u, 1u, 2u, 3u, 5u}) {
    Pfsa m = k_tails(d, k);
    EXPECT_EQ(m.total_count(), d.total_transitions()) << k;
    EXPECT_EQ(fit_counts(m, d), m) << k;
  }
}

TEST(KTails, AcceptsTrainingDataAndShrinks) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    Dataset d = igs::testing::random_small_dataset(rng, 8, 3, 6);
    Pfsa tree = build_prefix_tree(d);
    EXPECT_TRUE(accepts_all(tree, d));
    EXPECT_EQ(k_tails(d, 0).num_states(), 1u);
    for (std::size_t k = 0; k <= 4; ++k) {
      Pfsa m = k_tails(d, k);
      EXPECT_TRUE(accepts_all(m, d));
      EXPECT_LE(m.num_states(), tree.num_states());
      EXPECT_NO_THROW(m.validate());
    }
  }
}

TEST(Exhaustive, SmallLeafCounts) {
  InductionResult ab = exhaustive_search(parse_dataset("AB"));
  EXPECT_EQ(ab.completed_pfsa, 5u);
  InductionResult a = exhaustive_search(parse_dataset("A"));
  EXPECT_EQ(a.completed_pfsa, 2u);
  EXPECT_EQ(a.nodes_created, 2u);
  EXPECT_EQ(a.machine.num_states(), 1u);
}

TEST(Exhaustive, BudgetReportsPartialCounts) {
  try {
    exhaustive_search(parse_dataset(kDatasetD), 1000);
    FAIL() << "expected TooLargeError";
  } catch (const TooLargeError& e) {
    EXPECT_EQ(e.nodes(), 1000u);
    EXPECT_GT(e.leaves(), 0u);
    EXPECT_NE(std::string(e.what()).find("too large to enumerate"), std::string::npos);
  }
}

TEST(Exhaustive, AgreesWithProveMode) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 30; ++trial) {
    Dataset d = igs::testing::random_small_dataset(rng, 3, 3, 3);
    InductionResult oracle = exhaustive_search(d, 5'000'000);
    SearchOptions o;
    o.mode = SearchMode::kProve;
    o.compat_test = false;
    InductionResult r = induce(d, o);
    EXPECT_NEAR(r.mml.total_nits(), oracle.mml.total_nits(), 1e-9) << format_dataset(d);
    EXPECT_TRUE(accepts_all(oracle.machine, d));
  }
}
