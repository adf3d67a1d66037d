#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <functional>
#include <random>

#include "fixtures.hpp"

using namespace igs;
using igs::testing::kDatasetD;

namespace {

// Every complete node below `node`, no pruning.
void collect_leaves(const SearchNode& node, const Dataset& d, std::vector<SearchNode>& out) {
  if (node.complete()) {
    out.push_back(node);
    return;
  }
  for (const SearchNode& child : expand_node(node, select_dangling_arc(node), d))
    collect_leaves(child, d, out);
}

// Cursor order inside a dangling arc carries no meaning.
std::map<ArcKey, std::vector<std::pair<std::uint32_t, std::uint32_t>>> cursor_sets(const SearchNode& n) {
  std::map<ArcKey, std::vector<std::pair<std::uint32_t, std::uint32_t>>> out;
  for (const auto& [key, cursors] : n.dangling) {
    auto& v = out[key];
    for (const Cursor& c : cursors) v.emplace_back(c.sentence, c.position);
    std::sort(v.begin(), v.end());
  }
  return out;
}

std::uint64_t fixed_total(const SearchNode& n) {
  std::uint64_t t = 0;
  for (const Arc& a : n.fixed) t += a.count;
  return t;
}

}  // namespace

TEST(BuildRoot, DatasetD) {
  Dataset d = parse_dataset(kDatasetD);
  SearchNode root = build_root(d);
  const Symbol B = 1, C = 2;
  EXPECT_EQ(root.num_states, 1u);
  ASSERT_EQ(root.dangling.size(), 2u);
  EXPECT_EQ(root.dangling.at(ArcKey{0, C}).size(), 4u);
  EXPECT_EQ(root.dangling.at(ArcKey{0, B}).size(), 3u);
  EXPECT_EQ(root.fixed_arc_count(), 0u);
  EXPECT_EQ(root.consumed, 0u);
  EXPECT_EQ(root.fraction_encoded, 0.0);
  double expected = std::log(2.0) + std::log(4.0) + std::log(6.0) + std::log(40320.0) - std::log(24.0) - std::log(6.0);
  EXPECT_NEAR(root.partial_mml, expected, 1e-9);
  EXPECT_NEAR(root.partial_mml, igs::testing::kRootPartialD, 1e-9);
}

TEST(BuildRoot, SingleToken) {
  SearchNode root = build_root(parse_dataset("A"));
  ASSERT_EQ(root.dangling.size(), 1u);
  EXPECT_EQ(root.dangling.begin()->first, (ArcKey{0, 0}));
  EXPECT_EQ(root.dangling.begin()->second.size(), 1u);
}

TEST(SelectArc, MostTransitionsAndTies) {
  Dataset d = parse_dataset(kDatasetD);
  EXPECT_EQ(select_dangling_arc(build_root(d)), (ArcKey{0, 2}));
  EXPECT_EQ(select_dangling_arc(build_root(d), ArcOrder::kFifo), (ArcKey{0, 1}));

  SearchNode tie;
  tie.width = 2;
  tie.num_states = 2;
  tie.fixed.assign(4, Arc{});
  tie.dangling[ArcKey{1, 0}] = {Cursor{0, 0}, Cursor{1, 0}};
  tie.dangling[ArcKey{0, 0}] = {Cursor{2, 0}, Cursor{3, 0}};
  EXPECT_EQ(select_dangling_arc(tie), (ArcKey{0, 0}));

  SearchNode done = tie;
  done.dangling.clear();
  EXPECT_THROW(select_dangling_arc(done), DomainError);
}

TEST(Expand, RootOfDHasTwoChildren) {
  Dataset d = parse_dataset(kDatasetD);
  SearchNode root = build_root(d);
  auto kids = expand_node(root, ArcKey{0, 2}, d);
  ASSERT_EQ(kids.size(), 2u);
  EXPECT_EQ(kids[0].fixed_arc(0, 2).dest, 0u);
  EXPECT_EQ(kids[0].num_states, 1u);
  EXPECT_EQ(kids[1].fixed_arc(0, 2).dest, 1u);
  EXPECT_EQ(kids[1].num_states, 2u);
  for (const auto& k : kids) EXPECT_EQ(k.fixed_arc(0, 2).count, 4u);
}

TEST(Expand, AbHasFiveLeaves) {
  Dataset d = parse_dataset("AB");
  std::vector<SearchNode> leaves;
  collect_leaves(build_root(d), d, leaves);
  EXPECT_EQ(leaves.size(), 5u);
  for (const auto& leaf : leaves) {
    Pfsa m = extract_pfsa(leaf, d.alphabet());
    EXPECT_TRUE(accepts_all(m, d));
    EXPECT_NEAR(leaf.partial_mml, score(m, d).total_nits(), 1e-9);
  }
}

TEST(Expand, ASingleHasTwoLeaves) {
  Dataset d = parse_dataset("A");
  std::vector<SearchNode> leaves;
  collect_leaves(build_root(d), d, leaves);
  ASSERT_EQ(leaves.size(), 2u);
  EXPECT_EQ(leaves[0].num_states, 1u);
  EXPECT_EQ(leaves[1].num_states, 2u);
}

TEST(Expand, PropagationThroughLoop) {
  // After A -> 0 the cursor of "AAB" runs the A loop twice in one step.
  Dataset d = parse_dataset("AAB/B");
  SearchNode root = build_root(d);
  const Symbol A = 0, B = 1;
  SearchNode child = fix_arc(root, d, ArcKey{0, A}, 0);
  EXPECT_EQ(child.fixed_arc(0, A).count, 2u);
  ASSERT_EQ(child.dangling.size(), 1u);
  EXPECT_EQ(child.dangling.at(ArcKey{0, B}).size(), 2u);
  EXPECT_EQ(child.consumed, 2u);

  SearchNode done = fix_arc(child, d, ArcKey{0, B}, 0);
  EXPECT_TRUE(done.complete());
  EXPECT_EQ(done.fixed_arc(0, d.alphabet().delimiter()).count, 2u);
  EXPECT_EQ(fixed_total(done), d.total_transitions());
}

TEST(Expand, PruningAndCompat) {
  Dataset d = parse_dataset(kDatasetD);
  SearchNode root = build_root(d);
  ExpansionStats st;
  auto none = expand_node(root, ArcKey{0, 2}, d, {}, root.partial_mml, default_criterion(), &st);
  EXPECT_TRUE(none.empty());
  EXPECT_EQ(st.examined, 2u);
  EXPECT_EQ(st.pruned, 2u);

  // State 0 sends C and B out; the cursors on (0,C) continue with A or B, so
  // pooling them with state 0 costs more than keeping them apart.
  ExpansionStats cs;
  auto kids = expand_node(root, ArcKey{0, 2}, d, ExpandOptions{true}, std::nullopt, default_criterion(), &cs);
  EXPECT_EQ(cs.compat_rejected, 1u);
  ASSERT_EQ(kids.size(), 1u);
  EXPECT_EQ(kids[0].num_states, 2u);
}

TEST(Expand, Errors) {
  Dataset d = parse_dataset("AB");
  SearchNode root = build_root(d);
  EXPECT_THROW(expand_node(root, ArcKey{0, 1}, d), DomainError);
  EXPECT_THROW(fix_arc(root, d, ArcKey{0, 0}, 5), DomainError);
  EXPECT_THROW(extract_pfsa(root, d.alphabet()), DomainError);
}

TEST(Replay, MatchesIncrementalConstruction) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    Dataset d = igs::testing::random_small_dataset(rng, 4, 3, 5);
    SearchNode node = build_root(d);
    std::vector<Decision> path;
    while (!node.complete()) {
      ArcKey arc = select_dangling_arc(node);
      StateId dest = static_cast<StateId>(uniform_index(rng, node.num_states + 1));
      path.push_back({arc, dest});
      node = fix_arc(node, d, arc, dest);
      rescore(node, d, default_criterion());
      SearchNode again = replay(d, path);
      EXPECT_EQ(again.fixed, node.fixed);
      EXPECT_EQ(cursor_sets(again), cursor_sets(node));
      EXPECT_NEAR(again.partial_mml, node.partial_mml, 1e-12);
    }
  }
}

TEST(Properties, ExpansionMonotoneAndFamilies) {
  std::mt19937_64 rng(32);
  std::size_t edges = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Dataset d = igs::testing::random_small_dataset(rng, 4, 3, 4);
    std::function<void(const SearchNode&, int)> walk = [&](const SearchNode& n, int depth) {
      if (n.complete()) {
        Pfsa m = extract_pfsa(n, d.alphabet());
        EXPECT_NEAR(n.partial_mml, score(m, d).total_nits(), 1e-9);
        EXPECT_EQ(fixed_total(n), d.total_transitions());
        return;
      }
      auto kids = expand_node(n, select_dangling_arc(n), d);
      for (const SearchNode& k : kids) {
        ++edges;
        EXPECT_GE(k.partial_mml, n.partial_mml - 1e-9);
        EXPECT_GE(k.num_states, n.num_states);
        EXPECT_GE(k.fixed_arc_count(), n.fixed_arc_count());
        for (StateId s = 0; s < n.num_states; ++s)
          for (Symbol y = 0; y < n.width; ++y)
            if (n.fixed_arc(s, y).present()) {
              EXPECT_EQ(k.fixed_arc(s, y).dest, n.fixed_arc(s, y).dest);
              EXPECT_GE(k.fixed_arc(s, y).count, n.fixed_arc(s, y).count);
            }
        for (const auto& [key, cursors] : k.dangling) EXPECT_FALSE(cursors.empty());
      }
      // Follow a few branches only so deep trees stay cheap.
      for (const SearchNode& k : kids)
        if (depth < 3 || uniform_index(rng, 3) == 0) walk(k, depth + 1);
    };
    walk(build_root(d), 0);
  }
  EXPECT_GE(edges, 1000u);
}
