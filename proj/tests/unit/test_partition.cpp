#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "pcl/errors.hpp"
#include "pcl/partition.hpp"

using namespace pcl;

namespace {

Partition make(std::vector<std::vector<int>> one_based) {
  Partition p;
  for (auto& b : one_based) {
    for (int& s : b) --s;
    p.blocks.push_back(b);
  }
  return p;
}

Partition canonical(std::vector<std::vector<int>> blocks) {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end());
  return Partition{blocks};
}

std::set<std::string> rendered(const std::vector<Partition>& ps) {
  std::set<std::string> out;
  for (const auto& p : ps) out.insert(p.to_string());
  return out;
}

}  // namespace

TEST(GroupShape, SlotsAndGroups) {
  const GroupShape s({2, 1, 3});
  EXPECT_EQ(s.total(), 6);
  EXPECT_EQ(s.groups(), 3);
  EXPECT_EQ(s.group_of(0), 0);
  EXPECT_EQ(s.group_of(1), 0);
  EXPECT_EQ(s.group_of(2), 1);
  EXPECT_EQ(s.group_of(5), 2);
  EXPECT_EQ(s.first_slot(2), 3);
}

TEST(GroupShape, Guards) {
  EXPECT_THROW(GroupShape({0, 1}), ValidationError);
  EXPECT_THROW(GroupShape({7, 6}), ValidationError);
  EXPECT_NO_THROW(GroupShape({6, 6}));
}

TEST(Partitions, PairingsCountDoubleFactorial) {
  for (int p = 1; p <= 4; ++p) {
    const GroupShape s(std::vector<int>(static_cast<std::size_t>(2 * p), 1));
    EXPECT_EQ(static_cast<double>(enumerate_partitions(s, PartitionFilter::PiEq2).size()),
              oracle::double_factorial(2 * p - 1))
        << p;
  }
}

TEST(Partitions, ShapeTwoTwo) {
  const auto ps = enumerate_partitions(GroupShape({2, 2}), PartitionFilter::PiGe2);
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(rendered(ps), (std::set<std::string>{"{{1,3},{2,4}}", "{{1,4},{2,3}}"}));
}

TEST(Partitions, SingleGroupOfFour) {
  EXPECT_EQ(enumerate_partitions(GroupShape({4}), PartitionFilter::All).size(), 15u);
  const auto pi = enumerate_partitions(GroupShape({4}), PartitionFilter::Pi);
  ASSERT_EQ(pi.size(), 1u);
  EXPECT_EQ(pi[0].to_string(), "{{1},{2},{3},{4}}");
}

TEST(Partitions, AllMatchesBellNumbersAndOracle) {
  for (int n = 1; n <= 8; ++n) {
    const GroupShape s({n});
    const auto ps = enumerate_partitions(s, PartitionFilter::All);
    EXPECT_EQ(static_cast<long>(ps.size()), oracle::bell_number(n)) << n;
    std::set<Partition, decltype([](const Partition& a, const Partition& b) { return a.blocks < b.blocks; })> mine,
        theirs;
    for (const auto& p : ps) mine.insert(canonical(p.blocks));
    for (const auto& p : oracle::set_partitions(n)) theirs.insert(canonical(p));
    EXPECT_EQ(mine.size(), ps.size());
    EXPECT_TRUE(std::equal(mine.begin(), mine.end(), theirs.begin(), theirs.end(),
                           [](const Partition& a, const Partition& b) { return a.blocks == b.blocks; }))
        << n;
  }
}

TEST(Partitions, TwelveSlotsGuard) {
  EXPECT_EQ(static_cast<long>(enumerate_partitions(GroupShape({12}), PartitionFilter::Pi).size()), 1);
  EXPECT_THROW(GroupShape({13}), ValidationError);
}

// Each filter's output equals the brute-force filter of all partitions, and
// the filters nest.
TEST(Partitions, FiltersNestAndMatchBruteForce) {
  const std::vector<std::vector<int>> shapes{{1, 1}, {2, 2}, {1, 1, 2}, {2, 1, 1}, {3, 3}, {2, 2, 2}, {1, 2, 3},
                                             {1, 1, 1, 1, 1, 1}};
  for (const auto& sizes : shapes) {
    const GroupShape s(sizes);
    const auto all = enumerate_partitions(s, PartitionFilter::All);
    std::vector<std::size_t> counts;
    for (auto f : {PartitionFilter::Pi, PartitionFilter::PiGe2, PartitionFilter::PiEq2}) {
      const auto got = enumerate_partitions(s, f);
      std::size_t expected = 0;
      for (const auto& p : all) expected += satisfies(p, s, f);
      EXPECT_EQ(got.size(), expected);
      for (const auto& p : got) {
        EXPECT_TRUE(satisfies(p, s, f));
        EXPECT_TRUE(satisfies(p, s, PartitionFilter::All));
      }
      counts.push_back(got.size());
    }
    EXPECT_GE(all.size(), counts[0]);
    EXPECT_GE(counts[0], counts[1]);
    EXPECT_GE(counts[1], counts[2]);
    for (const auto& p : enumerate_partitions(s, PartitionFilter::PiEq2))
      EXPECT_TRUE(satisfies(p, s, PartitionFilter::PiGe2) && satisfies(p, s, PartitionFilter::Pi));
  }
}

TEST(Partitions, BlocksOrderedByMinimumAndCovering) {
  for (const auto& p : enumerate_partitions(GroupShape({2, 3, 2}), PartitionFilter::All)) {
    std::vector<int> seen;
    int prev = -1;
    for (const auto& b : p.blocks) {
      EXPECT_GT(b.front(), prev);
      prev = b.front();
      EXPECT_TRUE(std::is_sorted(b.begin(), b.end()));
      seen.insert(seen.end(), b.begin(), b.end());
    }
    std::sort(seen.begin(), seen.end());
    for (int i = 0; i < 7; ++i) ASSERT_EQ(seen[static_cast<std::size_t>(i)], i);
  }
}

TEST(Partitions, SatisfiesRejectsMalformed) {
  const GroupShape s({1, 1, 1, 1});
  EXPECT_FALSE(satisfies(make({{2, 4}, {1, 3}}), s, PartitionFilter::All));  // order
  EXPECT_FALSE(satisfies(make({{1, 2}, {2, 3}}), s, PartitionFilter::All));  // overlap
  EXPECT_FALSE(satisfies(make({{1, 2}, {3}}), s, PartitionFilter::All));     // not covering
  EXPECT_FALSE(satisfies(make({{1, 2}, {3, 4}}), GroupShape({2, 2}), PartitionFilter::Pi));
}

TEST(Regular, Examples) {
  EXPECT_TRUE(is_regular(make({{1, 2}, {3, 4}}), GroupShape({1, 1, 1, 1})));
  EXPECT_TRUE(is_regular(make({{1, 3}, {2, 4}}), GroupShape({2, 2})));
  EXPECT_FALSE(is_regular(make({{1, 3}, {2, 4}}), GroupShape({2, 1, 1})));
}

TEST(Regular, RejectsOutsidePiEq2) {
  EXPECT_THROW(is_regular(make({{1, 2, 3, 4}}), GroupShape({1, 1, 1, 1})), ValidationError);
  EXPECT_THROW(is_regular(make({{1, 2}, {3, 4}}), GroupShape({2, 2})), ValidationError);
}

// Build regular partitions from random group matchings; then move one slot so
// that a block crosses an unmatched group pair.
TEST(Regular, ConstructedRegularAndMutation) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int pairs = 1 + static_cast<int>(rng() % 3);
    std::vector<int> order(static_cast<std::size_t>(2 * pairs));
    for (int i = 0; i < 2 * pairs; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> sizes(static_cast<std::size_t>(2 * pairs));
    int total = 0;
    for (int k = 0; k < pairs; ++k) {
      const int sz = 1 + static_cast<int>(rng() % 2);
      sizes[static_cast<std::size_t>(order[static_cast<std::size_t>(2 * k)])] = sz;
      sizes[static_cast<std::size_t>(order[static_cast<std::size_t>(2 * k + 1)])] = sz;
      total += 2 * sz;
    }
    if (total > kMaxPartitionSlots) continue;
    const GroupShape s(sizes);
    std::vector<std::vector<int>> blocks;
    for (int k = 0; k < pairs; ++k) {
      const int g = order[static_cast<std::size_t>(2 * k)], h = order[static_cast<std::size_t>(2 * k + 1)];
      std::vector<int> hs;
      for (int i = 0; i < sizes[static_cast<std::size_t>(h)]; ++i) hs.push_back(s.first_slot(h) + i);
      std::shuffle(hs.begin(), hs.end(), rng);
      for (int i = 0; i < sizes[static_cast<std::size_t>(g)]; ++i)
        blocks.push_back({s.first_slot(g) + i, hs[static_cast<std::size_t>(i)]});
    }
    const Partition sigma = canonical(blocks);
    ASSERT_TRUE(satisfies(sigma, s, PartitionFilter::PiEq2));
    EXPECT_TRUE(is_regular(sigma, s));

    // With unit groups a partner swap is again a matching; a size-2 group
    // keeps one block on its old partner, so the swap makes it irregular.
    if (pairs < 2) continue;
    auto mutated = blocks;
    std::size_t a = 0;
    while (a < mutated.size() && sizes[static_cast<std::size_t>(s.group_of(mutated[a][0]))] != 2) ++a;
    if (a == mutated.size()) continue;
    std::size_t b = 0;
    for (; b < mutated.size(); ++b)
      if (s.group_of(mutated[b][0]) != s.group_of(mutated[a][0]) &&
          s.group_of(mutated[b][1]) != s.group_of(mutated[a][0]) &&
          s.group_of(mutated[b][0]) != s.group_of(mutated[a][1]))
        break;
    ASSERT_LT(b, mutated.size());
    std::swap(mutated[a][1], mutated[b][1]);
    const Partition bad = canonical(mutated);
    ASSERT_TRUE(satisfies(bad, s, PartitionFilter::PiEq2));
    EXPECT_FALSE(is_regular(bad, s));
  }
}

TEST(Regular, EveryPiEq2OfSymmetricShapeClassified) {
  // Shape (1,1,1,1): all three pairings are regular.
  for (const auto& p : enumerate_partitions(GroupShape({1, 1, 1, 1}), PartitionFilter::PiEq2))
    EXPECT_TRUE(is_regular(p, GroupShape({1, 1, 1, 1})));
  // Shape (2,2,2,2): regular iff the induced group graph is a perfect matching.
  const GroupShape s({2, 2, 2, 2});
  int regular = 0;
  for (const auto& p : enumerate_partitions(s, PartitionFilter::PiEq2)) {
    const auto masks = block_group_masks(p, s);
    std::set<unsigned> distinct(masks.begin(), masks.end());
    const bool matching = distinct.size() == 2;
    EXPECT_EQ(is_regular(p, s), matching);
    regular += matching;
  }
  // 3 group matchings, 2! slot bijections per matched pair.
  EXPECT_EQ(regular, 3 * 2 * 2);
}

TEST(Partition, ToStringIsOneBased) {
  EXPECT_EQ(make({{1, 3}, {2}}).to_string(), "{{1,3},{2}}");
}
