#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "rtsched/graph.hpp"
#include "rtsched/rng.hpp"

using namespace rtsched;

namespace {

// Independent oracle: filter all 2^K subsets by (independent and maximal).
std::vector<LinkMask> brute_force_mis(const InterferenceGraph& g) {
  std::vector<LinkMask> out;
  const int K = g.num_links();
  for (LinkMask mask = 0; mask < (LinkMask{1} << K); ++mask) {
    if (!is_feasible_mask(g, mask)) continue;
    bool maximal = true;
    for (int v = 0; v < K && maximal; ++v) {
      if (mask & (LinkMask{1} << v)) continue;
      if (is_feasible_mask(g, mask | (LinkMask{1} << v))) maximal = false;
    }
    if (maximal && mask != 0) out.push_back(mask);
  }
  return out;
}

bool same_family(const MaximalScheduleFamily& family, std::vector<LinkMask> expected) {
  std::vector<LinkMask> got(family.masks());
  std::sort(got.begin(), got.end());
  std::sort(expected.begin(), expected.end());
  return got == expected;
}

InterferenceGraph random_graph(int num_links, double edge_prob, RandomStream& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < num_links; ++a)
    for (int b = a + 1; b < num_links; ++b)
      if (rng.bernoulli(edge_prob)) edges.emplace_back(a, b);
  return InterferenceGraph(num_links, std::move(edges));
}

// The five-link sparse graph used by the built-in scenarios, 0-indexed from
// the 1-indexed edge list (1,2),(2,3),(2,4),(4,5).
InterferenceGraph g1_graph() {
  return make_explicit(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}});
}

}  // namespace

TEST_CASE("topology constructors") {
  const auto col2 = make_collocated(2);
  CHECK(col2.edges() == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(col2.is_complete());

  const auto star5 = make_star(5);
  CHECK(star5.edges() ==
        std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto star_family = enumerate_mis(star5);
  REQUIRE(star_family.size() == 2);
  CHECK(star_family.members(0) == std::vector<int>{0});
  CHECK(star_family.members(1) == std::vector<int>{1, 2, 3, 4});

  const auto bipartite = make_complete_partite({4, 4});
  CHECK(bipartite.num_links() == 8);
  const auto bip_family = enumerate_mis(bipartite);
  REQUIRE(bip_family.size() == 2);
  CHECK(bip_family.members(0) == std::vector<int>{0, 1, 2, 3});
  CHECK(bip_family.members(1) == std::vector<int>{4, 5, 6, 7});

  CHECK_THROWS_AS(make_collocated(0), std::invalid_argument);
  CHECK_THROWS_AS(make_complete_partite({3, 0}), std::invalid_argument);
  CHECK_THROWS_AS(make_explicit(2, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_explicit(2, {{0, 5}}), std::invalid_argument);
}

TEST_CASE("maximal independent sets of the named graphs") {
  const auto clique = enumerate_mis(make_collocated(3));
  REQUIRE(clique.size() == 3);
  CHECK(clique.members(0) == std::vector<int>{0});
  CHECK(clique.members(1) == std::vector<int>{1});
  CHECK(clique.members(2) == std::vector<int>{2});

  const auto path = enumerate_mis(make_explicit(3, {{0, 1}, {1, 2}}));
  REQUIRE(path.size() == 2);
  CHECK(path.members(0) == std::vector<int>{0, 2});
  CHECK(path.members(1) == std::vector<int>{1});

  // 1-indexed {{2,5},{1,3,4},{1,3,5}}.
  const auto g1 = enumerate_mis(g1_graph());
  REQUIRE(g1.size() == 3);
  CHECK(g1.members(0) == std::vector<int>{0, 2, 3});
  CHECK(g1.members(1) == std::vector<int>{0, 2, 4});
  CHECK(g1.members(2) == std::vector<int>{1, 4});

  // Empty edge set: the single maximal set is everything.
  const auto edgeless = enumerate_mis(make_explicit(4, {}));
  REQUIRE(edgeless.size() == 1);
  CHECK(edgeless.members(0) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("enumeration matches brute force on random graphs") {
  RandomStream rng(2024, "graphs");
  for (int trial = 0; trial < 60; ++trial) {
    const int K = 2 + static_cast<int>(rng.next_below(9));
    const double density = 0.15 + 0.7 * rng.next_double();
    const auto g = random_graph(K, density, rng);
    const auto family = enumerate_mis(g);
    CHECK(same_family(family, brute_force_mis(g)));
    for (std::size_t i = 0; i < family.size(); ++i) {
      CHECK(is_feasible_schedule(g, family.members(i)));
      CHECK(family.mask(i) != 0);
    }
  }
}

TEST_CASE("enumeration is deterministic and canonically ordered") {
  const auto g = g1_graph();
  const auto a = enumerate_mis(g);
  const auto b = enumerate_mis(g);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.members(i) == b.members(i));
  for (std::size_t i = 1; i < a.size(); ++i)
    CHECK(std::lexicographical_compare(a.members(i - 1).begin(), a.members(i - 1).end(),
                                       a.members(i).begin(), a.members(i).end()));
}

TEST_CASE("schedule feasibility") {
  const auto col3 = make_collocated(3);
  const std::vector<int> both{0, 1};
  CHECK_FALSE(is_feasible_schedule(col3, both));
  const auto path = make_explicit(3, {{0, 1}, {1, 2}});
  const std::vector<int> ends{0, 2};
  CHECK(is_feasible_schedule(path, ends));
  const std::vector<int> g1_set{0, 2, 3};
  CHECK(is_feasible_schedule(g1_graph(), g1_set));
  const std::vector<int> bogus{0, 9};
  CHECK_THROWS_AS(is_feasible_schedule(col3, bogus), std::invalid_argument);
}
