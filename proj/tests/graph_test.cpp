/*
 * Copyright 2026 The lpdisc Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lpdisc/graph.hpp"

#include <sstream>

#include "gtest/gtest.h"

namespace lpdisc {
namespace {

Graph parse(const std::string& text, EdgeListOptions options = {}) {
  std::istringstream in(text);
  return load_edge_list(in, options);
}

void ExpectHandshake(const Graph& g) {
  std::size_t degree_sum = 0;
  for (NodeId x = 0; x < g.node_count(); ++x) degree_sum += g.degree(x);
  EXPECT_EQ(degree_sum, 2 * g.edge_count());
  EXPECT_EQ(non_edges(g).size() + g.edge_count(), g.node_count() * (g.node_count() - 1) / 2);
}

TEST(EdgeList, TwoEdgePath) {
  const auto g = parse("1 2\n2 3");
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.label(0), 1);
  EXPECT_EQ(*g.id_of(3), 2u);
}

TEST(EdgeList, UndirectedDuplicatesCollapse) {
  const auto g = parse("1 2\n2 1");
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(EdgeList, SelfLoopRejectedWithLine) {
  try {
    parse("# header comment\n1 1");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("self-loop"), std::string::npos);
  }
}

TEST(EdgeList, NonIntegerTokenRejected) {
  EXPECT_THROW(parse("1 x"), ParseError);
  EXPECT_THROW(parse("1 2 3"), ParseError);
  EXPECT_THROW(parse("1.5 2"), ParseError);
}

TEST(EdgeList, HeaderDeclaresIsolates) {
  const auto g = parse("N 5\n0 1\n1 2\n");
  EXPECT_EQ(g.node_count(), 5u);
  EXPECT_EQ(g.degree(4), 0u);
  const auto one = parse("N 3\n1 2\n", {.one_based = true});
  EXPECT_EQ(one.node_count(), 3u);
  EXPECT_EQ(one.label(0), 1);
  EXPECT_TRUE(one.has_edge(0, 1));
  EXPECT_THROW(parse("N 3\n0 3\n"), ParseError);
  EXPECT_THROW(parse("N 5\n0 1\n", {.allow_isolates = false}), ParseError);
}

TEST(EdgeList, LargestComponentFilter) {
  const auto g = parse("10 11\n11 12\n20 21\n", {.largest_component = true});
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.label(2), 12);
}

TEST(EdgeList, WriteThenReadIsIdentity) {
  const auto g = generate_er(30, 50, 9);
  std::ostringstream out;
  write_edge_list(out, g);
  const auto back = parse(out.str());
  ASSERT_EQ(back.node_count(), g.node_count());
  EXPECT_TRUE(std::equal(g.edges().begin(), g.edges().end(), back.edges().begin(), back.edges().end()));
}

TEST(Generators, ErEdgeless) {
  const auto g = generate_er(10, 0, 1);
  EXPECT_EQ(g.node_count(), 10u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(Generators, ErComplete) {
  const auto g = generate_er(5, 10, 1);
  EXPECT_EQ(g.edge_count(), 10u);
  EXPECT_TRUE(non_edges(g).empty());
}

TEST(Generators, ErExactCountAndDeterministic) {
  const auto a = generate_er(100, 300, 42);
  const auto b = generate_er(100, 300, 42);
  const auto c = generate_er(100, 300, 43);
  EXPECT_EQ(a.edge_count(), 300u);
  EXPECT_TRUE(std::equal(a.edges().begin(), a.edges().end(), b.edges().begin(), b.edges().end()));
  EXPECT_FALSE(std::equal(a.edges().begin(), a.edges().end(), c.edges().begin(), c.edges().end()));
  ExpectHandshake(a);
}

TEST(Generators, ErRejectsTooManyEdges) { EXPECT_THROW(generate_er(5, 11, 1), ArgumentError); }

TEST(Generators, BaTree) {
  const auto g = generate_ba(5, 1, 3);
  EXPECT_EQ(g.edge_count(), 4u);
  // connected: BFS from 0 reaches all
  EXPECT_EQ(largest_component(g).node_count(), 5u);
}

TEST(Generators, BaEdgeCountFormula) {
  EXPECT_EQ(generate_ba(6, 2, 3).edge_count(), 9u);
  for (std::size_t m = 1; m <= 4; ++m) {
    const std::size_t n = 60;
    const auto g = generate_ba(n, m, 100 + m);
    EXPECT_EQ(g.edge_count(), m * (m + 1) / 2 + (n - m - 1) * m);
    ExpectHandshake(g);
  }
}

TEST(Generators, BaSeedCliqueOnly) {
  const auto g = generate_ba(4, 3, 0);
  EXPECT_EQ(g.edge_count(), 6u);
  EXPECT_TRUE(non_edges(g).empty());
}

TEST(Generators, BaRejectsSmallN) {
  EXPECT_THROW(generate_ba(3, 3, 0), ArgumentError);
  EXPECT_THROW(generate_ba(3, 0, 0), ArgumentError);
}

TEST(NonEdges, CompleteGraphIsEmpty) { EXPECT_TRUE(non_edges(generate_er(5, 10, 7)).empty()); }

TEST(NonEdges, PathHasOneNonEdge) {
  const auto g = parse("1 2\n2 3");
  const auto ne = non_edges(g);
  ASSERT_EQ(ne.size(), 1u);
  EXPECT_EQ(g.label(ne.pairs[0].u), 1);
  EXPECT_EQ(g.label(ne.pairs[0].v), 3);
}

TEST(NonEdges, CountIdentityAndOrdering) {
  const auto g = generate_er(50, 100, 5);
  const auto ne = non_edges(g);
  EXPECT_EQ(ne.size(), 1125u);
  EXPECT_TRUE(std::is_sorted(ne.pairs.begin(), ne.pairs.end()));
  for (const auto& p : ne.pairs) EXPECT_FALSE(g.has_edge(p.u, p.v));
}

TEST(PairIndex, RoundTripsOverAllPairs) {
  const std::size_t n = 13;
  std::size_t expected = 0;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) {
      EXPECT_EQ(pair_index({u, v}, n), expected);
      EXPECT_EQ(pair_from_index(expected, n), (NodePair{u, v}));
      ++expected;
    }
}

}  // namespace
}  // namespace lpdisc
