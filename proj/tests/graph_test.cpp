#include "antmig/graph.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <queue>
#include <set>
#include <tuple>
#include <vector>

using namespace antmig;

namespace {

// Independent breadth-first-search connectivity oracle.
bool bfs_connected(const SegmentedGraph& g) {
  if (g.node_count() == 0) return true;
  std::vector<bool> seen(g.node_count(), false);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t visited = 1;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (EdgeId eid : g.incident_edges(u)) {
      const Edge& e = g.edge(eid);
      const NodeId w = e.u == u ? e.v : e.u;
      if (!seen[w]) {
        seen[w] = true;
        ++visited;
        frontier.push(w);
      }
    }
  }
  return visited == g.node_count();
}

SegmentedGraph single_edge_graph(double length, std::uint32_t resolution) {
  std::vector<PlanarNode> nodes{{0, {0.0, 0.0}}, {1, {length, 0.0}}};
  std::vector<Edge> edges{{0, 0, 1, length}};
  return SegmentedGraph(std::move(nodes), std::move(edges), resolution);
}

}  // namespace

TEST(GenerateGraph, PaperScaleShape) {
  const auto g = generate_graph(200, 4000, 1000.0, 1000.0, 7);
  EXPECT_EQ(g.node_count(), 200u);
  EXPECT_EQ(g.edge_count(), 4000u);
  EXPECT_TRUE(bfs_connected(g));
}

TEST(GenerateGraph, MinimalTwoNodeGraph) {
  const auto g = generate_graph(2, 1, 100.0, 100.0, 3);
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.edge_count(), 1u);
  const Edge& e = g.edge(0);
  EXPECT_EQ(std::min(e.u, e.v), 0u);
  EXPECT_EQ(std::max(e.u, e.v), 1u);
}

TEST(GenerateGraph, SpanningTreeIsConnected) {
  const auto g = generate_graph(5, 4, 100.0, 100.0, 11);
  EXPECT_EQ(g.edge_count(), 4u);
  EXPECT_TRUE(bfs_connected(g));
}

TEST(GenerateGraph, DeterministicPerSeed) {
  const auto a = generate_graph(30, 80, 500.0, 400.0, 99);
  const auto b = generate_graph(30, 80, 500.0, 400.0, 99);
  ASSERT_EQ(a.node_count(), b.node_count());
  for (NodeId i = 0; i < a.node_count(); ++i) {
    EXPECT_EQ(a.node(i).pos.x, b.node(i).pos.x);
    EXPECT_EQ(a.node(i).pos.y, b.node(i).pos.y);
  }
  ASSERT_EQ(a.edge_count(), b.edge_count());
  for (EdgeId e = 0; e < a.edge_count(); ++e) {
    EXPECT_EQ(a.edge(e).u, b.edge(e).u);
    EXPECT_EQ(a.edge(e).v, b.edge(e).v);
  }
  const auto c = generate_graph(30, 80, 500.0, 400.0, 100);
  bool any_diff = false;
  for (NodeId i = 0; i < a.node_count(); ++i)
    any_diff = any_diff || a.node(i).pos.x != c.node(i).pos.x;
  EXPECT_TRUE(any_diff);
}

TEST(GenerateGraph, NodesInsideBoundsAndDistinct) {
  const auto g = generate_graph(50, 120, 300.0, 200.0, 5);
  std::set<std::pair<double, double>> seen;
  for (const PlanarNode& n : g.nodes()) {
    EXPECT_GE(n.pos.x, 0.0);
    EXPECT_LT(n.pos.x, 300.0);
    EXPECT_GE(n.pos.y, 0.0);
    EXPECT_LT(n.pos.y, 200.0);
    EXPECT_TRUE(seen.insert({n.pos.x, n.pos.y}).second);
  }
}

TEST(GenerateGraph, InfeasibleEdgeCountsRejected) {
  EXPECT_THROW(generate_graph(5, 3, 100, 100, 1), std::invalid_argument);   // < n-1
  EXPECT_THROW(generate_graph(5, 11, 100, 100, 1), std::invalid_argument);  // > n(n-1)/2
  EXPECT_THROW(generate_graph(1, 0, 100, 100, 1), std::invalid_argument);
}

TEST(GenerateGraph, NoDuplicateOrSelfLoopEdges) {
  const auto g = generate_graph(20, 150, 100.0, 100.0, 2);
  std::set<std::pair<NodeId, NodeId>> pairs;
  for (const Edge& e : g.edges()) {
    EXPECT_NE(e.u, e.v);
    EXPECT_GT(e.length, 0.0);
    EXPECT_TRUE(pairs.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second);
  }
}

TEST(SegmentEdges, EqualPartitionOfLength10) {
  auto g = single_edge_graph(10.0, 1);
  segment_edges(g, 5);
  const auto& segs = g.segments(0);
  ASSERT_EQ(segs.size(), 5u);
  const double expect[6] = {0, 2, 4, 6, 8, 10};
  for (int j = 0; j < 5; ++j) {
    EXPECT_DOUBLE_EQ(segs[j].start, expect[j]);
    EXPECT_DOUBLE_EQ(segs[j].end, expect[j + 1]);
  }
}

TEST(SegmentEdges, ResolutionZeroMeansMonolithic) {
  auto g = generate_graph(5, 6, 100.0, 100.0, 4);
  segment_edges(g, 0);
  EXPECT_EQ(g.resolution(), 0u);
  EXPECT_EQ(g.segments_per_edge(), 1u);
  for (const Edge& e : g.edges()) {
    ASSERT_EQ(g.segments(e.id).size(), 1u);
    EXPECT_DOUBLE_EQ(g.segments(e.id)[0].start, 0.0);
    EXPECT_DOUBLE_EQ(g.segments(e.id)[0].end, e.length);
  }
}

TEST(SegmentEdges, PartitionSumOracleLength7Resolution4) {
  auto g = single_edge_graph(7.0, 1);
  segment_edges(g, 4);
  const auto& segs = g.segments(0);
  ASSERT_EQ(segs.size(), 4u);
  EXPECT_DOUBLE_EQ(segs[0].start, 0.0);
  EXPECT_DOUBLE_EQ(segs[1].start, 1.75);
  EXPECT_DOUBLE_EQ(segs[2].start, 3.5);
  EXPECT_DOUBLE_EQ(segs[3].start, 5.25);
  EXPECT_DOUBLE_EQ(segs[3].end, 7.0);
  double sum = 0.0;
  for (const Segment& s : segs) sum += s.length();
  EXPECT_DOUBLE_EQ(sum, 7.0);
}

// Partition property over random graphs: contiguous boundaries shared
// bit-for-bit, union covering [0, length].
TEST(SegmentEdges, PartitionPropertyRandomGraphs) {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    auto g = generate_graph(12, 30, 200.0, 200.0, seed);
    for (std::uint32_t res : {1u, 3u, 7u, 10u}) {
      segment_edges(g, res);
      for (const Edge& e : g.edges()) {
        const auto& segs = g.segments(e.id);
        ASSERT_EQ(segs.size(), res);
        EXPECT_EQ(segs.front().start, 0.0);
        EXPECT_EQ(segs.back().end, e.length);
        for (std::size_t j = 1; j < segs.size(); ++j) {
          EXPECT_EQ(segs[j - 1].end, segs[j].start);  // exact shared boundary
          EXPECT_GT(segs[j].end, segs[j].start);
        }
      }
    }
  }
}

TEST(SegmentEdges, RetileClearsOccupancy) {
  auto g = single_edge_graph(10.0, 5);
  g.set_occupant(0, 2, 17, false);
  EXPECT_TRUE(g.occupied(0, 2));
  segment_edges(g, 5);
  EXPECT_FALSE(g.occupied(0, 2));
}

TEST(ReachableSegments, ZeroRadiusKeepsFirstSegmentOnly) {
  auto g = single_edge_graph(10.0, 5);
  const auto refs = reachable_segments(g, 0, 0.0);
  ASSERT_EQ(refs.size(), 1u);
  EXPECT_EQ(refs[0].edge, 0u);
  EXPECT_EQ(refs[0].ordinal, 0u);
  EXPECT_FALSE(refs[0].reversed);
}

TEST(ReachableSegments, RadiusEnumerationOracle) {
  auto g = single_edge_graph(10.0, 5);
  // Oracle: forward entries at 0,2,4,6,8; those <= 4.5 are 0,2,4.
  const auto refs = reachable_segments(g, 0, 4.5);
  ASSERT_EQ(refs.size(), 3u);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    EXPECT_EQ(refs[i].ordinal, i);
    EXPECT_DOUBLE_EQ(g.entry_distance(refs[i]), 2.0 * static_cast<double>(i));
  }
}

TEST(ReachableSegments, ReversedOrientationFromFarNode) {
  auto g = single_edge_graph(10.0, 5);
  const auto refs = reachable_segments(g, 1, 4.5);
  ASSERT_EQ(refs.size(), 3u);
  // Entries measured from node 1: segments 4, 3, 2 at distances 0, 2, 4.
  EXPECT_EQ(refs[0].ordinal, 4u);
  EXPECT_EQ(refs[1].ordinal, 3u);
  EXPECT_EQ(refs[2].ordinal, 2u);
  for (const auto& r : refs) {
    EXPECT_TRUE(r.reversed);
    EXPECT_LE(g.entry_distance(r), 4.5);
  }
}

TEST(ReachableSegments, DegreeThreePerEdgeEnumeration) {
  // Star: center node 0, three edges of length 10, 5 segments each.
  std::vector<PlanarNode> nodes{
      {0, {0, 0}}, {1, {10, 0}}, {2, {0, 10}}, {3, {-10, 0}}};
  std::vector<Edge> edges{{0, 0, 1, 10}, {1, 0, 2, 10}, {2, 0, 3, 10}};
  SegmentedGraph g(std::move(nodes), std::move(edges), 5);
  const auto refs = reachable_segments(g, 0, 2.0);
  EXPECT_EQ(refs.size(), 6u);  // two per incident edge (entries 0 and 2)
}

TEST(ReachableSegments, ExcludesOccupied) {
  auto g = single_edge_graph(10.0, 5);
  g.set_occupant(0, 0, 1, false);
  const auto refs = reachable_segments(g, 0, 4.5);
  ASSERT_EQ(refs.size(), 2u);
  EXPECT_EQ(refs[0].ordinal, 1u);
  EXPECT_EQ(refs[1].ordinal, 2u);
}

TEST(ReachableSegments, OpposingTrafficClosesTheEdge) {
  auto g = single_edge_graph(10.0, 5);
  // An ant travels the edge toward node 0; entries from node 0 are refused
  // until it clears (a head-on meeting could never resolve).
  g.set_occupant(0, 3, 7, true);
  EXPECT_TRUE(reachable_segments(g, 0, 4.5).empty());
  const auto from_far = reachable_segments(g, 1, 4.5);
  EXPECT_EQ(from_far.size(), 2u);  // same-direction entries stay open
  g.clear_occupant(0, 3);
  EXPECT_EQ(reachable_segments(g, 0, 4.5).size(), 3u);
}

TEST(ReachableSegments, MonotoneInRadius) {
  auto g = generate_graph(10, 20, 100.0, 100.0, 21);
  segment_edges(g, 8);
  const auto key = [](const SegmentRef& r) {
    return std::tuple(r.edge, r.ordinal, r.reversed);
  };
  for (NodeId n = 0; n < g.node_count(); ++n) {
    std::set<std::tuple<EdgeId, std::uint32_t, bool>> prev;
    for (double radius : {0.0, 1.0, 3.0, 8.0, 20.0, 1000.0}) {
      const auto refs = reachable_segments(g, n, radius);
      std::set<std::tuple<EdgeId, std::uint32_t, bool>> cur;
      for (const auto& r : refs) cur.insert(key(r));
      for (const auto& k : prev) EXPECT_TRUE(cur.count(k));
      prev = std::move(cur);
    }
  }
}

TEST(ReachableSegments, UnknownNodeRejected) {
  auto g = single_edge_graph(10.0, 5);
  EXPECT_THROW(reachable_segments(g, 7, 1.0), std::invalid_argument);
}

TEST(GraphJson, RoundTripIsLossless) {
  auto g = generate_graph(15, 40, 321.5, 123.25, 77);
  segment_edges(g, 6);
  const auto j = graph_to_json(g);
  const auto h = graph_from_json(nlohmann::json::parse(j.dump()));
  ASSERT_EQ(h.node_count(), g.node_count());
  for (NodeId i = 0; i < g.node_count(); ++i) {
    EXPECT_EQ(h.node(i).pos.x, g.node(i).pos.x);  // bit-exact round trip
    EXPECT_EQ(h.node(i).pos.y, g.node(i).pos.y);
  }
  ASSERT_EQ(h.edge_count(), g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    EXPECT_EQ(h.edge(e).u, g.edge(e).u);
    EXPECT_EQ(h.edge(e).v, g.edge(e).v);
    EXPECT_EQ(h.edge(e).length, g.edge(e).length);
  }
  EXPECT_EQ(h.resolution(), g.resolution());
}

TEST(GraphJson, MalformedDocumentsRejected) {
  EXPECT_THROW(graph_from_json(nlohmann::json::parse("{}")), std::invalid_argument);
  EXPECT_THROW(graph_from_json(nlohmann::json::parse(
                   R"({"nodes":[{"id":1,"x":0,"y":0}],"edges":[],"resolution":1})")),
               std::invalid_argument);
}

TEST(FarthestPair, MatchesBruteForce) {
  const auto g = generate_graph(25, 60, 400.0, 400.0, 13);
  const auto [a, b] = farthest_node_pair(g);
  double best = 0.0;
  for (NodeId i = 0; i < g.node_count(); ++i)
    for (NodeId j = 0; j < g.node_count(); ++j)
      best = std::max(best, distance(g.node(i).pos, g.node(j).pos));
  EXPECT_DOUBLE_EQ(distance(g.node(a).pos, g.node(b).pos), best);
}

TEST(ShortestPaths, TriangleInequalityAndSource) {
  const auto g = generate_graph(20, 50, 300.0, 300.0, 31);
  const auto dist = shortest_path_distances(g, 0);
  EXPECT_DOUBLE_EQ(dist[0], 0.0);
  for (const Edge& e : g.edges()) {
    EXPECT_LE(dist[e.v], dist[e.u] + e.length + 1e-9);
    EXPECT_LE(dist[e.u], dist[e.v] + e.length + 1e-9);
  }
}
