#pragma once

// Planar pathway graphs whose edges are tiled by ordered segments.
//
// Nodes carry 2-D positions (mm) so that radii, reach queries and the radial
// target profile have geometric meaning. Edges are undirected, straight, and
// tiled into equal-length segments; each segment can host at most one ant.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "antmig/rng.hpp"

namespace antmig {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct PlanarNode {
  NodeId id = 0;
  Vec2 pos;
};

struct Edge {
  EdgeId id = 0;
  NodeId u = 0;
  NodeId v = 0;
  double length = 0.0;  // Euclidean distance between endpoint positions
};

// One tile of an edge: [start, end] in mm along the edge, measured from the
// u endpoint. Occupancy (and the occupant's travel direction) is the only
// mutable state.
struct Segment {
  double start = 0.0;
  double end = 0.0;
  std::optional<std::uint32_t> occupant;
  bool occupant_reversed = false;

  double length() const { return end - start; }
};

// Reference to a segment oriented for traversal. `reversed == false` means
// the ant travels from the u endpoint toward v (entry at `start`);
// `reversed == true` the other way (entry at `end`).
struct SegmentRef {
  EdgeId edge = 0;
  std::uint32_t ordinal = 0;
  bool reversed = false;

  friend bool operator==(const SegmentRef&, const SegmentRef&) = default;
};

class SegmentedGraph {
 public:
  SegmentedGraph() = default;

  SegmentedGraph(std::vector<PlanarNode> nodes, std::vector<Edge> edges,
                 std::uint32_t resolution)
      : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    incident_.assign(nodes_.size(), {});
    for (const Edge& e : edges_) {
      if (e.u >= nodes_.size() || e.v >= nodes_.size())
        throw std::invalid_argument("edge references unknown node");
      if (e.u == e.v) throw std::invalid_argument("self-loop edge");
      incident_[e.u].push_back(e.id);
      incident_[e.v].push_back(e.id);
    }
    retile(resolution);
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::uint32_t resolution() const { return resolution_; }
  std::uint32_t segments_per_edge() const { return std::max(resolution_, 1u); }
  std::size_t total_segments() const { return edges_.size() * segments_per_edge(); }

  const std::vector<PlanarNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  const PlanarNode& node(NodeId n) const {
    if (n >= nodes_.size()) throw std::invalid_argument("unknown node id");
    return nodes_[n];
  }
  const Edge& edge(EdgeId e) const {
    if (e >= edges_.size()) throw std::invalid_argument("unknown edge id");
    return edges_[e];
  }
  const std::vector<EdgeId>& incident_edges(NodeId n) const {
    if (n >= incident_.size()) throw std::invalid_argument("unknown node id");
    return incident_[n];
  }

  const std::vector<Segment>& segments(EdgeId e) const {
    return segments_[check_edge(e)];
  }

  // Flat index of segment (e, j) into [0, total_segments()).
  std::size_t segment_index(EdgeId e, std::uint32_t j) const {
    return static_cast<std::size_t>(check_edge(e)) * segments_per_edge() + j;
  }

  const Segment& segment(const SegmentRef& ref) const {
    return segment_at(ref.edge, ref.ordinal);
  }
  const Segment& segment_at(EdgeId e, std::uint32_t j) const {
    const auto& segs = segments(e);
    if (j >= segs.size()) throw std::invalid_argument("unknown segment ordinal");
    return segs[j];
  }

  bool occupied(EdgeId e, std::uint32_t j) const {
    return segment_at(e, j).occupant.has_value();
  }
  void set_occupant(EdgeId e, std::uint32_t j, std::uint32_t ant, bool reversed) {
    Segment& s = segments_[check_edge(e)][j];
    if (s.occupant && *s.occupant != ant)
      throw std::logic_error("segment already occupied");
    s.occupant = ant;
    s.occupant_reversed = reversed;
  }
  void clear_occupant(EdgeId e, std::uint32_t j) {
    segments_[check_edge(e)][j].occupant.reset();
  }
  void clear_all_occupants() {
    for (auto& per_edge : segments_)
      for (Segment& s : per_edge) s.occupant.reset();
  }

  // True when some ant currently traverses the edge against `reversed`.
  // Entries are refused in that case; otherwise two ants meeting head-on
  // mid-edge would block each other permanently (no U-turns, no overtaking).
  bool edge_has_opposing(EdgeId e, bool reversed) const {
    for (const Segment& s : segments_[check_edge(e)])
      if (s.occupant && s.occupant_reversed != reversed) return true;
    return false;
  }

  // Coordinate (mm from the u endpoint) of the entry point of an oriented
  // segment.
  double entry_coord(const SegmentRef& ref) const {
    const Segment& s = segment(ref);
    return ref.reversed ? s.end : s.start;
  }

  // Along-edge distance from the node the oriented segment leads away from
  // to its entry point.
  double entry_distance(const SegmentRef& ref) const {
    const Segment& s = segment(ref);
    return ref.reversed ? edge(ref.edge).length - s.end : s.start;
  }

  // Node the oriented segment leads toward.
  NodeId head_node(EdgeId e, bool reversed) const {
    const Edge& ed = edge(e);
    return reversed ? ed.u : ed.v;
  }
  NodeId tail_node(EdgeId e, bool reversed) const {
    const Edge& ed = edge(e);
    return reversed ? ed.v : ed.u;
  }

  // Plane position of the point at coordinate x (mm from u) along edge e.
  Vec2 point_at(EdgeId e, double x) const {
    const Edge& ed = edge(e);
    const Vec2 a = nodes_[ed.u].pos;
    const Vec2 b = nodes_[ed.v].pos;
    const double f = ed.length > 0 ? x / ed.length : 0.0;
    return {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f};
  }

  // Re-tile every edge into max(resolution, 1) equal segments and drop all
  // occupancy. Resolution 0 is the classical monolithic-edge case.
  void retile(std::uint32_t resolution) {
    resolution_ = resolution;
    const std::uint32_t n = std::max(resolution, 1u);
    segments_.assign(edges_.size(), {});
    for (const Edge& e : edges_) {
      auto& segs = segments_[e.id];
      segs.resize(n);
      for (std::uint32_t j = 0; j < n; ++j) {
        // Boundaries as exact fractions of the length so consecutive
        // segments share the same coordinate bit-for-bit.
        segs[j].start = e.length * static_cast<double>(j) / n;
        segs[j].end = e.length * static_cast<double>(j + 1) / n;
      }
      segs[n - 1].end = e.length;
    }
  }

 private:
  EdgeId check_edge(EdgeId e) const {
    if (e >= edges_.size()) throw std::invalid_argument("unknown edge id");
    return e;
  }

  std::vector<PlanarNode> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Segment>> segments_;
  std::vector<std::vector<EdgeId>> incident_;
  std::uint32_t resolution_ = 1;
};

// Connected random pathway graph: nodes uniform in the plane rectangle, a
// Euclidean minimum spanning tree for connectivity, then the shortest
// remaining pairs until edge_count is reached. Deterministic per seed.
inline SegmentedGraph generate_graph(std::uint32_t node_count,
                                     std::uint32_t edge_count,
                                     double plane_width, double plane_height,
                                     std::uint64_t seed) {
  if (node_count < 2)
    throw std::invalid_argument("generate_graph: node_count must be >= 2");
  if (plane_width <= 0 || plane_height <= 0)
    throw std::invalid_argument("generate_graph: plane bounds must be positive");
  const std::uint64_t max_edges =
      static_cast<std::uint64_t>(node_count) * (node_count - 1) / 2;
  if (edge_count < node_count - 1 || edge_count > max_edges)
    throw std::invalid_argument(
        "generate_graph: edge_count must lie in [node_count-1, "
        "node_count*(node_count-1)/2]");

  Rng rng = make_stream(seed, "graph");
  std::vector<PlanarNode> nodes(node_count);
  for (NodeId i = 0; i < node_count; ++i) {
    nodes[i] = {i, {rng.uniform(0.0, plane_width), rng.uniform(0.0, plane_height)}};
  }
  // Distinct positions; collisions have measure zero but re-draw anyway.
  for (NodeId i = 0; i < node_count; ++i) {
    bool clash = true;
    while (clash) {
      clash = false;
      for (NodeId j = 0; j < i; ++j) {
        if (nodes[i].pos.x == nodes[j].pos.x && nodes[i].pos.y == nodes[j].pos.y) {
          nodes[i].pos = {rng.uniform(0.0, plane_width),
                          rng.uniform(0.0, plane_height)};
          clash = true;
          break;
        }
      }
    }
  }

  // Prim's MST on Euclidean distances, O(n^2).
  std::vector<Edge> edges;
  edges.reserve(edge_count);
  std::vector<bool> in_tree(node_count, false);
  std::vector<double> best(node_count, std::numeric_limits<double>::infinity());
  std::vector<NodeId> best_from(node_count, 0);
  in_tree[0] = true;
  for (NodeId j = 1; j < node_count; ++j) {
    best[j] = distance(nodes[0].pos, nodes[j].pos);
    best_from[j] = 0;
  }
  std::vector<std::vector<bool>> used(node_count);
  for (NodeId i = 0; i < node_count; ++i) used[i].assign(node_count, false);
  for (std::uint32_t added = 1; added < node_count; ++added) {
    NodeId pick = 0;
    double pick_d = std::numeric_limits<double>::infinity();
    for (NodeId j = 0; j < node_count; ++j) {
      if (!in_tree[j] && best[j] < pick_d) {
        pick_d = best[j];
        pick = j;
      }
    }
    const NodeId from = best_from[pick];
    const NodeId a = std::min(from, pick), b = std::max(from, pick);
    edges.push_back({static_cast<EdgeId>(edges.size()), a, b,
                     distance(nodes[a].pos, nodes[b].pos)});
    used[a][b] = true;
    in_tree[pick] = true;
    for (NodeId j = 0; j < node_count; ++j) {
      if (!in_tree[j]) {
        const double d = distance(nodes[pick].pos, nodes[j].pos);
        if (d < best[j]) {
          best[j] = d;
          best_from[j] = pick;
        }
      }
    }
  }

  if (edge_count > edges.size()) {
    struct Pair {
      double d;
      NodeId a, b;
    };
    std::vector<Pair> pairs;
    pairs.reserve(max_edges - edges.size());
    for (NodeId a = 0; a < node_count; ++a)
      for (NodeId b = a + 1; b < node_count; ++b)
        if (!used[a][b]) pairs.push_back({distance(nodes[a].pos, nodes[b].pos), a, b});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) {
      if (l.d != r.d) return l.d < r.d;
      if (l.a != r.a) return l.a < r.a;
      return l.b < r.b;
    });
    for (const Pair& p : pairs) {
      if (edges.size() == edge_count) break;
      edges.push_back({static_cast<EdgeId>(edges.size()), p.a, p.b, p.d});
    }
  }
  if (edges.size() != edge_count)
    throw std::logic_error("generate_graph: failed to reach edge count");

  return SegmentedGraph(std::move(nodes), std::move(edges), 1);
}

// Spec operation name; retiles in place and returns the graph.
inline SegmentedGraph& segment_edges(SegmentedGraph& graph,
                                     std::uint32_t resolution) {
  graph.retile(resolution);
  return graph;
}

// Single-source shortest path distances over edge lengths (Dijkstra).
inline std::vector<double> shortest_path_distances(const SegmentedGraph& graph,
                                                   NodeId source) {
  const std::size_t n = graph.node_count();
  if (source >= n) throw std::invalid_argument("unknown node id");
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (EdgeId eid : graph.incident_edges(u)) {
      const Edge& e = graph.edge(eid);
      const NodeId w = e.u == u ? e.v : e.u;
      const double nd = d + e.length;
      if (nd < dist[w]) {
        dist[w] = nd;
        queue.push({nd, w});
      }
    }
  }
  return dist;
}

// Unoccupied segments on edges incident to `node`, oriented to lead away
// from it, whose entry point lies within `reach_radius` along the edge. The
// first segment of every incident edge is always a candidate. Edges carrying
// opposing traffic are skipped entirely. Ordered by (edge id, entry
// distance).
inline std::vector<SegmentRef> reachable_segments(const SegmentedGraph& graph,
                                                  NodeId node,
                                                  double reach_radius) {
  if (node >= graph.node_count()) throw std::invalid_argument("unknown node id");
  if (reach_radius < 0)
    throw std::invalid_argument("reach_radius must be >= 0");
  std::vector<SegmentRef> out;
  for (EdgeId eid : graph.incident_edges(node)) {
    const Edge& e = graph.edge(eid);
    const auto& segs = graph.segments(eid);
    const bool reversed = e.v == node;
    if (graph.edge_has_opposing(eid, reversed)) continue;
    const auto count = static_cast<std::uint32_t>(segs.size());
    for (std::uint32_t k = 0; k < count; ++k) {
      const std::uint32_t j = reversed ? count - 1 - k : k;
      const SegmentRef ref{eid, j, reversed};
      const double d = graph.entry_distance(ref);
      if (k > 0 && d > reach_radius) break;  // entries are sorted by distance
      if (!graph.occupied(eid, j)) out.push_back(ref);
    }
  }
  return out;
}

// Pair of node ids at maximum Euclidean separation; ties resolved toward the
// smallest indices. Used to pick initial and target nests.
inline std::pair<NodeId, NodeId> farthest_node_pair(const SegmentedGraph& graph) {
  if (graph.node_count() < 2)
    throw std::invalid_argument("graph needs at least two nodes");
  NodeId best_a = 0, best_b = 1;
  double best_d = -1.0;
  const auto& nodes = graph.nodes();
  for (NodeId a = 0; a < nodes.size(); ++a)
    for (NodeId b = a + 1; b < nodes.size(); ++b) {
      const double d = distance(nodes[a].pos, nodes[b].pos);
      if (d > best_d) {
        best_d = d;
        best_a = a;
        best_b = b;
      }
    }
  return {best_a, best_b};
}

inline nlohmann::json graph_to_json(const SegmentedGraph& graph) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const PlanarNode& n : graph.nodes())
    nodes.push_back({{"id", n.id}, {"x", n.pos.x}, {"y", n.pos.y}});
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : graph.edges())
    edges.push_back({{"id", e.id}, {"u", e.u}, {"v", e.v}});
  return {{"nodes", nodes}, {"edges", edges}, {"resolution", graph.resolution()}};
}

inline SegmentedGraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j.contains("edges") ||
      !j.contains("resolution"))
    throw std::invalid_argument("graph json: missing nodes/edges/resolution");
  std::vector<PlanarNode> nodes;
  for (const auto& jn : j.at("nodes")) {
    PlanarNode n{jn.at("id").get<NodeId>(),
                 {jn.at("x").get<double>(), jn.at("y").get<double>()}};
    if (n.id != nodes.size())
      throw std::invalid_argument("graph json: node ids must be dense and ordered");
    if (!std::isfinite(n.pos.x) || !std::isfinite(n.pos.y))
      throw std::invalid_argument("graph json: non-finite node position");
    nodes.push_back(n);
  }
  std::vector<Edge> edges;
  for (const auto& je : j.at("edges")) {
    Edge e{je.at("id").get<EdgeId>(), je.at("u").get<NodeId>(),
           je.at("v").get<NodeId>(), 0.0};
    if (e.id != edges.size())
      throw std::invalid_argument("graph json: edge ids must be dense and ordered");
    if (e.u >= nodes.size() || e.v >= nodes.size())
      throw std::invalid_argument("graph json: edge endpoint out of range");
    e.length = distance(nodes[e.u].pos, nodes[e.v].pos);
    edges.push_back(e);
  }
  return SegmentedGraph(std::move(nodes), std::move(edges),
                        j.at("resolution").get<std::uint32_t>());
}

}  // namespace antmig
