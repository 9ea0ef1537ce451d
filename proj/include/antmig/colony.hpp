#pragma once

// Ants: bounded-random velocities, spawning around the initial nest, the
// segment-selection policy, and continuous within-tick motion along edges.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "antmig/graph.hpp"
#include "antmig/rng.hpp"

namespace antmig {

struct OnSegmentPos {
  SegmentRef ref;
  double offset = 0.0;  // mm from the segment entry, in travel direction

  friend bool operator==(const OnSegmentPos&, const OnSegmentPos&) = default;
};

struct Ant {
  std::uint32_t id = 0;
  std::variant<NodeId, OnSegmentPos> locus;
  double base_velocity = 1.0;     // mm/tick
  double current_velocity = 1.0;  // mm/tick, perturbed each tick
  std::uint64_t rng_stream = 0;   // sub-stream id under the run's root seed
  Rng rng;

  bool at_node() const { return std::holds_alternative<NodeId>(locus); }
  NodeId node() const { return std::get<NodeId>(locus); }
  const OnSegmentPos& segment_pos() const { return std::get<OnSegmentPos>(locus); }
  OnSegmentPos& segment_pos() { return std::get<OnSegmentPos>(locus); }
};

struct ColonyConfig {
  std::uint32_t ant_count = 500;
  NodeId initial_nest = 0;
  double r_i = 50.0;  // initial spread (and target-source) radius, mm
  double eta = 0.1;   // velocity perturbation bound, in [0, 1)
  double v0 = 1.0;    // base velocity, mm/tick
  std::uint32_t top_k = 3;
  std::optional<double> reach_radius;  // absent: 10% of mean edge length

  void validate() const {
    if (ant_count < 1) throw std::invalid_argument("colony: ant_count must be >= 1");
    if (!(eta >= 0) || !(eta < 1))
      throw std::invalid_argument("colony: eta must lie in [0, 1)");
    if (!(v0 > 0)) throw std::invalid_argument("colony: v0 must be > 0");
    if (top_k < 1) throw std::invalid_argument("colony: top_k must be >= 1");
    if (!(r_i >= 0)) throw std::invalid_argument("colony: r_i must be >= 0");
    if (reach_radius && !(*reach_radius >= 0))
      throw std::invalid_argument("colony: reach_radius must be >= 0");
  }
};

inline double mean_edge_length(const SegmentedGraph& graph) {
  if (graph.edge_count() == 0) return 0.0;
  double sum = 0.0;
  for (const Edge& e : graph.edges()) sum += e.length;
  return sum / static_cast<double>(graph.edge_count());
}

inline double effective_reach_radius(const ColonyConfig& cfg,
                                     const SegmentedGraph& graph) {
  return cfg.reach_radius ? *cfg.reach_radius : 0.1 * mean_edge_length(graph);
}

// Place ants uniformly at random over oriented segments whose entry points
// lie within path distance r_i of the initial nest, one ant per segment.
// Ants that do not fit are parked at the nest node. Claims graph occupancy.
inline std::vector<Ant> spawn_colony(const ColonyConfig& cfg,
                                     SegmentedGraph& graph,
                                     std::uint64_t root_seed) {
  cfg.validate();
  if (cfg.initial_nest >= graph.node_count())
    throw std::invalid_argument("spawn: initial_nest not in graph");

  const std::vector<double> dist = shortest_path_distances(graph, cfg.initial_nest);
  std::vector<SegmentRef> candidates;
  for (const Edge& e : graph.edges()) {
    const auto& segs = graph.segments(e.id);
    for (std::uint32_t j = 0; j < segs.size(); ++j) {
      // Path distance from the nest to a point at coordinate c on the edge.
      const auto point_dist = [&](double c) {
        return std::min(dist[e.u] + c, dist[e.v] + (e.length - c));
      };
      if (point_dist(segs[j].start) <= cfg.r_i)
        candidates.push_back({e.id, j, false});
      if (point_dist(segs[j].end) <= cfg.r_i)
        candidates.push_back({e.id, j, true});
    }
  }

  Rng spawn_rng = make_stream(root_seed, "spawn");
  // Fisher-Yates shuffle; uniform over placements given exclusivity.
  for (std::size_t i = candidates.size(); i > 1; --i) {
    const std::size_t k = spawn_rng.uniform_index(i);
    std::swap(candidates[i - 1], candidates[k]);
  }

  std::vector<Ant> colony;
  colony.reserve(cfg.ant_count);
  std::size_t next_candidate = 0;
  for (std::uint32_t id = 0; id < cfg.ant_count; ++id) {
    Ant ant;
    ant.id = id;
    ant.base_velocity = cfg.v0;
    ant.current_velocity = cfg.v0;
    ant.rng_stream = derive_seed(root_seed, "ant", id);
    ant.rng = Rng(ant.rng_stream);
    ant.locus = cfg.initial_nest;
    while (next_candidate < candidates.size()) {
      const SegmentRef ref = candidates[next_candidate++];
      if (!graph.occupied(ref.edge, ref.ordinal) &&
          !graph.edge_has_opposing(ref.edge, ref.reversed)) {
        graph.set_occupant(ref.edge, ref.ordinal, id, ref.reversed);
        ant.locus = OnSegmentPos{ref, 0.0};
        break;
      }
    }
    colony.push_back(std::move(ant));
  }
  return colony;
}

// current_velocity = v0 * (1 + u), u ~ U[-eta, +eta] from the ant's stream.
inline void perturb_velocity(Ant& ant, double eta) {
  const double u = eta > 0 ? ant.rng.uniform(-eta, eta) : 0.0;
  ant.current_velocity = ant.base_velocity * (1.0 + u);
}

// Pick the next segment for an ant standing at a node: rank candidates by
// field value at their entry points, then choose uniformly among the top
// min(top_k, n). All-zero candidate values fall back to a uniform choice
// over every candidate so the colony can bootstrap from a clean graph.
// Returns nothing when there are no candidates (the ant waits one tick).
template <typename FieldEval>
std::optional<SegmentRef> select_next_segment(Ant& ant,
                                              const std::vector<SegmentRef>& candidates,
                                              const SegmentedGraph& graph,
                                              FieldEval&& value_at, double t,
                                              std::uint32_t top_k) {
  if (!ant.at_node()) throw std::logic_error("select: ant is not at a node");
  if (candidates.empty()) return std::nullopt;

  struct Scored {
    double value;
    SegmentRef ref;
  };
  std::vector<Scored> scored;
  scored.reserve(candidates.size());
  bool any_positive = false;
  for (const SegmentRef& ref : candidates) {
    const double v = value_at(ref.edge, graph.entry_coord(ref), t);
    any_positive = any_positive || v > 0.0;
    scored.push_back({v, ref});
  }
  if (!any_positive) {
    return candidates[ant.rng.uniform_index(candidates.size())];
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.ref.edge != b.ref.edge) return a.ref.edge < b.ref.edge;
    return a.ref.ordinal < b.ref.ordinal;
  });
  const std::size_t pool =
      std::min<std::size_t>(top_k, scored.size());
  return scored[ant.rng.uniform_index(pool)].ref;
}

struct DepositEvent {
  EdgeId edge = 0;
  std::uint32_t ordinal = 0;
  double time = 0.0;
};

struct AdvanceOutcome {
  std::vector<DepositEvent> deposits;
  bool arrived_at_node = false;
};

// Move an on-segment ant for one tick of length dt starting at time t0.
// Crossing into the successor segment deposits at the crossing instant and
// carries the residual distance; a blocked successor parks the ant at the
// boundary; crossing past the last segment puts the ant at the far node.
inline AdvanceOutcome advance_ant(Ant& ant, SegmentedGraph& graph, double dt,
                                  double t0) {
  if (ant.at_node()) throw std::logic_error("advance: ant is not on a segment");
  AdvanceOutcome out;
  double remaining = dt;
  const double v = ant.current_velocity;
  while (remaining > 0.0) {
    OnSegmentPos& pos = ant.segment_pos();
    const Segment& seg = graph.segment(pos.ref);
    const double seg_len = seg.length();
    // Clamp guards the crossing fraction against the offset overshooting
    // seg_len by an ulp, which would turn into a negative event time.
    const double dist_to_end = std::max(0.0, seg_len - pos.offset);
    const double time_to_end = dist_to_end / v;
    if (time_to_end > remaining) {
      pos.offset = std::min(pos.offset + v * remaining, seg_len);
      break;
    }
    const double cross_time = t0 + (dt - remaining) + time_to_end;
    remaining -= time_to_end;

    const auto& segs = graph.segments(pos.ref.edge);
    const bool last = pos.ref.reversed ? pos.ref.ordinal == 0
                                       : pos.ref.ordinal + 1 == segs.size();
    if (last) {
      graph.clear_occupant(pos.ref.edge, pos.ref.ordinal);
      ant.locus = graph.head_node(pos.ref.edge, pos.ref.reversed);
      out.arrived_at_node = true;
      break;
    }
    const std::uint32_t next =
        pos.ref.reversed ? pos.ref.ordinal - 1 : pos.ref.ordinal + 1;
    if (graph.occupied(pos.ref.edge, next)) {
      pos.offset = seg_len;  // wait at the boundary for the rest of the tick
      break;
    }
    graph.clear_occupant(pos.ref.edge, pos.ref.ordinal);
    graph.set_occupant(pos.ref.edge, next, ant.id, pos.ref.reversed);
    pos.ref.ordinal = next;
    pos.offset = 0.0;
    out.deposits.push_back({pos.ref.edge, next, cross_time});
  }
  return out;
}

// Plane position of an ant; on-segment positions interpolate linearly along
// the edge.
inline Vec2 ant_position(const Ant& ant, const SegmentedGraph& graph) {
  if (ant.at_node()) return graph.node(ant.node()).pos;
  const OnSegmentPos& pos = ant.segment_pos();
  const Segment& seg = graph.segment(pos.ref);
  const double coord =
      pos.ref.reversed ? seg.end - pos.offset : seg.start + pos.offset;
  return graph.point_at(pos.ref.edge, coord);
}

}  // namespace antmig
