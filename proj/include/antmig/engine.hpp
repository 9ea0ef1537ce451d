#pragma once

// Tick-by-tick migration engine.
//
// Each tick: (1) perturb every ant's velocity, (2) ants standing at nodes
// pick a reachable segment by pheromone value and deposit on entry, (3)
// on-segment ants advance with residual carry, depositing as they cross into
// successor segments, (4) the target source tops up segments near the target
// nest whose value fell below the radial target profile, (5) the clock
// advances. Evaporation needs no pass of its own; it lives inside profile
// evaluation.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "antmig/colony.hpp"
#include "antmig/field_eval.hpp"
#include "antmig/graph.hpp"
#include "antmig/metrics.hpp"
#include "antmig/pheromone.hpp"
#include "antmig/rng.hpp"

namespace antmig {

struct TargetConfig {
  NodeId node = 0;
  double lambda = 0.1;  // radial target scale factor, 1/mm
  double threshold = 0.9;
  double r_n = 30.0;  // convergence radius, mm
  std::uint64_t max_ticks = 200000;
  bool source_enabled = true;

  void validate() const {
    if (!(lambda > 0)) throw std::invalid_argument("target: lambda must be > 0");
    if (!(threshold > 0) || !(threshold <= 1))
      throw std::invalid_argument("target: threshold must lie in (0, 1]");
    if (!(r_n > 0)) throw std::invalid_argument("target: r_n must be > 0");
    if (max_ticks == 0) throw std::invalid_argument("target: max_ticks must be >= 1");
  }
};

// Desired steady-state value at distance d from the target node:
// rho_star * exp(-lambda * d).
inline double radial_target(double d, double lambda, double rho_star) {
  return rho_star * std::exp(-lambda * d);
}

struct DepositLogEntry {
  std::uint64_t tick = 0;
  EdgeId edge = 0;
  std::uint32_t ordinal = 0;
  double time = 0.0;
};

struct SimState {
  SegmentedGraph graph;
  TrainStore trains;
  std::vector<Ant> colony;
  std::uint64_t clock = 0;
  PheromoneParams params;
  ColonyConfig colony_cfg;
  TargetConfig target;
  std::uint64_t root_seed = 0;

  // Derived, rebuilt rather than serialized.
  double reach_radius = 0.0;
  struct ZoneSegment {
    std::size_t index = 0;
    EdgeId edge = 0;
    std::uint32_t ordinal = 0;
    double entry_distance = 0.0;
  };
  std::vector<ZoneSegment> renewal_zone;

  void rebuild_derived() {
    reach_radius = effective_reach_radius(colony_cfg, graph);
    renewal_zone.clear();
    const std::vector<double> dist = shortest_path_distances(graph, target.node);
    for (const Edge& e : graph.edges()) {
      const auto& segs = graph.segments(e.id);
      for (std::uint32_t j = 0; j < segs.size(); ++j) {
        const double d = std::min(dist[e.u] + segs[j].start,
                                  dist[e.v] + (e.length - segs[j].end));
        if (d <= colony_cfg.r_i)
          renewal_zone.push_back({graph.segment_index(e.id, j), e.id, j, d});
      }
    }
  }
};

inline SimState make_sim(SegmentedGraph graph, const PheromoneParams& params,
                         const ColonyConfig& colony_cfg, const TargetConfig& target,
                         std::uint64_t root_seed) {
  params.validate();
  colony_cfg.validate();
  target.validate();
  if (target.node >= graph.node_count())
    throw std::invalid_argument("target: node not in graph");

  SimState s;
  s.graph = std::move(graph);
  s.graph.clear_all_occupants();
  s.trains.reset(s.graph.total_segments());
  s.params = params;
  s.colony_cfg = colony_cfg;
  s.target = target;
  s.root_seed = root_seed;
  s.colony = spawn_colony(colony_cfg, s.graph, root_seed);
  s.rebuild_derived();
  return s;
}

// One tick. A caller stepping many times should pass a persistent
// FieldEvaluator (owning the spike caches); without one a transient
// evaluator is built, with identical results.
inline void step(SimState& s, std::vector<DepositLogEntry>* log = nullptr,
                 FieldEvaluator* eval = nullptr) {
  std::optional<FieldEvaluator> local;
  if (!eval) {
    local.emplace(s.graph, s.trains, s.params);
    eval = &*local;
  }
  const double t = static_cast<double>(s.clock);
  const double dt = 1.0;

  for (Ant& ant : s.colony) perturb_velocity(ant, s.colony_cfg.eta);

  const auto field_value = [&](EdgeId e, double x, double at) {
    return eval->smooth_value(e, x, at);
  };
  for (Ant& ant : s.colony) {
    if (!ant.at_node()) continue;
    const auto candidates = reachable_segments(s.graph, ant.node(), s.reach_radius);
    const auto choice = select_next_segment(ant, candidates, s.graph, field_value,
                                            t, s.colony_cfg.top_k);
    if (!choice) continue;  // boxed in; wait one tick
    s.graph.set_occupant(choice->edge, choice->ordinal, ant.id, choice->reversed);
    ant.locus = OnSegmentPos{*choice, 0.0};
    s.trains.at(s.graph.segment_index(choice->edge, choice->ordinal)).deposit(t);
    if (log) log->push_back({s.clock, choice->edge, choice->ordinal, t});
  }

  for (Ant& ant : s.colony) {
    if (ant.at_node()) continue;
    const AdvanceOutcome out = advance_ant(ant, s.graph, dt, t);
    for (const DepositEvent& dep : out.deposits) {
      s.trains.at(s.graph.segment_index(dep.edge, dep.ordinal)).deposit(dep.time);
      if (log) log->push_back({s.clock, dep.edge, dep.ordinal, dep.time});
    }
  }

  if (s.target.source_enabled) {
    const double renew_time = t + dt;
    for (const SimState::ZoneSegment& z : s.renewal_zone) {
      const double value = eval->segment_value(z.index, renew_time);
      if (value < radial_target(z.entry_distance, s.target.lambda, s.params.rho_star)) {
        s.trains.at(z.index).deposit(renew_time);
        if (log) log->push_back({s.clock, z.edge, z.ordinal, renew_time});
      }
    }
  }

  ++s.clock;
}

// Operational steady-state surrogate: the r_n rate reached the threshold.
inline bool check_convergence(const SimState& s, double r_n, double threshold) {
  if (!(threshold > 0) || !(threshold <= 1))
    throw std::invalid_argument("check_convergence: threshold must lie in (0, 1]");
  return rn_convergence_rate(s.colony, s.graph, s.target.node, r_n) >= threshold;
}

// Normalized L1 distance (total variation) between the sampled field and the
// radial target, both normalized to unit mass. An all-zero field reads 1.
inline double distribution_mismatch(const SimState& s,
                                    std::uint32_t samples_per_edge = 8) {
  const auto samples = sample_field(s.graph, s.trains, static_cast<double>(s.clock),
                                    s.params, samples_per_edge);
  if (samples.empty()) throw std::invalid_argument("mismatch: empty sample grid");
  const Vec2 goal = s.graph.node(s.target.node).pos;
  double field_mass = 0.0, target_mass = 0.0;
  std::vector<double> want;
  want.reserve(samples.size());
  for (const FieldSample& fs : samples) {
    const double d = distance(s.graph.point_at(fs.edge, fs.x), goal);
    want.push_back(radial_target(d, s.target.lambda, s.params.rho_star));
    field_mass += fs.value;
    target_mass += want.back();
  }
  if (field_mass <= 0.0) return 1.0;
  double l1 = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    l1 += std::abs(samples[i].value / field_mass - want[i] / target_mass);
  return 0.5 * l1;
}

// Sum over every spike of Ht(t-t_i)(1-Ht(t-t_i)) minus 1/delta; zero marks a
// temporal equilibrium candidate.
inline double temporal_equilibrium_residual(const SimState& s, double t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.trains.size(); ++i) {
    for (double ti : s.trains.at(i).times()) {
      const double h = heaviside_smooth(t, ti, s.params.k_t);
      acc += h * (1.0 - h);
    }
  }
  return acc - 1.0 / s.params.delta;
}

// Saturation sum over every spike of Ht(t - t_i): the quantity the
// no-evaporation limit would need to pin at 1 for a temporal equilibrium.
inline double temporal_saturation_sum(const SimState& s, double t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.trains.size(); ++i)
    for (double ti : s.trains.at(i).times())
      acc += heaviside_smooth(t, ti, s.params.k_t);
  return acc;
}

// Per-point spatial stationarity defect of one edge at coordinate x.
inline double spatial_residual_at(const SegmentedGraph& graph, EdgeId e, double x,
                                  double k_x) {
  double acc = 0.0;
  for (const Segment& seg : graph.segments(e)) {
    const double ha = heaviside_smooth(x, seg.start, k_x);
    const double hb = heaviside_smooth(x, seg.end, k_x);
    acc += ha * (1.0 - ha) - hb * (1.0 - hb);
  }
  return acc;
}

// Mean absolute per-point spatial defect over a uniform per-edge grid. The
// time argument is unused (segment geometry is static) and kept for symmetry
// with the temporal diagnostic.
inline double spatial_equilibrium_residual(const SimState& s, double /*t*/,
                                           std::uint32_t samples_per_edge = 8) {
  if (samples_per_edge == 0)
    throw std::invalid_argument("spatial residual: samples_per_edge must be >= 1");
  double acc = 0.0;
  std::size_t n = 0;
  for (const Edge& e : s.graph.edges()) {
    for (std::uint32_t k = 0; k < samples_per_edge; ++k) {
      const double x = e.length * (k + 0.5) / samples_per_edge;
      acc += std::abs(spatial_residual_at(s.graph, e.id, x, s.params.k_x));
      ++n;
    }
  }
  return acc / static_cast<double>(n);
}

struct SegmentBoundaryFlag {
  EdgeId edge = 0;
  std::uint32_t ordinal = 0;
  bool degenerate = false;       // x_i == x_{i+1}
  bool normalized_pair = false;  // x_i + x_{i+1} == 1 on edge-normalized coords
};

// Boundary-pair checks for the spatial equilibrium solutions, per segment of
// one edge. Uniform tilings trip the normalized-pair flag exactly on the
// middle segment of odd resolutions.
inline std::vector<SegmentBoundaryFlag> boundary_pair_flags(
    const std::vector<Segment>& segs, double edge_length, EdgeId edge = 0) {
  std::vector<SegmentBoundaryFlag> flags;
  for (std::uint32_t j = 0; j < segs.size(); ++j) {
    SegmentBoundaryFlag f{edge, j, false, false};
    f.degenerate = segs[j].start == segs[j].end;
    if (edge_length > 0) {
      const double norm_sum = (segs[j].start + segs[j].end) / edge_length;
      f.normalized_pair = std::abs(norm_sum - 1.0) <= 1e-9;
    }
    if (f.degenerate || f.normalized_pair) flags.push_back(f);
  }
  return flags;
}

inline std::vector<SegmentBoundaryFlag> spatial_boundary_flags(
    const SegmentedGraph& graph) {
  std::vector<SegmentBoundaryFlag> flags;
  for (const Edge& e : graph.edges()) {
    for (SegmentBoundaryFlag f :
         boundary_pair_flags(graph.segments(e.id), e.length, e.id))
      flags.push_back(f);
  }
  return flags;
}

struct EquilibriumReport {
  double temporal_residual = 0.0;
  double spatial_residual = 0.0;
  std::uint64_t evaluated_at = 0;
};

inline EquilibriumReport equilibrium_report(const SimState& s,
                                            std::uint32_t samples_per_edge = 8) {
  const auto t = static_cast<double>(s.clock);
  return {temporal_equilibrium_residual(s, t),
          spatial_equilibrium_residual(s, t, samples_per_edge), s.clock};
}

// Hard invariants checked over runs: one ant per segment, bounded velocities,
// offsets inside their segment, constant colony size.
inline void validate_invariants(const SimState& s) {
  if (s.colony.size() != s.colony_cfg.ant_count)
    throw std::logic_error("invariant: colony size changed");
  const double vlo = s.colony_cfg.v0 * (1.0 - s.colony_cfg.eta) - 1e-12;
  const double vhi = s.colony_cfg.v0 * (1.0 + s.colony_cfg.eta) + 1e-12;
  std::size_t on_segment = 0;
  for (std::size_t i = 0; i < s.colony.size(); ++i) {
    const Ant& ant = s.colony[i];
    if (ant.id != i) throw std::logic_error("invariant: ant id mismatch");
    if (!(ant.current_velocity >= vlo) || !(ant.current_velocity <= vhi) ||
        !(ant.current_velocity > 0))
      throw std::logic_error("invariant: velocity out of bounds");
    if (ant.at_node()) {
      if (ant.node() >= s.graph.node_count())
        throw std::logic_error("invariant: ant at unknown node");
      continue;
    }
    ++on_segment;
    const OnSegmentPos& pos = ant.segment_pos();
    const Segment& seg = s.graph.segment(pos.ref);
    if (!(pos.offset >= 0.0) || !(pos.offset <= seg.length() + 1e-12))
      throw std::logic_error("invariant: offset outside segment");
    if (!seg.occupant || *seg.occupant != ant.id)
      throw std::logic_error("invariant: occupancy does not match ant locus");
    if (seg.occupant_reversed != pos.ref.reversed)
      throw std::logic_error("invariant: occupancy direction mismatch");
    if (s.graph.edge_has_opposing(pos.ref.edge, pos.ref.reversed))
      throw std::logic_error("invariant: opposing traffic on one edge");
  }
  std::size_t occupied = 0;
  for (const Edge& e : s.graph.edges())
    for (const Segment& seg : s.graph.segments(e.id))
      if (seg.occupant) ++occupied;
  if (occupied != on_segment)
    throw std::logic_error("invariant: dangling segment occupancy");
}

struct RunResult {
  bool converged = false;
  std::uint64_t ticks = 0;
  double rn_rate = 0.0;
};

// Step until the r_n rate reaches the threshold or max_ticks elapse. The
// observer, when given, sees the state after every tick (and the initial
// state).
inline RunResult run_migration(
    SimState& s, std::vector<DepositLogEntry>* log = nullptr,
    const std::function<void(const SimState&)>& observer = {}) {
  FieldEvaluator eval(s.graph, s.trains, s.params);
  const auto rate = [&] {
    return rn_convergence_rate(s.colony, s.graph, s.target.node, s.target.r_n);
  };
  if (observer) observer(s);
  double r = rate();
  if (r >= s.target.threshold) return {true, s.clock, r};
  while (s.clock < s.target.max_ticks) {
    step(s, log, &eval);
    if (observer) observer(s);
    r = rate();
    if (r >= s.target.threshold) return {true, s.clock, r};
  }
  return {false, s.clock, r};
}

inline nlohmann::json snapshot_to_json(const SimState& s) {
  nlohmann::json ants = nlohmann::json::array();
  for (const Ant& a : s.colony) {
    nlohmann::json locus;
    if (a.at_node()) {
      locus = {{"kind", "node"}, {"node", a.node()}};
    } else {
      const OnSegmentPos& p = a.segment_pos();
      locus = {{"kind", "segment"},
               {"edge", p.ref.edge},
               {"ordinal", p.ref.ordinal},
               {"reversed", p.ref.reversed},
               {"offset", p.offset}};
    }
    ants.push_back({{"id", a.id},
                    {"base_velocity", a.base_velocity},
                    {"current_velocity", a.current_velocity},
                    {"rng_stream", a.rng_stream},
                    {"rng_state", a.rng.state()},
                    {"locus", locus}});
  }
  const ColonyConfig& c = s.colony_cfg;
  nlohmann::json colony_cfg = {
      {"ant_count", c.ant_count}, {"initial_nest", c.initial_nest},
      {"r_i", c.r_i},             {"eta", c.eta},
      {"v0", c.v0},               {"top_k", c.top_k},
      {"reach_radius", c.reach_radius ? nlohmann::json(*c.reach_radius)
                                      : nlohmann::json(nullptr)}};
  const PheromoneParams& p = s.params;
  nlohmann::json params = {{"rho_star", p.rho_star},
                           {"delta", p.delta},
                           {"k_t", p.k_t},
                           {"k_x", p.k_x},
                           {"per_spike_decay", p.per_spike_decay},
                           {"prune_horizon", p.prune_horizon}};
  const TargetConfig& tg = s.target;
  nlohmann::json target = {{"node", tg.node},           {"lambda", tg.lambda},
                           {"threshold", tg.threshold}, {"r_n", tg.r_n},
                           {"max_ticks", tg.max_ticks},
                           {"source_enabled", tg.source_enabled}};
  return {{"format", "antmig-snapshot-v1"},
          {"clock", s.clock},
          {"root_seed", s.root_seed},
          {"graph", graph_to_json(s.graph)},
          {"pheromone", params},
          {"colony_config", colony_cfg},
          {"target", target},
          {"ants", ants},
          {"trains", trains_to_json(s.graph, s.trains)}};
}

inline SimState snapshot_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != std::string("antmig-snapshot-v1"))
    throw std::invalid_argument("snapshot: missing or unknown format tag");
  SimState s;
  s.clock = j.at("clock").get<std::uint64_t>();
  s.root_seed = j.at("root_seed").get<std::uint64_t>();
  s.graph = graph_from_json(j.at("graph"));

  const auto& jp = j.at("pheromone");
  s.params.rho_star = jp.at("rho_star").get<double>();
  s.params.delta = jp.at("delta").get<double>();
  s.params.k_t = jp.at("k_t").get<double>();
  s.params.k_x = jp.at("k_x").get<double>();
  s.params.per_spike_decay = jp.at("per_spike_decay").get<bool>();
  s.params.prune_horizon = jp.at("prune_horizon").get<double>();
  s.params.validate();

  const auto& jc = j.at("colony_config");
  s.colony_cfg.ant_count = jc.at("ant_count").get<std::uint32_t>();
  s.colony_cfg.initial_nest = jc.at("initial_nest").get<NodeId>();
  s.colony_cfg.r_i = jc.at("r_i").get<double>();
  s.colony_cfg.eta = jc.at("eta").get<double>();
  s.colony_cfg.v0 = jc.at("v0").get<double>();
  s.colony_cfg.top_k = jc.at("top_k").get<std::uint32_t>();
  if (!jc.at("reach_radius").is_null())
    s.colony_cfg.reach_radius = jc.at("reach_radius").get<double>();
  s.colony_cfg.validate();

  const auto& jt = j.at("target");
  s.target.node = jt.at("node").get<NodeId>();
  s.target.lambda = jt.at("lambda").get<double>();
  s.target.threshold = jt.at("threshold").get<double>();
  s.target.r_n = jt.at("r_n").get<double>();
  s.target.max_ticks = jt.at("max_ticks").get<std::uint64_t>();
  s.target.source_enabled = jt.at("source_enabled").get<bool>();
  s.target.validate();
  if (s.target.node >= s.graph.node_count())
    throw std::invalid_argument("snapshot: target node out of range");

  trains_from_json(j.at("trains"), s.graph, s.trains);

  for (const auto& ja : j.at("ants")) {
    Ant a;
    a.id = ja.at("id").get<std::uint32_t>();
    a.base_velocity = ja.at("base_velocity").get<double>();
    a.current_velocity = ja.at("current_velocity").get<double>();
    a.rng_stream = ja.at("rng_stream").get<std::uint64_t>();
    a.rng.set_state(ja.at("rng_state").get<Rng::State>());
    const auto& jl = ja.at("locus");
    const std::string kind = jl.at("kind").get<std::string>();
    if (kind == "node") {
      const auto n = jl.at("node").get<NodeId>();
      if (n >= s.graph.node_count())
        throw std::invalid_argument("snapshot: ant at unknown node");
      a.locus = n;
    } else if (kind == "segment") {
      OnSegmentPos p;
      p.ref.edge = jl.at("edge").get<EdgeId>();
      p.ref.ordinal = jl.at("ordinal").get<std::uint32_t>();
      p.ref.reversed = jl.at("reversed").get<bool>();
      p.offset = jl.at("offset").get<double>();
      const Segment& seg = s.graph.segment_at(p.ref.edge, p.ref.ordinal);
      if (!(p.offset >= 0.0) || !(p.offset <= seg.length()))
        throw std::invalid_argument("snapshot: ant offset outside segment");
      s.graph.set_occupant(p.ref.edge, p.ref.ordinal, a.id, p.ref.reversed);
      a.locus = p;
    } else {
      throw std::invalid_argument("snapshot: unknown locus kind");
    }
    s.colony.push_back(std::move(a));
  }
  if (s.colony.size() != s.colony_cfg.ant_count)
    throw std::invalid_argument("snapshot: ant count does not match config");

  s.rebuild_derived();
  validate_invariants(s);
  return s;
}

}  // namespace antmig
