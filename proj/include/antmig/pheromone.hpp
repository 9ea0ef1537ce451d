#pragma once

// Per-segment spike trains and the piecewise-continuous pheromone field.
//
// A segment's pheromone state is the list of deposit times {t_i}. Its value
// at time t is, in the default form,
//
//     rho(t) = rho_star * exp(-t/delta) * sum_i H(t - t_i)
//
// a single decay envelope multiplying the spike count. The alternative
// per-spike form lets every spike decay from its own onset with full
// amplitude:
//
//     rho(t) = rho_star * sum_i exp(-(t - t_i)/delta) * H(t - t_i)
//
// Edge profiles gate each segment's value by spatial step brackets; smooth
// variants replace both step functions with logistics of steepness k_t, k_x.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "antmig/graph.hpp"

namespace antmig {

struct PheromoneParams {
  double rho_star = 1.0;   // deposit amplitude
  double delta = 50.0;     // decay rate regulator, time units
  double k_t = 50.0;       // temporal logistic steepness, 1/time
  double k_x = 50.0;       // spatial logistic steepness, 1/mm
  bool per_spike_decay = false;
  double prune_horizon = 20.0;  // drop spikes older than prune_horizon*delta

  void validate() const {
    if (!(rho_star > 0)) throw std::invalid_argument("pheromone: rho_star must be > 0");
    if (!(delta > 0)) throw std::invalid_argument("pheromone: delta must be > 0");
    if (!(k_t > 0)) throw std::invalid_argument("pheromone: k_t must be > 0");
    if (!(k_x > 0)) throw std::invalid_argument("pheromone: k_x must be > 0");
    if (!(prune_horizon > 0))
      throw std::invalid_argument("pheromone: prune_horizon must be > 0");
  }
};

// Exact step: 1 iff t >= t0 (closed at the left, H(0) = 1).
inline double heaviside_time(double t, double t0) { return t >= t0 ? 1.0 : 0.0; }
inline double heaviside_space(double x, double x0) { return x >= x0 ? 1.0 : 0.0; }

// Logistic approximation 1/(1 + exp(-k(v - v0))).
inline double heaviside_smooth(double v, double v0, double k) {
  assert(k > 0);
  return 1.0 / (1.0 + std::exp(-k * (v - v0)));
}

// Ordered deposit times of one segment. Append-only within a run.
class SpikeTrain {
 public:
  void deposit(double t) {
    if (!(t >= 0) || !std::isfinite(t))
      throw std::invalid_argument("deposit time must be finite and >= 0");
    if (!times_.empty() && t < times_.back())
      throw std::logic_error("deposit time regression: t=" + std::to_string(t) +
                             " last=" + std::to_string(times_.back()));
    times_.push_back(t);
  }

  bool empty() const { return times_.empty(); }
  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }

  void assign(std::vector<double> times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!(times[i] >= 0) || !std::isfinite(times[i]))
        throw std::invalid_argument("spike times must be finite and >= 0");
      if (i > 0 && times[i] < times[i - 1])
        throw std::invalid_argument("spike times must be sorted");
    }
    times_ = std::move(times);
  }

  // Number of spikes with lo <= t_i <= hi.
  std::size_t count_between(double lo, double hi) const {
    const auto b = std::lower_bound(times_.begin(), times_.end(), lo);
    const auto e = std::upper_bound(times_.begin(), times_.end(), hi);
    return static_cast<std::size_t>(e - b);
  }

 private:
  std::vector<double> times_;
};

namespace detail {

// Logistic tails below ~e^-40 are beyond double resolution relative to 1.
inline double saturation_gap(double k) { return 40.0 / k; }

// Temporal sums over one train at time t:
//   s = sum_i w_i * Ht(t - t_i)
//   q = sum_i w_i * Ht(t - t_i) * (1 - Ht(t - t_i))
// with w_i = 1 (shared envelope form) or exp(-(t - t_i)/delta) (per-spike
// form). Spikes older than the prune horizon are excluded; saturated spikes
// are counted in bulk instead of being evaluated one by one.
inline void smooth_temporal_sums(const SpikeTrain& train, double t,
                                 const PheromoneParams& p, double& s,
                                 double& q) {
  s = 0.0;
  q = 0.0;
  const auto& times = train.times();
  if (times.empty()) return;
  const double window_lo = t - p.prune_horizon * p.delta;
  const double gap = saturation_gap(p.k_t);
  const auto lo = std::lower_bound(times.begin(), times.end(), window_lo);
  if (!p.per_spike_decay) {
    const auto mid = std::lower_bound(lo, times.end(), t - gap);
    s += static_cast<double>(mid - lo);  // saturated: Ht == 1, Ht(1-Ht) == 0
    for (auto it = mid; it != times.end(); ++it) {
      const double dt = t - *it;
      if (-dt > gap) break;  // far-future spikes contribute nothing
      const double h = heaviside_smooth(dt, 0.0, p.k_t);
      s += h;
      q += h * (1.0 - h);
    }
  } else {
    // Future cutoff where exp(dt/delta) * logistic(k_t dt) vanishes.
    const double rate = p.k_t - 1.0 / p.delta;
    const double future_gap =
        rate > 0 ? 40.0 / rate : std::numeric_limits<double>::infinity();
    for (auto it = lo; it != times.end(); ++it) {
      const double dt = t - *it;
      if (-dt > future_gap) break;
      const double w = std::exp(-dt / p.delta);
      const double h = heaviside_smooth(dt, 0.0, p.k_t);
      s += w * h;
      q += w * h * (1.0 - h);
    }
  }
}

}  // namespace detail

// Eq.-3 style segment value at time t (exact step functions).
inline double segment_profile(const SpikeTrain& train, double t,
                              const PheromoneParams& p) {
  if (train.empty()) return 0.0;
  const double window_lo = t - p.prune_horizon * p.delta;
  if (!p.per_spike_decay) {
    const auto count = static_cast<double>(train.count_between(window_lo, t));
    return p.rho_star * std::exp(-t / p.delta) * count;
  }
  const auto& times = train.times();
  const auto b = std::lower_bound(times.begin(), times.end(), window_lo);
  const auto e = std::upper_bound(times.begin(), times.end(), t);
  double sum = 0.0;
  for (auto it = b; it != e; ++it) sum += std::exp(-(t - *it) / p.delta);
  return p.rho_star * sum;
}

// Smooth segment value (logistic in time only; used by the edge profiles).
inline double segment_profile_smooth(const SpikeTrain& train, double t,
                                     const PheromoneParams& p) {
  double s = 0.0, q = 0.0;
  detail::smooth_temporal_sums(train, t, p, s, q);
  return p.per_spike_decay ? p.rho_star * s
                           : p.rho_star * std::exp(-t / p.delta) * s;
}

// Trains for every segment of a graph, addressed by flat segment index.
class TrainStore {
 public:
  TrainStore() = default;
  explicit TrainStore(std::size_t n) : trains_(n) {}

  void reset(std::size_t n) { trains_.assign(n, {}); }
  std::size_t size() const { return trains_.size(); }

  SpikeTrain& at(std::size_t i) { return trains_.at(i); }
  const SpikeTrain& at(std::size_t i) const { return trains_.at(i); }

  std::size_t total_spikes() const {
    std::size_t n = 0;
    for (const auto& t : trains_) n += t.size();
    return n;
  }

 private:
  std::vector<SpikeTrain> trains_;
};

namespace detail {

inline void check_edge_coord(const SegmentedGraph& g, EdgeId e, double x) {
  const double len = g.edge(e).length;
  if (!(x >= 0.0) || !(x <= len))
    throw std::invalid_argument("x outside [0, edge length]");
}

}  // namespace detail

// Exact edge profile: sum over segments of the segment value gated by the
// exact spatial bracket H(x - x_i) - H(x - x_{i+1}).
inline double edge_profile_exact(const SegmentedGraph& graph,
                                 const TrainStore& trains, EdgeId e, double x,
                                 double t, const PheromoneParams& p) {
  detail::check_edge_coord(graph, e, x);
  const auto& segs = graph.segments(e);
  double value = 0.0;
  for (std::uint32_t j = 0; j < segs.size(); ++j) {
    const double bracket =
        heaviside_space(x, segs[j].start) - heaviside_space(x, segs[j].end);
    if (bracket == 0.0) continue;
    value += segment_profile(trains.at(graph.segment_index(e, j)), t, p) * bracket;
  }
  return value;
}

// Smooth edge profile (Eq.-9 style): logistic steps in both time and space.
inline double edge_profile_smooth(const SegmentedGraph& graph,
                                  const TrainStore& trains, EdgeId e, double x,
                                  double t, const PheromoneParams& p) {
  detail::check_edge_coord(graph, e, x);
  const auto& segs = graph.segments(e);
  double value = 0.0;
  for (std::uint32_t j = 0; j < segs.size(); ++j) {
    const SpikeTrain& train = trains.at(graph.segment_index(e, j));
    if (train.empty()) continue;
    const double bracket = heaviside_smooth(x, segs[j].start, p.k_x) -
                           heaviside_smooth(x, segs[j].end, p.k_x);
    value += segment_profile_smooth(train, t, p) * bracket;
  }
  return value;
}

// Whole-colony field at a query point. Edges are spatially disjoint, so the
// outer sum over edges reduces to the host edge.
inline double colony_profile(const SegmentedGraph& graph, const TrainStore& trains,
                             EdgeId e, double x, double t,
                             const PheromoneParams& p) {
  return edge_profile_smooth(graph, trains, e, x, t, p);
}

struct FieldGradient {
  double d_dx = 0.0;
  double d_dt = 0.0;
};

// Analytic partial derivatives of the smooth edge profile, using
// d/dv logistic = k * H * (1 - H).
inline FieldGradient profile_gradient(const SegmentedGraph& graph,
                                      const TrainStore& trains, EdgeId e,
                                      double x, double t,
                                      const PheromoneParams& p) {
  detail::check_edge_coord(graph, e, x);
  const auto& segs = graph.segments(e);
  FieldGradient g;
  const double envelope = p.per_spike_decay ? 1.0 : std::exp(-t / p.delta);
  for (std::uint32_t j = 0; j < segs.size(); ++j) {
    const SpikeTrain& train = trains.at(graph.segment_index(e, j));
    if (train.empty()) continue;
    double s = 0.0, q = 0.0;
    detail::smooth_temporal_sums(train, t, p, s, q);
    const double ha = heaviside_smooth(x, segs[j].start, p.k_x);
    const double hb = heaviside_smooth(x, segs[j].end, p.k_x);
    const double bracket = ha - hb;
    const double bracket_dx = p.k_x * (ha * (1.0 - ha) - hb * (1.0 - hb));
    const double temporal = envelope * s;
    const double temporal_dt = envelope * (p.k_t * q - s / p.delta);
    g.d_dx += p.rho_star * temporal * bracket_dx;
    g.d_dt += p.rho_star * temporal_dt * bracket;
  }
  return g;
}

struct FieldSample {
  EdgeId edge = 0;
  double x = 0.0;
  double t = 0.0;
  double value = 0.0;
};

// Smooth field sampled on a uniform per-edge grid (cell midpoints).
inline std::vector<FieldSample> sample_field(const SegmentedGraph& graph,
                                             const TrainStore& trains, double t,
                                             const PheromoneParams& p,
                                             std::uint32_t samples_per_edge) {
  if (samples_per_edge == 0)
    throw std::invalid_argument("samples_per_edge must be >= 1");
  std::vector<FieldSample> out;
  out.reserve(graph.edge_count() * samples_per_edge);
  for (const Edge& e : graph.edges()) {
    for (std::uint32_t k = 0; k < samples_per_edge; ++k) {
      const double x = e.length * (k + 0.5) / samples_per_edge;
      out.push_back({e.id, x, t, edge_profile_smooth(graph, trains, e.id, x, t, p)});
    }
  }
  return out;
}

inline nlohmann::json trains_to_json(const SegmentedGraph& graph,
                                     const TrainStore& trains) {
  nlohmann::json out = nlohmann::json::array();
  for (const Edge& e : graph.edges()) {
    for (std::uint32_t j = 0; j < graph.segments_per_edge(); ++j) {
      const SpikeTrain& train = trains.at(graph.segment_index(e.id, j));
      if (train.empty()) continue;
      out.push_back({{"edge", e.id}, {"segment", j}, {"times", train.times()}});
    }
  }
  return out;
}

inline void trains_from_json(const nlohmann::json& j, const SegmentedGraph& graph,
                             TrainStore& trains) {
  trains.reset(graph.total_segments());
  for (const auto& entry : j) {
    const auto e = entry.at("edge").get<EdgeId>();
    const auto seg = entry.at("segment").get<std::uint32_t>();
    if (e >= graph.edge_count() || seg >= graph.segments_per_edge())
      throw std::invalid_argument("trains json: segment out of range");
    trains.at(graph.segment_index(e, seg))
        .assign(entry.at("times").get<std::vector<double>>());
  }
}

}  // namespace antmig
