#pragma once

// Convergence metrics: the r_n rate (fraction of ants within a radius of the
// target node), convergence time, and the radial distance histogram of a
// final colony state.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "antmig/colony.hpp"
#include "antmig/graph.hpp"

namespace antmig {

// Fraction of ants whose Euclidean distance to the target node is < r_n.
inline double rn_convergence_rate(const std::vector<Ant>& colony,
                                  const SegmentedGraph& graph, NodeId target,
                                  double r_n) {
  if (colony.empty()) throw std::invalid_argument("rn rate: empty colony");
  if (!(r_n > 0)) throw std::invalid_argument("rn rate: r_n must be > 0");
  const Vec2 goal = graph.node(target).pos;
  std::size_t inside = 0;
  for (const Ant& ant : colony) {
    if (distance(ant_position(ant, graph), goal) < r_n) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(colony.size());
}

// First tick at which the convergence check held; nothing if it never did.
inline std::optional<std::uint64_t> convergence_time(
    const std::vector<bool>& history) {
  for (std::size_t tick = 0; tick < history.size(); ++tick)
    if (history[tick]) return static_cast<std::uint64_t>(tick);
  return std::nullopt;
}

struct DistanceHistogram {
  double bin_width = 0.0;
  std::vector<std::uint64_t> counts;  // bin k covers [k*w, (k+1)*w)

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }
};

inline DistanceHistogram final_distribution_histogram(
    const std::vector<Ant>& colony, const SegmentedGraph& graph, NodeId target,
    double bin_width) {
  if (!(bin_width > 0)) throw std::invalid_argument("histogram: bin_width must be > 0");
  const Vec2 goal = graph.node(target).pos;
  DistanceHistogram h;
  h.bin_width = bin_width;
  std::vector<double> distances;
  distances.reserve(colony.size());
  double max_d = 0.0;
  for (const Ant& ant : colony) {
    const double d = distance(ant_position(ant, graph), goal);
    distances.push_back(d);
    max_d = std::max(max_d, d);
  }
  h.counts.assign(static_cast<std::size_t>(max_d / bin_width) + 1, 0);
  for (double d : distances) {
    auto bin = static_cast<std::size_t>(d / bin_width);
    if (bin >= h.counts.size()) bin = h.counts.size() - 1;  // d == max edge case
    ++h.counts[bin];
  }
  return h;
}

// One row of a sweep result.
struct RunMetrics {
  double r_n = 0.0;
  std::uint32_t resolution = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double rn_rate = 0.0;
  std::optional<std::uint64_t> convergence_ticks;
  bool converged = false;
};

}  // namespace antmig
