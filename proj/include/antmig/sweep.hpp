#pragma once

// Sweep harness: one migration run per (radius, resolution, lambda, seed)
// cell, aggregated per cell across seeds. Cells are independent and execute
// on a small thread pool; rows keep grid order regardless of scheduling.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "antmig/engine.hpp"
#include "antmig/io.hpp"
#include "antmig/metrics.hpp"

namespace antmig {

struct GraphSpec {
  std::uint32_t node_count = 200;
  std::uint32_t edge_count = 4000;
  double plane_width = 1000.0;   // mm
  double plane_height = 1000.0;  // mm

  void validate() const {
    if (node_count < 2) throw std::invalid_argument("graph: node_count must be >= 2");
    const std::uint64_t max_edges =
        static_cast<std::uint64_t>(node_count) * (node_count - 1) / 2;
    if (edge_count < node_count - 1 || edge_count > max_edges)
      throw std::invalid_argument(
          "graph: edge_count must lie in [node_count-1, node_count*(node_count-1)/2]");
    if (!(plane_width > 0) || !(plane_height > 0))
      throw std::invalid_argument("graph: plane bounds must be positive");
  }
};

// Everything one run needs besides the swept values.
struct SimSetup {
  GraphSpec graph;
  std::uint32_t resolution = 10;
  PheromoneParams pheromone;
  ColonyConfig colony;
  TargetConfig target;

  void validate() const {
    graph.validate();
    pheromone.validate();
    colony.validate();
    target.validate();
  }
};

struct SweepGrid {
  std::vector<double> radii;
  std::vector<std::uint32_t> resolutions;
  std::vector<double> lambdas;
  std::vector<std::uint64_t> seeds;

  void validate() const {
    if (radii.empty() || resolutions.empty() || lambdas.empty() || seeds.empty())
      throw std::invalid_argument("sweep grid: all lists must be nonempty");
    for (double r : radii)
      if (!(r > 0)) throw std::invalid_argument("sweep grid: radii must be > 0");
    for (double l : lambdas)
      if (!(l > 0)) throw std::invalid_argument("sweep grid: lambdas must be > 0");
  }

  std::size_t cell_count() const {
    return radii.size() * resolutions.size() * lambdas.size() * seeds.size();
  }
};

// Build the simulation for one run: seeded graph, farthest-pair nests,
// requested segmentation, spawned colony.
inline SimState build_run(const SimSetup& setup, std::uint64_t seed) {
  setup.validate();
  SegmentedGraph graph =
      generate_graph(setup.graph.node_count, setup.graph.edge_count,
                     setup.graph.plane_width, setup.graph.plane_height, seed);
  segment_edges(graph, setup.resolution);
  const auto [initial, target_node] = farthest_node_pair(graph);
  ColonyConfig colony = setup.colony;
  colony.initial_nest = initial;
  TargetConfig target = setup.target;
  target.node = target_node;
  return make_sim(std::move(graph), setup.pheromone, colony, target, seed);
}

struct SweepResult {
  std::vector<RunMetrics> rows;        // grid order: radius, resolution, lambda, seed
  std::vector<std::string> failures;   // one message per failed cell, if any
};

inline SweepResult run_sweep(const SweepGrid& grid, const SimSetup& base,
                             unsigned max_threads = 0) {
  grid.validate();
  base.validate();

  struct Cell {
    double r_n;
    std::uint32_t resolution;
    double lambda;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  cells.reserve(grid.cell_count());
  for (double r : grid.radii)
    for (std::uint32_t res : grid.resolutions)
      for (double lambda : grid.lambdas)
        for (std::uint64_t seed : grid.seeds) cells.push_back({r, res, lambda, seed});

  SweepResult result;
  result.rows.assign(cells.size(), {});
  std::vector<std::string> errors(cells.size());

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& c = cells[i];
      RunMetrics row;
      row.r_n = c.r_n;
      row.resolution = c.resolution;
      row.lambda = c.lambda;
      row.seed = c.seed;
      try {
        SimSetup setup = base;
        setup.resolution = c.resolution;
        setup.target.r_n = c.r_n;
        setup.target.lambda = c.lambda;
        SimState sim = build_run(setup, c.seed);
        const RunResult run = run_migration(sim);
        row.rn_rate = run.rn_rate;
        row.converged = run.converged;
        if (run.converged) row.convergence_ticks = run.ticks;
      } catch (const std::exception& ex) {
        std::ostringstream msg;
        msg << "cell r_n=" << c.r_n << " resolution=" << c.resolution
            << " lambda=" << c.lambda << " seed=" << c.seed << ": " << ex.what();
        errors[i] = msg.str();
      }
      result.rows[i] = row;
    }
  };

  unsigned n_threads = max_threads ? max_threads : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(n_threads, cells.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (auto& e : errors)
    if (!e.empty()) result.failures.push_back(std::move(e));
  return result;
}

struct CellAggregate {
  double r_n = 0.0;
  std::uint32_t resolution = 0;
  double lambda = 0.0;
  std::size_t seeds = 0;
  double mean_rn_rate = 0.0;
  double stddev_rn_rate = 0.0;
  std::size_t converged_runs = 0;
  double mean_convergence_ticks = 0.0;  // over converged runs only
};

inline std::vector<CellAggregate> aggregate_cells(const std::vector<RunMetrics>& rows) {
  std::vector<CellAggregate> cells;
  const auto find_cell = [&](const RunMetrics& m) -> CellAggregate& {
    for (auto& c : cells)
      if (c.r_n == m.r_n && c.resolution == m.resolution && c.lambda == m.lambda)
        return c;
    cells.push_back({m.r_n, m.resolution, m.lambda, 0, 0, 0, 0, 0});
    return cells.back();
  };
  // two passes: means, then sample stddev
  for (const RunMetrics& m : rows) {
    CellAggregate& c = find_cell(m);
    c.seeds += 1;
    c.mean_rn_rate += m.rn_rate;
    if (m.converged) {
      c.converged_runs += 1;
      c.mean_convergence_ticks += static_cast<double>(*m.convergence_ticks);
    }
  }
  for (auto& c : cells) {
    c.mean_rn_rate /= static_cast<double>(c.seeds);
    if (c.converged_runs > 0)
      c.mean_convergence_ticks /= static_cast<double>(c.converged_runs);
  }
  for (const RunMetrics& m : rows) {
    CellAggregate& c = find_cell(m);
    const double d = m.rn_rate - c.mean_rn_rate;
    c.stddev_rn_rate += d * d;
  }
  for (auto& c : cells) {
    c.stddev_rn_rate =
        c.seeds > 1 ? std::sqrt(c.stddev_rn_rate / static_cast<double>(c.seeds - 1))
                    : 0.0;
  }
  return cells;
}

inline std::string metrics_csv(const std::vector<RunMetrics>& rows) {
  CsvBuilder csv({"r_n_mm", "resolution", "lambda", "seed", "rn_rate",
                  "convergence_ticks", "converged"});
  for (const RunMetrics& m : rows) {
    csv.append_row({format_double(m.r_n), std::to_string(m.resolution),
                    format_double(m.lambda), std::to_string(m.seed),
                    format_double(m.rn_rate),
                    m.convergence_ticks ? std::to_string(*m.convergence_ticks) : "",
                    m.converged ? "true" : "false"});
  }
  return csv.str();
}

inline std::string aggregate_csv(const std::vector<CellAggregate>& cells) {
  CsvBuilder csv({"r_n_mm", "resolution", "lambda", "seeds", "mean_rn_rate",
                  "stddev_rn_rate", "converged_runs", "mean_convergence_ticks"});
  for (const CellAggregate& c : cells) {
    csv.append_row({format_double(c.r_n), std::to_string(c.resolution),
                    format_double(c.lambda), std::to_string(c.seeds),
                    format_double(c.mean_rn_rate), format_double(c.stddev_rn_rate),
                    std::to_string(c.converged_runs),
                    c.converged_runs ? format_double(c.mean_convergence_ticks) : ""});
  }
  return csv.str();
}

// lambda x radius surface of mean rn rates (seeds and resolutions pooled;
// meant for single-resolution grids).
inline std::string contour_csv(const std::vector<RunMetrics>& rows) {
  struct Key {
    double lambda;
    double r_n;
    double sum = 0.0;
    std::size_t n = 0;
  };
  std::vector<Key> keys;
  for (const RunMetrics& m : rows) {
    Key* found = nullptr;
    for (auto& k : keys)
      if (k.lambda == m.lambda && k.r_n == m.r_n) {
        found = &k;
        break;
      }
    if (!found) {
      keys.push_back({m.lambda, m.r_n});
      found = &keys.back();
    }
    found->sum += m.rn_rate;
    found->n += 1;
  }
  CsvBuilder csv({"lambda", "r_n_mm", "mean_rn_rate"});
  for (const Key& k : keys)
    csv.append_row({format_double(k.lambda), format_double(k.r_n),
                    format_double(k.sum / static_cast<double>(k.n))});
  return csv.str();
}

inline std::string histogram_csv(const DistanceHistogram& h) {
  CsvBuilder csv({"bin_lo_mm", "bin_hi_mm", "count"});
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    csv.append_row({format_double(h.bin_width * static_cast<double>(k)),
                    format_double(h.bin_width * static_cast<double>(k + 1)),
                    std::to_string(h.counts[k])});
  }
  return csv.str();
}

inline std::string field_csv(const std::vector<FieldSample>& samples) {
  CsvBuilder csv({"edge_id", "x_mm", "t", "value"});
  for (const FieldSample& s : samples) {
    csv.append_row({std::to_string(s.edge), format_double(s.x), format_double(s.t),
                    format_double(s.value)});
  }
  return csv.str();
}

}  // namespace antmig
