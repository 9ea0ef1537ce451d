// antmig command-line driver: single migrations (`run`), experiment grids
// (`sweep`), and snapshot continuation (`replay`).

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "antmig/antmig.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& raw, const char* flag) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : raw) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  for (const auto& p : parts)
    if (p.empty())
      throw antmig::ConfigError(std::string(flag) + ": empty list entry");
  return parts;
}

std::vector<double> parse_doubles(const std::string& raw, const char* flag) {
  std::vector<double> out;
  for (const auto& p : split_list(raw, flag)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(p, &used));
      if (used != p.size()) throw std::invalid_argument(p);
    } catch (const std::exception&) {
      throw antmig::ConfigError(std::string(flag) + ": bad number '" + p + "'");
    }
  }
  return out;
}

std::vector<std::uint32_t> parse_u32s(const std::string& raw, const char* flag) {
  std::vector<std::uint32_t> out;
  for (const auto& p : split_list(raw, flag)) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(p, &used);
      if (used != p.size()) throw std::invalid_argument(p);
      out.push_back(static_cast<std::uint32_t>(v));
    } catch (const std::exception&) {
      throw antmig::ConfigError(std::string(flag) + ": bad integer '" + p + "'");
    }
  }
  return out;
}

// Seeds accept plain values and inclusive ranges: "1,5,7..10".
std::vector<std::uint64_t> parse_seeds(const std::string& raw, const char* flag) {
  std::vector<std::uint64_t> out;
  for (const auto& p : split_list(raw, flag)) {
    const auto dots = p.find("..");
    try {
      if (dots == std::string::npos) {
        std::size_t used = 0;
        out.push_back(std::stoull(p, &used));
        if (used != p.size()) throw std::invalid_argument(p);
      } else {
        const std::uint64_t lo = std::stoull(p.substr(0, dots));
        const std::uint64_t hi = std::stoull(p.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument(p);
        for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
      }
    } catch (const std::exception&) {
      throw antmig::ConfigError(std::string(flag) + ": bad seed entry '" + p + "'");
    }
  }
  return out;
}

std::string resolve_out_dir(const std::string& flag_value,
                            const std::string& config_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("ANTMIG_OUT"); env && *env) return env;
  return config_value;
}

class TrajectoryLog {
 public:
  explicit TrajectoryLog(std::uint64_t every)
      : every_(every),
        csv_({"tick", "ant_id", "edge_id", "segment_j", "offset_mm", "node_id"}) {}

  void observe(const antmig::SimState& s) {
    if (s.clock % every_ != 0 && s.clock != s.target.max_ticks) return;
    append(s);
  }

  void finish(const antmig::SimState& s) {
    if (s.clock != last_logged_) append(s);
  }

  const std::string& str() const { return csv_.str(); }

 private:
  void append(const antmig::SimState& s) {
    last_logged_ = s.clock;
    for (const antmig::Ant& ant : s.colony) {
      if (ant.at_node()) {
        csv_.append_row({std::to_string(s.clock), std::to_string(ant.id), "", "", "",
                         std::to_string(ant.node())});
      } else {
        const auto& pos = ant.segment_pos();
        csv_.append_row({std::to_string(s.clock), std::to_string(ant.id),
                         std::to_string(pos.ref.edge), std::to_string(pos.ref.ordinal),
                         antmig::format_double(pos.offset), ""});
      }
    }
  }

  std::uint64_t every_;
  std::uint64_t last_logged_ = ~std::uint64_t{0};
  antmig::CsvBuilder csv_;
};

std::string deposits_csv(const std::vector<antmig::DepositLogEntry>& log) {
  antmig::CsvBuilder csv({"tick", "edge", "segment", "time"});
  for (const auto& d : log) {
    csv.append_row({std::to_string(d.tick), std::to_string(d.edge),
                    std::to_string(d.ordinal), antmig::format_double(d.time)});
  }
  return csv.str();
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
            const std::string& out_flag) {
  antmig::RunConfig cfg = antmig::load_config(config_path);
  if (seed_flag) cfg.seed = *seed_flag;
  cfg.output_dir = resolve_out_dir(out_flag, cfg.output_dir);
  cfg.validate();

  antmig::SimState sim = antmig::build_run(cfg.setup, cfg.seed);
  const fs::path out(cfg.output_dir);

  const std::string graph_json = antmig::graph_to_json(sim.graph).dump();
  nlohmann::json manifest = {{"format", "antmig-manifest-v1"},
                             {"config", antmig::config_to_json(cfg)},
                             {"seed", cfg.seed},
                             {"graph_blob_sha1", antmig::git_blob_sha1(graph_json)},
                             {"initial_nest", sim.colony_cfg.initial_nest},
                             {"target_node", sim.target.node},
                             {"reach_radius_mm", sim.reach_radius}};
  antmig::atomic_write_file(out / "manifest.json", manifest.dump(2) + "\n");

  std::vector<antmig::DepositLogEntry> deposits;
  TrajectoryLog trajectory(cfg.trajectory_sample_every);
  const antmig::RunResult run = antmig::run_migration(
      sim, &deposits,
      [&](const antmig::SimState& s) { trajectory.observe(s); });
  trajectory.finish(sim);

  antmig::RunMetrics row;
  row.r_n = sim.target.r_n;
  row.resolution = cfg.setup.resolution;
  row.lambda = sim.target.lambda;
  row.seed = cfg.seed;
  row.rn_rate = run.rn_rate;
  row.converged = run.converged;
  if (run.converged) row.convergence_ticks = run.ticks;

  antmig::atomic_write_file(out / "metrics.csv", antmig::metrics_csv({row}));
  antmig::atomic_write_file(out / "deposits.csv", deposits_csv(deposits));
  antmig::atomic_write_file(out / "trajectory.csv", trajectory.str());
  antmig::atomic_write_file(out / "snapshot.json",
                            antmig::snapshot_to_json(sim).dump() + "\n");
  const auto samples =
      antmig::sample_field(sim.graph, sim.trains, static_cast<double>(sim.clock),
                           sim.params, cfg.field_samples_per_edge);
  antmig::atomic_write_file(out / "field_samples.csv", antmig::field_csv(samples));
  const auto hist = antmig::final_distribution_histogram(
      sim.colony, sim.graph, sim.target.node, cfg.histogram_bin_mm);
  antmig::atomic_write_file(out / "histogram.csv", antmig::histogram_csv(hist));

  std::cout << "converged=" << (run.converged ? "true" : "false")
            << " ticks=" << run.ticks
            << " rn_rate=" << antmig::format_double(run.rn_rate) << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
              const std::string& out_flag,
              const std::optional<std::string>& radii_flag,
              const std::optional<std::string>& resolutions_flag,
              const std::optional<std::string>& lambdas_flag,
              const std::optional<std::string>& seeds_flag) {
  antmig::RunConfig cfg = antmig::load_config(config_path);
  if (seed_flag) cfg.seed = *seed_flag;
  cfg.output_dir = resolve_out_dir(out_flag, cfg.output_dir);
  cfg.validate();

  antmig::SweepGrid grid;
  grid.radii = radii_flag ? parse_doubles(*radii_flag, "--radii")
                          : std::vector<double>{cfg.setup.target.r_n};
  grid.resolutions = resolutions_flag
                         ? parse_u32s(*resolutions_flag, "--resolutions")
                         : std::vector<std::uint32_t>{cfg.setup.resolution};
  grid.lambdas = lambdas_flag ? parse_doubles(*lambdas_flag, "--lambdas")
                              : std::vector<double>{cfg.setup.target.lambda};
  grid.seeds = seeds_flag ? parse_seeds(*seeds_flag, "--seeds")
                          : std::vector<std::uint64_t>{cfg.seed};
  grid.validate();

  const antmig::SweepResult result = antmig::run_sweep(grid, cfg.setup);
  const fs::path out(cfg.output_dir);
  antmig::atomic_write_file(out / "metrics.csv", antmig::metrics_csv(result.rows));
  antmig::atomic_write_file(out / "aggregate.csv",
                            antmig::aggregate_csv(antmig::aggregate_cells(result.rows)));
  antmig::atomic_write_file(out / "contour.csv", antmig::contour_csv(result.rows));

  std::size_t converged = 0;
  for (const auto& r : result.rows) converged += r.converged ? 1 : 0;
  std::cout << "cells=" << result.rows.size() << " converged=" << converged
            << " failures=" << result.failures.size() << "\n";
  for (const auto& f : result.failures) std::cerr << "sweep failure: " << f << "\n";
  return 0;
}

int cmd_replay(const std::string& snapshot_path, std::uint64_t ticks,
               const std::string& out_flag) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(antmig::read_file(snapshot_path));
  } catch (const nlohmann::json::exception& ex) {
    throw std::runtime_error(std::string("snapshot parse error: ") + ex.what());
  }
  antmig::SimState sim = antmig::snapshot_from_json(j);
  for (std::uint64_t i = 0; i < ticks; ++i) antmig::step(sim);
  const std::string out =
      out_flag.empty() ? std::string("snapshot_replayed.json") : out_flag;
  antmig::atomic_write_file(out, antmig::snapshot_to_json(sim).dump() + "\n");
  std::cout << "replayed ticks=" << ticks << " clock=" << sim.clock << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"antmig: self-organizing ant colony nest migration simulator"};
  app.require_subcommand(1);

  std::string config_path, out_flag;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::string> radii_flag, resolutions_flag, lambdas_flag, seeds_flag;
  std::string snapshot_path;
  std::uint64_t replay_ticks = 0;

  auto* run = app.add_subcommand("run", "execute one migration run");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--seed", seed_flag, "root seed override");
  run->add_option("--out", out_flag, "output directory override");

  auto* sweep = app.add_subcommand("sweep", "run a (radius x resolution x lambda x seed) grid");
  sweep->add_option("--config", config_path, "JSON config file")->required();
  sweep->add_option("--seed", seed_flag, "root seed override");
  sweep->add_option("--out", out_flag, "output directory override");
  sweep->add_option("--radii", radii_flag, "comma list of convergence radii (mm)");
  sweep->add_option("--resolutions", resolutions_flag, "comma list of segmentation resolutions");
  sweep->add_option("--lambdas", lambdas_flag, "comma list of scale factors (1/mm)");
  sweep->add_option("--seeds", seeds_flag, "comma list of seeds; ranges like 1..10");

  auto* replay = app.add_subcommand("replay", "resume a snapshot for N ticks");
  replay->add_option("--snapshot", snapshot_path, "snapshot JSON file")->required();
  replay->add_option("--ticks", replay_ticks, "ticks to simulate")->required();
  replay->add_option("--out", out_flag, "output snapshot path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, seed_flag, out_flag);
    if (sweep->parsed())
      return cmd_sweep(config_path, seed_flag, out_flag, radii_flag,
                       resolutions_flag, lambdas_flag, seeds_flag);
    if (replay->parsed()) return cmd_replay(snapshot_path, replay_ticks, out_flag);
  } catch (const antmig::ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
