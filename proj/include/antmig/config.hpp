#pragma once

// Run configuration: one JSON document holding every tunable. Loading is
// strict (unknown keys rejected, every numeric constraint re-validated with
// a field-path message); emission is canonical so load -> emit -> load is
// the identity on normalized documents.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "antmig/sweep.hpp"

namespace antmig {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  SimSetup setup;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::uint32_t field_samples_per_edge = 8;
  double histogram_bin_mm = 10.0;
  std::uint64_t trajectory_sample_every = 1;  // log every Nth tick

  void validate() const {
    try {
      setup.graph.validate();
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("graph: ") + strip_prefix(ex.what()));
    }
    try {
      setup.pheromone.validate();
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("pheromone: ") + strip_prefix(ex.what()));
    }
    try {
      setup.colony.validate();
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("colony: ") + strip_prefix(ex.what()));
    }
    try {
      setup.target.validate();
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("target: ") + strip_prefix(ex.what()));
    }
    if (field_samples_per_edge == 0)
      throw ConfigError("field_samples_per_edge: must be >= 1");
    if (!(histogram_bin_mm > 0)) throw ConfigError("histogram_bin_mm: must be > 0");
    if (trajectory_sample_every == 0)
      throw ConfigError("trajectory_sample_every: must be >= 1");
    if (output_dir.empty()) throw ConfigError("output_dir: must not be empty");
  }

 private:
  // Module validators prefix messages with their own section name; drop it
  // so the field path appears exactly once.
  static std::string strip_prefix(std::string msg) {
    const auto colon = msg.find(": ");
    return colon == std::string::npos ? msg : msg.substr(colon + 2);
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::vector<std::string>& known,
                                const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const auto& k : known) ok = ok || k == key;
    if (!ok)
      throw ConfigError("unknown key '" + (path.empty() ? key : path + "." + key) +
                        "'");
  }
}

template <typename T>
T get_field(const nlohmann::json& obj, const std::string& path,
            const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("field '" + (path.empty() ? key : path + "." + key) +
                      "' has the wrong type");
  }
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  detail::reject_unknown_keys(
      j,
      {"graph", "resolution", "pheromone", "colony", "target", "seed",
       "output_dir", "field_samples_per_edge", "histogram_bin_mm",
       "trajectory_sample_every"},
      "");
  RunConfig cfg;

  if (j.contains("graph")) {
    const auto& g = j.at("graph");
    detail::reject_unknown_keys(
        g, {"node_count", "edge_count", "plane_width_mm", "plane_height_mm"},
        "graph");
    cfg.setup.graph.node_count =
        detail::get_field<std::uint32_t>(g, "graph", "node_count", cfg.setup.graph.node_count);
    cfg.setup.graph.edge_count =
        detail::get_field<std::uint32_t>(g, "graph", "edge_count", cfg.setup.graph.edge_count);
    cfg.setup.graph.plane_width = detail::get_field<double>(
        g, "graph", "plane_width_mm", cfg.setup.graph.plane_width);
    cfg.setup.graph.plane_height = detail::get_field<double>(
        g, "graph", "plane_height_mm", cfg.setup.graph.plane_height);
  }

  cfg.setup.resolution =
      detail::get_field<std::uint32_t>(j, "", "resolution", cfg.setup.resolution);

  if (j.contains("pheromone")) {
    const auto& p = j.at("pheromone");
    detail::reject_unknown_keys(
        p, {"rho_star", "delta", "k_t", "k_x", "per_spike_decay", "prune_horizon"},
        "pheromone");
    auto& pp = cfg.setup.pheromone;
    pp.rho_star = detail::get_field<double>(p, "pheromone", "rho_star", pp.rho_star);
    pp.delta = detail::get_field<double>(p, "pheromone", "delta", pp.delta);
    pp.k_t = detail::get_field<double>(p, "pheromone", "k_t", pp.k_t);
    pp.k_x = detail::get_field<double>(p, "pheromone", "k_x", pp.k_x);
    pp.per_spike_decay =
        detail::get_field<bool>(p, "pheromone", "per_spike_decay", pp.per_spike_decay);
    pp.prune_horizon =
        detail::get_field<double>(p, "pheromone", "prune_horizon", pp.prune_horizon);
  }

  if (j.contains("colony")) {
    const auto& c = j.at("colony");
    detail::reject_unknown_keys(
        c, {"ant_count", "r_i", "eta", "v0", "top_k", "reach_radius"}, "colony");
    auto& cc = cfg.setup.colony;
    cc.ant_count =
        detail::get_field<std::uint32_t>(c, "colony", "ant_count", cc.ant_count);
    cc.r_i = detail::get_field<double>(c, "colony", "r_i", cc.r_i);
    cc.eta = detail::get_field<double>(c, "colony", "eta", cc.eta);
    cc.v0 = detail::get_field<double>(c, "colony", "v0", cc.v0);
    cc.top_k = detail::get_field<std::uint32_t>(c, "colony", "top_k", cc.top_k);
    if (c.contains("reach_radius") && !c.at("reach_radius").is_null())
      cc.reach_radius =
          detail::get_field<double>(c, "colony", "reach_radius", 0.0);
  }

  if (j.contains("target")) {
    const auto& t = j.at("target");
    detail::reject_unknown_keys(
        t, {"lambda", "threshold", "r_n", "max_ticks", "source_enabled"}, "target");
    auto& tc = cfg.setup.target;
    tc.lambda = detail::get_field<double>(t, "target", "lambda", tc.lambda);
    tc.threshold = detail::get_field<double>(t, "target", "threshold", tc.threshold);
    tc.r_n = detail::get_field<double>(t, "target", "r_n", tc.r_n);
    tc.max_ticks =
        detail::get_field<std::uint64_t>(t, "target", "max_ticks", tc.max_ticks);
    tc.source_enabled =
        detail::get_field<bool>(t, "target", "source_enabled", tc.source_enabled);
  }

  cfg.seed = detail::get_field<std::uint64_t>(j, "", "seed", cfg.seed);
  cfg.output_dir = detail::get_field<std::string>(j, "", "output_dir", cfg.output_dir);
  cfg.field_samples_per_edge = detail::get_field<std::uint32_t>(
      j, "", "field_samples_per_edge", cfg.field_samples_per_edge);
  cfg.histogram_bin_mm =
      detail::get_field<double>(j, "", "histogram_bin_mm", cfg.histogram_bin_mm);
  cfg.trajectory_sample_every = detail::get_field<std::uint64_t>(
      j, "", "trajectory_sample_every", cfg.trajectory_sample_every);

  cfg.validate();
  return cfg;
}

// Canonical (normalized) document: every field materialized.
inline nlohmann::json config_to_json(const RunConfig& cfg) {
  const auto& s = cfg.setup;
  return {
      {"graph",
       {{"node_count", s.graph.node_count},
        {"edge_count", s.graph.edge_count},
        {"plane_width_mm", s.graph.plane_width},
        {"plane_height_mm", s.graph.plane_height}}},
      {"resolution", s.resolution},
      {"pheromone",
       {{"rho_star", s.pheromone.rho_star},
        {"delta", s.pheromone.delta},
        {"k_t", s.pheromone.k_t},
        {"k_x", s.pheromone.k_x},
        {"per_spike_decay", s.pheromone.per_spike_decay},
        {"prune_horizon", s.pheromone.prune_horizon}}},
      {"colony",
       {{"ant_count", s.colony.ant_count},
        {"r_i", s.colony.r_i},
        {"eta", s.colony.eta},
        {"v0", s.colony.v0},
        {"top_k", s.colony.top_k},
        {"reach_radius", s.colony.reach_radius
                             ? nlohmann::json(*s.colony.reach_radius)
                             : nlohmann::json(nullptr)}}},
      {"target",
       {{"lambda", s.target.lambda},
        {"threshold", s.target.threshold},
        {"r_n", s.target.r_n},
        {"max_ticks", s.target.max_ticks},
        {"source_enabled", s.target.source_enabled}}},
      {"seed", cfg.seed},
      {"output_dir", cfg.output_dir},
      {"field_samples_per_edge", cfg.field_samples_per_edge},
      {"histogram_bin_mm", cfg.histogram_bin_mm},
      {"trajectory_sample_every", cfg.trajectory_sample_every}};
}

inline RunConfig load_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("config parse error: ") + ex.what());
  }
  return config_from_json(j);
}

}  // namespace antmig
