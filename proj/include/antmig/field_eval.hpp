#pragma once

// Engine-side accelerator for repeated field queries against growing spike
// trains. Per-spike decayed sums use block-local prefix sums of exp(t_i/delta)
// (blocks bound the exponent so nothing overflows), giving O(log n) queries
// instead of a loop over the window.
//
// Cache content is a pure function of (train times, delta), extended
// append-only, so a run resumed from a snapshot reproduces bit-identical
// values. One evaluator belongs to one thread.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "antmig/graph.hpp"
#include "antmig/pheromone.hpp"

namespace antmig {

class FieldEvaluator {
 public:
  FieldEvaluator(const SegmentedGraph& graph, const TrainStore& trains,
                 const PheromoneParams& params)
      : graph_(&graph), trains_(&trains), params_(params) {
    caches_.resize(trains.size());
  }

  const PheromoneParams& params() const { return params_; }

  // Exact segment value at time t (the renewal comparison).
  double segment_value(std::size_t seg_index, double t) {
    const SpikeTrain& train = trains_->at(seg_index);
    if (train.empty()) return 0.0;
    const auto& times = train.times();
    const double window_lo = t - params_.prune_horizon * params_.delta;
    const auto lo = static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), window_lo) - times.begin());
    const auto hi = static_cast<std::size_t>(
        std::upper_bound(times.begin(), times.end(), t) - times.begin());
    if (!params_.per_spike_decay) {
      return params_.rho_star * std::exp(-t / params_.delta) *
             static_cast<double>(hi - lo);
    }
    TrainCache& cache = ensure(seg_index);
    return params_.rho_star * (decayed_prefix(cache, hi, t) -
                               decayed_prefix(cache, lo, t));
  }

  // Smooth profile of one edge at (x, t); matches edge_profile_smooth up to
  // summation order.
  double smooth_value(EdgeId e, double x, double t) {
    const auto& segs = graph_->segments(e);
    double value = 0.0;
    for (std::uint32_t j = 0; j < segs.size(); ++j) {
      const std::size_t idx = graph_->segment_index(e, j);
      const SpikeTrain& train = trains_->at(idx);
      if (train.empty()) continue;
      const double bracket = heaviside_smooth(x, segs[j].start, params_.k_x) -
                             heaviside_smooth(x, segs[j].end, params_.k_x);
      value += temporal_sum(idx, t) * bracket;
    }
    return params_.rho_star * value;
  }

 private:
  struct TrainCache {
    // Per spike: prefix sums of exp((t_i - base)/delta) within blocks.
    std::vector<double> pref;
    std::vector<std::size_t> block_first;
    std::vector<double> block_base;
    std::size_t covered = 0;  // spikes folded into the cache so far
  };

  static constexpr double kBlockSpanDeltas = 400.0;  // exponent stays < 400

  TrainCache& ensure(std::size_t seg_index) {
    TrainCache& cache = caches_[seg_index];
    const auto& times = trains_->at(seg_index).times();
    for (; cache.covered < times.size(); ++cache.covered) {
      const double t = times[cache.covered];
      const bool new_block =
          cache.block_first.empty() ||
          (t - cache.block_base.back()) / params_.delta > kBlockSpanDeltas;
      if (new_block) {
        cache.block_first.push_back(cache.covered);
        cache.block_base.push_back(t);
      }
      const double w = std::exp((t - cache.block_base.back()) / params_.delta);
      const bool first_in_block = cache.block_first.back() == cache.covered;
      cache.pref.push_back(first_in_block ? w : cache.pref.back() + w);
    }
    return cache;
  }

  // Sum over spikes [0, end) of exp(-(t - t_i)/delta).
  double decayed_prefix(const TrainCache& cache, std::size_t end, double t) const {
    double sum = 0.0;
    for (std::size_t b = 0; b < cache.block_first.size(); ++b) {
      const std::size_t first = cache.block_first[b];
      if (first >= end) break;
      const std::size_t last = b + 1 < cache.block_first.size()
                                   ? std::min(end, cache.block_first[b + 1])
                                   : end;
      const double age = (t - cache.block_base[b]) / params_.delta;
      if (age > 800.0) continue;  // whole block decayed beneath resolution
      sum += std::exp(-age) * cache.pref[last - 1];
    }
    return sum;
  }

  // Temporal sum of one segment: saturated spikes in bulk, the handful near
  // the logistic transition explicitly.
  double temporal_sum(std::size_t seg_index, double t) {
    const auto& times = trains_->at(seg_index).times();
    const double gap = 40.0 / params_.k_t;
    const double window_lo = t - params_.prune_horizon * params_.delta;
    const auto lo = static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), window_lo) - times.begin());
    const auto mid = static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), t - gap) - times.begin());
    double sum = 0.0;
    if (!params_.per_spike_decay) {
      sum = std::exp(-t / params_.delta) * static_cast<double>(mid - lo);
      for (std::size_t i = mid; i < times.size(); ++i) {
        const double dt = t - times[i];
        if (-dt > gap) break;
        sum += std::exp(-t / params_.delta) *
               heaviside_smooth(dt, 0.0, params_.k_t);
      }
      return sum;
    }
    TrainCache& cache = ensure(seg_index);
    sum = decayed_prefix(cache, mid, t) - decayed_prefix(cache, lo, t);
    const double rate = params_.k_t - 1.0 / params_.delta;
    const double future_gap =
        rate > 0 ? 40.0 / rate : std::numeric_limits<double>::infinity();
    for (std::size_t i = mid; i < times.size(); ++i) {
      const double dt = t - times[i];
      if (-dt > future_gap) break;
      sum += std::exp(-dt / params_.delta) * heaviside_smooth(dt, 0.0, params_.k_t);
    }
    return sum;
  }

  const SegmentedGraph* graph_;
  const TrainStore* trains_;
  PheromoneParams params_;
  std::vector<TrainCache> caches_;
};

}  // namespace antmig
