#include "antmig/pheromone.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "antmig/graph.hpp"
#include "antmig/rng.hpp"

using namespace antmig;

namespace {

PheromoneParams default_params() {
  PheromoneParams p;
  p.rho_star = 1.0;
  p.delta = 50.0;
  p.k_t = 50.0;
  p.k_x = 50.0;
  return p;
}

SegmentedGraph one_edge(double length, std::uint32_t resolution) {
  std::vector<PlanarNode> nodes{{0, {0.0, 0.0}}, {1, {length, 0.0}}};
  std::vector<Edge> edges{{0, 0, 1, length}};
  return SegmentedGraph(std::move(nodes), std::move(edges), resolution);
}

// The worked example: a four-segment edge with deposits on segments 0, 2, 3
// at times 0, 4, 6 (ordinals for what the figures call s1, s3, s4).
struct WorkedEdge {
  SegmentedGraph graph = one_edge(8.0, 4);
  TrainStore trains;

  WorkedEdge() {
    trains.reset(graph.total_segments());
    trains.at(graph.segment_index(0, 0)).deposit(0.0);
    trains.at(graph.segment_index(0, 2)).deposit(4.0);
    trains.at(graph.segment_index(0, 3)).deposit(6.0);
  }
};

// Independent term-by-term oracle for the exact edge profile: loops every
// segment and spike with literal step-function arithmetic, no library calls.
double exact_profile_oracle(const SegmentedGraph& g, const TrainStore& trains,
                            EdgeId e, double x, double t,
                            const PheromoneParams& p) {
  const auto& segs = g.segments(e);
  double total = 0.0;
  for (std::uint32_t j = 0; j < segs.size(); ++j) {
    const double bracket = (x >= segs[j].start ? 1.0 : 0.0) -
                           (x >= segs[j].end ? 1.0 : 0.0);
    double temporal = 0.0;
    for (double ti : trains.at(g.segment_index(e, j)).times()) {
      if (t - ti > p.prune_horizon * p.delta) continue;
      if (!p.per_spike_decay) {
        temporal += std::exp(-t / p.delta) * (t >= ti ? 1.0 : 0.0);
      } else {
        temporal += std::exp(-(t - ti) / p.delta) * (t >= ti ? 1.0 : 0.0);
      }
    }
    total += p.rho_star * temporal * bracket;
  }
  return total;
}

}  // namespace

TEST(Heaviside, ExactStepClosedAtLeft) {
  EXPECT_EQ(heaviside_time(5, 3), 1.0);
  EXPECT_EQ(heaviside_time(2, 3), 0.0);
  EXPECT_EQ(heaviside_time(3, 3), 1.0);  // equality belongs to the upper branch
  EXPECT_EQ(heaviside_space(0.0, 0.0), 1.0);
}

TEST(Heaviside, SmoothLogisticValues) {
  EXPECT_DOUBLE_EQ(heaviside_smooth(2.0, 2.0, 10.0), 0.5);
  EXPECT_DOUBLE_EQ(heaviside_smooth(7.5, 7.5, 0.01), 0.5);
  // Direct evaluation oracle: 1/(1+e^-10).
  const double expect = 1.0 / (1.0 + std::exp(-10.0));
  EXPECT_NEAR(heaviside_smooth(1.0, 0.0, 10.0), expect, 1e-15);
  EXPECT_NEAR(heaviside_smooth(1.0, 0.0, 10.0), 0.9999546021312976, 1e-12);
  // Symmetry: logistic(-1) = 1 - logistic(+1).
  EXPECT_NEAR(heaviside_smooth(-1.0, 0.0, 10.0), 1.0 - expect, 1e-15);
  EXPECT_NEAR(heaviside_smooth(-1.0, 0.0, 10.0), 4.5397868702434395e-05, 1e-12);
}

TEST(Heaviside, SmoothStrictlyIncreasing) {
  double prev = -1.0;
  for (double v = -2.0; v <= 2.0; v += 0.05) {
    const double h = heaviside_smooth(v, 0.0, 8.0);
    EXPECT_GT(h, prev);
    prev = h;
  }
}

TEST(SpikeTrain, DepositKeepsOrderAndRejectsRegression) {
  SpikeTrain train;
  train.deposit(0.0);
  EXPECT_EQ(train.times(), std::vector<double>({0.0}));
  train.deposit(4.0);
  EXPECT_EQ(train.times(), std::vector<double>({0.0, 4.0}));
  EXPECT_THROW(train.deposit(2.0), std::logic_error);
  train.deposit(4.0);  // equal times allowed
  EXPECT_EQ(train.size(), 3u);
}

TEST(SegmentProfile, ClosedFormExamples) {
  PheromoneParams p = default_params();
  p.delta = 1.0;
  SpikeTrain train;
  train.deposit(0.0);
  EXPECT_DOUBLE_EQ(segment_profile(train, 0.0, p), 1.0);
  EXPECT_NEAR(segment_profile(train, std::log(2.0), p), 0.5, 1e-15);
  train.deposit(std::log(2.0));
  // Literal shared-envelope form: e^{-ln2} * (1 + 1) = 1.
  EXPECT_NEAR(segment_profile(train, std::log(2.0), p), 1.0, 1e-15);
}

TEST(SegmentProfile, BeforeFirstSpikeIsZero) {
  PheromoneParams p = default_params();
  SpikeTrain train;
  train.deposit(5.0);
  EXPECT_EQ(segment_profile(train, 4.999, p), 0.0);
  EXPECT_GT(segment_profile(train, 5.0, p), 0.0);
}

TEST(SegmentProfile, JumpLawAtDepositTime) {
  PheromoneParams p = default_params();
  p.delta = 3.0;
  SpikeTrain train;
  train.deposit(1.0);
  train.deposit(2.5);
  // Right value minus left limit at t_i equals rho* e^{-t_i/delta}.
  const double eps = 1e-9;
  const double jump = segment_profile(train, 2.5, p) - segment_profile(train, 2.5 - eps, p);
  EXPECT_NEAR(jump, p.rho_star * std::exp(-2.5 / p.delta), 1e-6);
}

TEST(SegmentProfile, PerSpikeJumpIsFullAmplitude) {
  PheromoneParams p = default_params();
  p.per_spike_decay = true;
  p.delta = 3.0;
  SpikeTrain train;
  train.deposit(1.0);
  train.deposit(2.5);
  const double eps = 1e-9;
  const double jump = segment_profile(train, 2.5, p) - segment_profile(train, 2.5 - eps, p);
  EXPECT_NEAR(jump, p.rho_star, 1e-6);
}

TEST(SegmentProfile, StrictDecayBetweenDeposits) {
  for (bool per_spike : {false, true}) {
    PheromoneParams p = default_params();
    p.per_spike_decay = per_spike;
    p.delta = 2.0;
    SpikeTrain train;
    train.deposit(0.0);
    train.deposit(1.0);
    double prev = segment_profile(train, 1.01, p);
    for (double t = 1.1; t < 5.0; t += 0.1) {
      const double cur = segment_profile(train, t, p);
      EXPECT_LT(cur, prev);
      prev = cur;
    }
  }
}

TEST(SegmentProfile, NoEvaporationNondecreasingAtDeposits) {
  PheromoneParams p = default_params();
  p.delta = 1e9;
  SpikeTrain train;
  double prev = 0.0;
  for (int k = 0; k < 100; ++k) {
    train.deposit(static_cast<double>(k));
    const double cur = segment_profile(train, static_cast<double>(k), p);
    EXPECT_GE(cur, prev);
    prev = cur;
  }
}

TEST(SegmentProfile, PruningDropsOnlyNegligibleMass) {
  PheromoneParams p = default_params();
  p.delta = 1.0;
  p.prune_horizon = 20.0;
  SpikeTrain train;
  train.deposit(0.0);
  train.deposit(30.0);
  // At t=30 the t=0 spike is 30 deltas old and pruned; its true contribution
  // e^{-30} is far below the documented e^{-20} rho* bound.
  const double value = segment_profile(train, 30.0, p);
  const double unpruned = p.rho_star * std::exp(-30.0 / p.delta) * 2.0;
  EXPECT_NEAR(value, p.rho_star * std::exp(-30.0), 1e-18);
  EXPECT_LT(std::abs(value - unpruned), std::exp(-20.0) * p.rho_star);
}

TEST(EdgeProfileExact, WorkedExampleUnvisitedSegmentIsZero) {
  WorkedEdge w;
  const PheromoneParams p = default_params();
  for (double t : {0.0, 1.0, 5.0, 9.0}) {
    EXPECT_EQ(edge_profile_exact(w.graph, w.trains, 0, 3.0, t, p), 0.0);  // inside s2
  }
}

TEST(EdgeProfileExact, WorkedExampleFirstSegmentAtDepositInstant) {
  WorkedEdge w;
  const PheromoneParams p = default_params();
  EXPECT_DOUBLE_EQ(edge_profile_exact(w.graph, w.trains, 0, 1.0, 0.0, p), 1.0);
}

TEST(EdgeProfileExact, WorkedExampleThirdSegmentHalfLife) {
  WorkedEdge w;
  const PheromoneParams p = default_params();
  // One spike at t=4; at t = 4 + delta*ln2 the envelope form gives
  // e^{-4/delta} * 0.5 relative to rho*.
  const double t = 4.0 + p.delta * std::log(2.0);
  const double got = edge_profile_exact(w.graph, w.trains, 0, 5.0, t, p);
  EXPECT_NEAR(got, std::exp(-4.0 / p.delta) * 0.5, 1e-12);
}

TEST(EdgeProfileExact, MatchesTermByTermOracleOnGrid) {
  WorkedEdge w;
  for (bool per_spike : {false, true}) {
    PheromoneParams p = default_params();
    p.per_spike_decay = per_spike;
    for (int xi = 0; xi < 20; ++xi) {
      const double x = 8.0 * (xi + 0.5) / 20.0;
      for (int tm = 0; tm < 10; ++tm) {
        const double t = 0.5 + tm;
        const double got = edge_profile_exact(w.graph, w.trains, 0, x, t, p);
        const double want = exact_profile_oracle(w.graph, w.trains, 0, x, t, p);
        if (want == 0.0) {
          EXPECT_EQ(got, 0.0);
        } else {
          EXPECT_NEAR(got, want, 1e-12 * std::abs(want));
        }
      }
    }
  }
}

TEST(EdgeProfileExact, OutOfRangeRejected) {
  WorkedEdge w;
  const PheromoneParams p = default_params();
  EXPECT_THROW(edge_profile_exact(w.graph, w.trains, 0, -0.1, 1.0, p),
               std::invalid_argument);
  EXPECT_THROW(edge_profile_exact(w.graph, w.trains, 0, 8.1, 1.0, p),
               std::invalid_argument);
}

TEST(EdgeProfileSmooth, MatchesExactAwayFromDiscontinuities) {
  WorkedEdge w;
  const PheromoneParams p = default_params();
  // Sample points at distance >= 0.5 from every boundary {0,2,4,6,8} and
  // every spike time {0,4,6}: agreement within 1e-6 per the logistic tails.
  for (double x : {0.7, 1.3, 2.6, 3.4, 4.7, 5.3, 6.6, 7.4}) {
    for (double t : {0.5, 1.5, 3.0, 5.0, 7.0, 9.5}) {
      const double exact = edge_profile_exact(w.graph, w.trains, 0, x, t, p);
      const double smooth = edge_profile_smooth(w.graph, w.trains, 0, x, t, p);
      EXPECT_NEAR(smooth, exact, 1e-6);
    }
  }
}

TEST(EdgeProfileSmooth, BoundaryBetweenVisitedAndCleanHalves) {
  WorkedEdge w;
  const PheromoneParams p = default_params();
  // x exactly on the s1|s2 boundary, long after t=0: the logistic bracket
  // midpoint halves the visited segment's value.
  const double t = 2.0;
  const double inside = edge_profile_exact(w.graph, w.trains, 0, 1.0, t, p);
  const double at_boundary = edge_profile_smooth(w.graph, w.trains, 0, 2.0, t, p);
  EXPECT_NEAR(at_boundary, 0.5 * inside, 1e-6);
}

TEST(EdgeProfileSmooth, EmptyTrainsGiveZeroEverywhere) {
  auto g = one_edge(10.0, 5);
  TrainStore trains(g.total_segments());
  const PheromoneParams p = default_params();
  for (double x : {0.0, 2.5, 9.9})
    for (double t : {0.0, 3.0, 100.0})
      EXPECT_EQ(edge_profile_smooth(g, trains, 0, x, t, p), 0.0);
}

// Exact/smooth agreement property: random trains, sample points kept at
// distance >= 5/k from every spike time and segment boundary, deviation
// bounded by 0.01 rho*. A point sitting at the minimum distance from a
// temporal AND a spatial discontinuity at once stacks two logistic tails
// (2 e^-5 ~ 0.013), so points with both axis minima under 7/k are skipped;
// per-axis the 1% bound keeps a ~33% margin (e^-5 ~ 0.0067).
TEST(EdgeProfileSmooth, ExactAgreementProperty) {
  Rng rng(2024);
  const PheromoneParams p = default_params();
  auto g = one_edge(10.0, 5);
  for (int trial = 0; trial < 20; ++trial) {
    TrainStore trains(g.total_segments());
    std::vector<double> spike_times;
    for (std::size_t s = 0; s < g.total_segments(); ++s) {
      // One spike per segment, well separated in time.
      const double t = rng.uniform(0.0, 8.0);
      bool clear = true;
      for (double other : spike_times) clear = clear && std::abs(t - other) > 0.5;
      if (!clear) continue;
      trains.at(s).deposit(t);
      spike_times.push_back(t);
    }
    const auto& segs = g.segments(0);
    int accepted = 0;
    while (accepted < 50) {
      const double x = rng.uniform(0.0, 10.0);
      const double t = rng.uniform(0.0, 12.0);
      double dt_min = 1e9, dx_min = 1e9;
      for (double ti : spike_times) dt_min = std::min(dt_min, std::abs(t - ti));
      for (const Segment& s : segs) {
        dx_min = std::min(dx_min, std::abs(x - s.start));
        dx_min = std::min(dx_min, std::abs(x - s.end));
      }
      if (dt_min < 5.0 / p.k_t || dx_min < 5.0 / p.k_x) continue;
      if (dt_min < 7.0 / p.k_t && dx_min < 7.0 / p.k_x) continue;  // stacked corner
      ++accepted;
      const double exact = edge_profile_exact(g, trains, 0, x, t, p);
      const double smooth = edge_profile_smooth(g, trains, 0, x, t, p);
      EXPECT_LE(std::abs(exact - smooth), 0.01 * p.rho_star);
    }
  }
}

TEST(Profiles, NonNegativityProperty) {
  Rng rng(11);
  auto g = one_edge(6.0, 3);
  for (bool per_spike : {false, true}) {
    PheromoneParams p = default_params();
    p.per_spike_decay = per_spike;
    TrainStore trains(g.total_segments());
    for (std::size_t s = 0; s < g.total_segments(); ++s) {
      double t = 0.0;
      for (int i = 0; i < 3; ++i) {
        t += rng.uniform(0.0, 2.0);
        trains.at(s).deposit(t);
      }
    }
    for (int i = 0; i < 500; ++i) {
      const double x = rng.uniform(0.0, 6.0);
      const double t = rng.uniform(0.0, 10.0);
      EXPECT_GE(edge_profile_exact(g, trains, 0, x, t, p), 0.0);
      EXPECT_GE(edge_profile_smooth(g, trains, 0, x, t, p), 0.0);
    }
  }
}

TEST(ColonyProfile, SingleEdgeMatchesEdgeProfile) {
  WorkedEdge w;
  const PheromoneParams p = default_params();
  for (double x : {0.5, 3.3, 7.7})
    for (double t : {1.0, 5.0})
      EXPECT_EQ(colony_profile(w.graph, w.trains, 0, x, t, p),
                edge_profile_smooth(w.graph, w.trains, 0, x, t, p));
}

TEST(ColonyProfile, CleanEdgeStaysZeroAndFieldIsAdditive) {
  // Two disjoint edges; spikes only on edge 0.
  std::vector<PlanarNode> nodes{{0, {0, 0}}, {1, {10, 0}}, {2, {0, 5}}, {3, {10, 5}}};
  std::vector<Edge> edges{{0, 0, 1, 10}, {1, 2, 3, 10}};
  SegmentedGraph g(std::move(nodes), std::move(edges), 4);
  TrainStore trains(g.total_segments());
  trains.at(g.segment_index(0, 1)).deposit(1.0);
  trains.at(g.segment_index(0, 2)).deposit(2.0);
  const PheromoneParams p = default_params();

  EXPECT_EQ(colony_profile(g, trains, 1, 5.0, 10.0, p), 0.0);

  // Additivity oracle: the grid-sampled whole field equals the sum of
  // independent per-edge evaluations.
  const auto samples = sample_field(g, trains, 10.0, p, 6);
  ASSERT_EQ(samples.size(), 12u);
  double total = 0.0, per_edge_sum = 0.0;
  for (const FieldSample& s : samples) total += s.value;
  for (EdgeId e = 0; e < 2; ++e)
    for (int k = 0; k < 6; ++k)
      per_edge_sum +=
          edge_profile_smooth(g, trains, e, 10.0 * (k + 0.5) / 6.0, 10.0, p);
  EXPECT_NEAR(total, per_edge_sum, 1e-12);
}

TEST(ProfileGradient, EmptyTrainsGiveZeroGradient) {
  auto g = one_edge(10.0, 5);
  TrainStore trains(g.total_segments());
  const PheromoneParams p = default_params();
  const auto grad = profile_gradient(g, trains, 0, 4.0, 3.0, p);
  EXPECT_EQ(grad.d_dx, 0.0);
  EXPECT_EQ(grad.d_dt, 0.0);
}

// Relative comparison uses the natural gradient unit rho* k / 4 (the peak
// slope of one logistic transition) as the scale floor; below it the central
// difference itself carries cancellation noise larger than the true value.
TEST(ProfileGradient, MatchesCentralFiniteDifferences) {
  WorkedEdge w;
  Rng rng(555);
  for (bool per_spike : {false, true}) {
    PheromoneParams p = default_params();
    p.per_spike_decay = per_spike;
    const double h = 1e-4;
    for (int i = 0; i < 100; ++i) {
      const double x = rng.uniform(0.2, 7.8);
      const double t = rng.uniform(0.2, 9.8);
      const auto grad = profile_gradient(w.graph, w.trains, 0, x, t, p);
      const double fd_x = (edge_profile_smooth(w.graph, w.trains, 0, x + h, t, p) -
                           edge_profile_smooth(w.graph, w.trains, 0, x - h, t, p)) /
                          (2 * h);
      const double fd_t = (edge_profile_smooth(w.graph, w.trains, 0, x, t + h, p) -
                           edge_profile_smooth(w.graph, w.trains, 0, x, t - h, p)) /
                          (2 * h);
      const double scale_x = std::max(std::abs(fd_x), p.rho_star * p.k_x / 4.0);
      const double scale_t = std::max(std::abs(fd_t), p.rho_star * p.k_t / 4.0);
      EXPECT_LE(std::abs(grad.d_dx - fd_x) / scale_x, 1e-5)
          << "x=" << x << " t=" << t << " per_spike=" << per_spike;
      EXPECT_LE(std::abs(grad.d_dt - fd_t) / scale_t, 1e-5)
          << "x=" << x << " t=" << t << " per_spike=" << per_spike;
    }
  }
}

TEST(ProfileGradient, SpatialDerivativeSaturatesInsideSegment) {
  WorkedEdge w;
  const PheromoneParams p = default_params();
  const auto grad = profile_gradient(w.graph, w.trains, 0, 1.0, 2.0, p);
  EXPECT_NEAR(grad.d_dx, 0.0, 1e-12);  // 1 mm from both boundaries, k_x = 50
}

TEST(FieldCsvExports, TrainsJsonRoundTrip) {
  WorkedEdge w;
  const auto j = trains_to_json(w.graph, w.trains);
  TrainStore restored;
  trains_from_json(j, w.graph, restored);
  ASSERT_EQ(restored.size(), w.trains.size());
  for (std::size_t i = 0; i < restored.size(); ++i)
    EXPECT_EQ(restored.at(i).times(), w.trains.at(i).times());
}
