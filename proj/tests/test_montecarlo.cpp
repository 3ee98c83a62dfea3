#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wsncov/analytics.hpp"
#include "wsncov/montecarlo.hpp"

using namespace wsncov;

namespace {

const ToleranceProfile kFig = ToleranceProfile::exponential(1.0, 0.01);

ScenarioParams scenario(double lambda, double rs, double tau, double r = 0.0) {
  return ScenarioParams{NetworkModel{lambda, rs}, kFig, tau, RegionOfInterest{r}};
}

SimulationConfig small_config(std::size_t replications = 60, std::size_t test_points = 2500, double half_width = 2000.0) {
  SimulationConfig c;
  c.seed = 1234;
  c.replications = replications;
  c.test_points = test_points;
  c.half_width = half_width;
  return c;
}

/// Event-only simulations need no observation area beyond the padding.
SimulationConfig event_config(std::size_t replications) {
  SimulationConfig c = small_config(replications, 1, 1.0);
  return c;
}

void expect_within(const MetricEstimate& est, double exact, double k_se) {
  ASSERT_TRUE(est.standard_error.has_value());
  const auto z = z_score(est, exact);
  ASSERT_TRUE(z.has_value());
  EXPECT_LE(std::abs(*z), k_se) << "estimate " << est.mean << " +- " << *est.standard_error << " vs " << exact;
}

}  // namespace

// ---------------------------------------------------------------------------
// sample_ppp
// ---------------------------------------------------------------------------
TEST(SamplePpp, ZeroDensityIsEmpty) {
  EXPECT_TRUE(sample_ppp(0.0, SimulationWindow{1000.0, 10.0}, 1, 0).sensors.empty());
}

TEST(SamplePpp, DeterministicForSeedAndIndex) {
  const SimulationWindow w{1000.0, 50.0};
  const auto a = sample_ppp(1e-4, w, 77, 3);
  const auto b = sample_ppp(1e-4, w, 77, 3);
  EXPECT_EQ(a.sensors, b.sensors);
  EXPECT_NE(a.sensors, sample_ppp(1e-4, w, 77, 4).sensors);
}

TEST(SamplePpp, PointsInsidePaddedWindow) {
  const SimulationWindow w{500.0, 120.0};
  const auto r = sample_ppp(2e-4, w, 9, 0);
  ASSERT_FALSE(r.sensors.empty());
  for (const auto& p : r.sensors) {
    EXPECT_LE(std::abs(p.x), w.padded_half_width());
    EXPECT_LE(std::abs(p.y), w.padded_half_width());
  }
}

TEST(SamplePpp, CountMeanMatchesIntensity) {
  // Padded window 2000 m x 2000 m: area 4e6 m^2, expected 40 points.
  const SimulationWindow w{900.0, 100.0};
  const double lambda = 1e-5;
  const double expected = lambda * w.padded_area();
  const int reps = 1000;
  double sum = 0.0;
  for (int i = 0; i < reps; ++i) sum += static_cast<double>(sample_ppp(lambda, w, 2024, i).sensors.size());
  EXPECT_NEAR(sum / reps, expected, 4.0 * std::sqrt(expected / reps));
}

// ---------------------------------------------------------------------------
// Coverage counting
// ---------------------------------------------------------------------------
TEST(CountCoveringSensors, Examples) {
  SensorRealization r;
  r.window = SimulationWindow{1000.0, 400.0};
  EXPECT_EQ(count_covering_sensors({0, 0}, r, EffectiveRadius{80.0}), 0u);
  r.sensors = {{50.0, 0.0}};
  EXPECT_EQ(count_covering_sensors({0, 0}, r, EffectiveRadius{80.0}), 1u);
  r.sensors = {{50.0, 0.0}, {0.0, -310.0}};
  EXPECT_EQ(count_covering_sensors({0, 0}, r, EffectiveRadius{310.2585}), 2u);
  EXPECT_EQ(count_covering_sensors({0, 0}, r, EffectiveRadius{80.0}), 1u);
}

TEST(CountCoveringSensors, ClosedDiskBoundaryCounts) {
  SensorRealization r;
  r.window = SimulationWindow{1000.0, 100.0};
  r.sensors = {{3.0, 4.0}};
  EXPECT_EQ(count_covering_sensors({0, 0}, r, EffectiveRadius{5.0}), 1u);
  EXPECT_THROW(count_covering_sensors({2000.0, 0.0}, r, EffectiveRadius{5.0}), std::invalid_argument);
}

TEST(CoverageIndex, AgreesWithLinearScan) {
  const SimulationWindow w{1500.0, 320.0};
  auto stream = RandomStream::for_replication(5, 5);
  for (double R : {0.0, 1.0, 80.0, 310.2585}) {
    const auto real = sample_ppp(4e-5, w, 31, static_cast<std::uint64_t>(R));
    const CoverageIndex index(real, EffectiveRadius{R});
    for (int i = 0; i < 500; ++i) {
      const Point z{stream.uniform(-1500.0, 1500.0), stream.uniform(-1500.0, 1500.0)};
      ASSERT_EQ(index.count(z), count_covering_sensors(z, real, EffectiveRadius{R})) << "R=" << R;
    }
  }
}

TEST(Containment, DistanceRuleMatchesBoundarySampling) {
  // A sensor's zone contains B(o, r) iff every boundary point of B(o, r) is
  // within R of the sensor. Sampling 3600 boundary angles misses the farthest
  // point by under 1e-6 r, so sensors that close to the threshold are skipped.
  const ScenarioParams p = scenario(2e-5, 150.0, 5.0, 120.0);
  const SimulationConfig sim = event_config(30);
  const SimulationWindow w = sim.window_for(p);
  const double R = p.radius().meters, r = p.region.radius();
  std::size_t checked = 0, covering_seen = 0;
  for (std::uint64_t i = 0; i < sim.replications; ++i) {
    const auto real = sample_ppp(p.net.density(), w, sim.seed, i);
    std::size_t by_boundary = 0;
    bool ambiguous = false;
    for (const Point& x : real.sensors) {
      if (std::abs(std::hypot(x.x, x.y) + r - R) < 1e-4 * r) ambiguous = true;
      bool all_inside = true;
      for (int a = 0; a < 3600 && all_inside; ++a) {
        const double t = 2.0 * kPi * a / 3600.0;
        all_inside = squared_distance(x, {r * std::cos(t), r * std::sin(t)}) <= R * R;
      }
      by_boundary += all_inside;
    }
    if (ambiguous) continue;
    ++checked;
    covering_seen += by_boundary;
    EXPECT_EQ(run_replication(p, sim, i, false).covering, by_boundary) << "replication " << i;
  }
  EXPECT_GE(checked, 25u);
  EXPECT_GT(covering_seen, 0u);
}

// ---------------------------------------------------------------------------
// Point metrics
// ---------------------------------------------------------------------------
TEST(EstimateExactK, EmptyNetwork) {
  const auto est = estimate_exact_k_fraction(0, scenario(0.0, 80.0, 10.0), small_config(10, 100));
  EXPECT_EQ(est.mean, 1.0);
  ASSERT_TRUE(est.standard_error);
  EXPECT_EQ(*est.standard_error, 0.0);
}

TEST(EstimateExactK, UnitMeanConfiguration) {
  const double lambda = 1.0 / (kPi * oracle::kEffective80Tau10 * oracle::kEffective80Tau10);
  const auto p = scenario(lambda, 80.0, 10.0);
  const auto outcomes = simulate(p, small_config(80, 2500, 3000.0));
  expect_within(estimate_exact_k_fraction(1, outcomes), exact_k_coverage_prob(1, p), 4.0);
  expect_within(estimate_exact_k_fraction(0, outcomes), exact_k_coverage_prob(0, p), 4.0);
  expect_within(estimate_exact_k_fraction(2, outcomes), exact_k_coverage_prob(2, p), 4.0);
}

TEST(EstimateExactK, HistogramPartitionsTestPoints) {
  const auto outcomes = simulate(scenario(3e-5, 80.0, 5.0), small_config(20, 900));
  for (const auto& o : outcomes) {
    std::size_t total = 0;
    for (auto c : o.coverage_histogram) total += c;
    EXPECT_EQ(total, o.test_points);
    EXPECT_EQ(o.test_points, 900u);
  }
}

TEST(EstimateSaf, EmptyNetwork) {
  const auto est = estimate_saf(scenario(0.0, 80.0, 10.0), small_config(10, 100));
  EXPECT_EQ(est.mean, 0.0);
  EXPECT_EQ(*est.standard_error, 0.0);
}

TEST(EstimateSaf, TargetSaf08) {
  const auto p = scenario(8.0043e-5, 80.0, 0.0);
  expect_within(estimate_saf(p, small_config(60, 2500)), 0.8, 4.0);
}

TEST(EstimateSaf, ComplementOfVacantFractionPerReplication) {
  const auto outcomes = simulate(scenario(2e-5, 80.0, 0.0), small_config(20, 2500));
  for (const auto& o : outcomes) {
    const std::vector<ReplicationOutcome> one{o};
    EXPECT_DOUBLE_EQ(estimate_saf(one).mean + estimate_exact_k_fraction(0, one).mean, 1.0);
  }
}

TEST(EstimateSaf, StatisticallyUnchangedWhenPaddingDoubles) {
  const auto p = scenario(2e-5, 80.0, 10.0);
  SimulationConfig a = small_config(60, 2500);
  SimulationConfig b = a;
  b.padding = 2.0 * a.window_for(p).padding;
  const auto ea = estimate_saf(p, a), eb = estimate_saf(p, b);
  const double se = std::hypot(*ea.standard_error, *eb.standard_error);
  EXPECT_LE(std::abs(ea.mean - eb.mean), 2.0 * se);
}

TEST(EstimateSaf, TranslationInvariance) {
  const auto p = scenario(2e-5, 80.0, 10.0);
  SimulationConfig centered = small_config(60, 2500);
  centered.test_half_width = 800.0;
  SimulationConfig shifted = centered;
  shifted.test_center = {-900.0, 1100.0};
  const auto ea = estimate_saf(p, centered), eb = estimate_saf(p, shifted);
  const double se = std::hypot(*ea.standard_error, *eb.standard_error);
  EXPECT_LE(std::abs(ea.mean - eb.mean), 2.0 * se);
}

TEST(SimulationConfig, RejectsBiasedOrInvalidWindows) {
  const auto p = scenario(1e-5, 80.0, 10.0, 50.0);
  SimulationConfig c = small_config();
  c.padding = 100.0;  // < R_S(tau) + r
  EXPECT_THROW(simulate(p, c), std::invalid_argument);
  c = small_config();
  c.test_center = {1500.0, 0.0};
  c.test_half_width = 800.0;
  EXPECT_THROW(simulate(p, c), std::invalid_argument);
  c = small_config();
  c.replications = 0;
  EXPECT_THROW(simulate(p, c), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Region events
// ---------------------------------------------------------------------------
TEST(EstimateIntersection, EmptyNetwork) {
  const auto est = estimate_intersection_events(std::size_t{0}, scenario(0.0, 150.0, 5.0, 100.0), event_config(20));
  EXPECT_EQ(est.mean, 1.0);
}

TEST(EstimateIntersection, ThreeSensorExample) {
  const auto p = scenario(2e-6, 150.0, 5.0, 100.0);
  expect_within(estimate_intersection_events(std::size_t{3}, p, event_config(4000)), oracle::kMu3Example, 4.0);
}

TEST(EstimateIntersection, AtLeastOneExample) {
  const auto p = scenario(1e-6, 150.0, 5.0, 100.0);
  expect_within(estimate_intersection_events(std::nullopt, p, event_config(2000)), oracle::kIntersectionExample, 4.0);
}

TEST(EstimateIntersection, ExactMIndicatorsSumToOne) {
  const auto outcomes = simulate(scenario(3e-6, 150.0, 5.0, 100.0), event_config(50), false);
  for (const auto& o : outcomes) {
    const std::vector<ReplicationOutcome> one{o};
    double sum = 0.0;
    for (std::size_t m = 0; m <= 60; ++m) sum += estimate_intersection_events(m, one).mean;
    EXPECT_EQ(sum, 1.0);
  }
}

TEST(EstimateCover, UncoverableRegion) {
  const auto p = scenario(1e-4, 150.0, 5.0, 320.0);
  const auto outcomes = simulate(p, event_config(100), false);
  for (std::size_t m = 1; m <= 3; ++m) EXPECT_EQ(estimate_cover_events(m, outcomes).mean, 0.0);
  EXPECT_EQ(estimate_cover_events(std::nullopt, outcomes).mean, 0.0);
}

TEST(EstimateCover, TwoSensorExample) {
  const auto p = scenario(3e-6, 150.0, 5.0, 200.0);
  expect_within(estimate_cover_events(std::size_t{2}, p, event_config(40000)), oracle::kCover2Example, 4.0);
}

TEST(EstimateCover, CoverImpliesIntersection) {
  const auto outcomes = simulate(scenario(2e-5, 150.0, 5.0, 150.0), event_config(200), false);
  for (const auto& o : outcomes) EXPECT_LE(o.covering, o.intersecting);
}

// ---------------------------------------------------------------------------
// Estimation plumbing
// ---------------------------------------------------------------------------
TEST(Determinism, IndependentOfWorkerCount) {
  const auto p = scenario(3e-5, 80.0, 5.0, 50.0);
  SimulationConfig one = small_config(12, 400);
  SimulationConfig four = one;
  four.workers = 4;
  const auto a = simulate(p, one), b = simulate(p, four);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].coverage_histogram, b[i].coverage_histogram);
    EXPECT_EQ(a[i].intersecting, b[i].intersecting);
    EXPECT_EQ(a[i].covering, b[i].covering);
  }
  const auto ea = estimate_saf(a), eb = estimate_saf(b);
  EXPECT_EQ(ea.mean, eb.mean);
  EXPECT_EQ(*ea.standard_error, *eb.standard_error);
}

TEST(ZScore, UndefinedWithOneReplication) {
  const auto est = estimate_saf(scenario(1e-5, 80.0, 5.0), small_config(1, 100));
  EXPECT_FALSE(est.standard_error.has_value());
  EXPECT_FALSE(z_score(est, 0.5).has_value());
}

TEST(ZScore, ZeroSpreadUsesEstimatorResolution) {
  MetricEstimate est{1.0, 0.0, 200, 10000};
  EXPECT_NEAR(*z_score(est, 1.0 - 1e-10), 1e-10 * 200 * 10000, 1e-9);
  EXPECT_EQ(*z_score(est, 1.0), 0.0);
  MetricEstimate spread{0.5, 0.1, 10, 1};
  EXPECT_DOUBLE_EQ(*z_score(spread, 0.3), 2.0);
}
