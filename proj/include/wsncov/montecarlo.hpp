// ============================================================================
// montecarlo.hpp -- geometric simulator for the tau-tolerance coverage model
//
// Sensors are drawn as a homogeneous PPP on a padded square window; coverage
// is decided by raw distance tests, never by the closed forms. Point metrics
// (exact-k fractions, SAF) are averaged over a stratified grid of test points
// inside the unpadded square. Region metrics (intersection, containment of
// C = B(o, r)) are one Bernoulli indicator per replication.
// ============================================================================
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "wsncov/analytics.hpp"
#include "wsncov/core.hpp"
#include "wsncov/random.hpp"

namespace wsncov {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Observation square [-L, L]^2 with sensors sampled on [-L-P, L+P]^2.
struct SimulationWindow {
  double half_width = 5000.0;
  double padding = 0.0;

  [[nodiscard]] double padded_half_width() const { return half_width + padding; }
  [[nodiscard]] double padded_area() const {
    const double side = 2.0 * padded_half_width();
    return side * side;
  }
  void validate() const {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw std::invalid_argument("window half-width must be positive and finite");
    if (!(padding >= 0.0) || !std::isfinite(padding))
      throw std::invalid_argument("window padding must be non-negative and finite");
  }
};

struct SensorRealization {
  std::vector<Point> sensors;
  SimulationWindow window;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
};

struct MetricEstimate {
  double mean = 0.0;
  /// Empty when fewer than two replications were run.
  std::optional<double> standard_error;
  std::size_t replications = 0;
  std::size_t samples_per_replication = 0;
};

/// (estimate - exact) / SE. A zero SE (every replication identical) is
/// replaced by the estimator's resolution 1 / (replications * samples), so a
/// degenerate-but-correct estimate scores near zero instead of dividing by 0.
/// Returns nullopt when the SE is undefined.
inline std::optional<double> z_score(const MetricEstimate& est, double exact) {
  if (!est.standard_error) return std::nullopt;
  const double resolution =
      1.0 / static_cast<double>(std::max<std::size_t>(1, est.replications * est.samples_per_replication));
  const double se = std::max(*est.standard_error, resolution);
  return (est.mean - exact) / se;
}

struct SimulationConfig {
  std::uint64_t seed = 20210601;
  std::size_t replications = 200;
  /// Rounded to the nearest perfect square (one point per grid cell).
  std::size_t test_points = 10000;
  double half_width = 5000.0;
  /// Defaults to R_S(tau) + r + 1 m.
  std::optional<double> padding;
  /// Test points fill the square of this half-width centered at test_center;
  /// defaults to the whole observation window.
  std::optional<double> test_half_width;
  Point test_center{};
  unsigned workers = 1;

  [[nodiscard]] SimulationWindow window_for(const ScenarioParams& p) const {
    SimulationWindow w{half_width, padding.value_or(p.radius().meters + p.region.radius() + 1.0)};
    w.validate();
    return w;
  }

  [[nodiscard]] std::size_t grid_side() const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(test_points)))));
  }

  void validate(const ScenarioParams& p) const {
    if (replications == 0) throw std::invalid_argument("replications must be at least 1");
    if (test_points == 0) throw std::invalid_argument("test_points must be at least 1");
    const SimulationWindow w = window_for(p);
    if (w.padding < p.radius().meters + p.region.radius())
      throw std::invalid_argument("padding must be at least R_S(tau) + r to avoid edge bias");
    const double thw = test_half_width.value_or(half_width);
    if (!(thw > 0.0)) throw std::invalid_argument("test half-width must be positive");
    if (std::abs(test_center.x) + thw > half_width * (1.0 + 1e-12) ||
        std::abs(test_center.y) + thw > half_width * (1.0 + 1e-12))
      throw std::invalid_argument("test square must lie inside the observation window");
  }
};

// ============================================================================
// Sampling
// ============================================================================
/// Homogeneous PPP of density `lambda` on the padded window, replication
/// `index` of `master_seed`.
inline SensorRealization sample_ppp(double lambda, const SimulationWindow& window, std::uint64_t master_seed,
                                    std::uint64_t index) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("density must be non-negative");
  window.validate();
  SensorRealization out{{}, window, master_seed, index};
  RandomStream stream = RandomStream::for_replication(master_seed, index);
  const std::uint64_t n = stream.poisson(lambda * window.padded_area());
  const double h = window.padded_half_width();
  out.sensors.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x = stream.uniform(-h, h);
    const double y = stream.uniform(-h, h);
    out.sensors.push_back({x, y});
  }
  return out;
}

// ============================================================================
// Coverage counting
// ============================================================================
inline double squared_distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Sensors with |z - X_i| <= R (closed disks). Linear scan.
inline std::size_t count_covering_sensors(Point z, const SensorRealization& realization, EffectiveRadius R) {
  const double L = realization.window.half_width;
  if (std::abs(z.x) > L || std::abs(z.y) > L) throw std::invalid_argument("test point outside the observation window");
  const double r2 = R.meters * R.meters;
  return static_cast<std::size_t>(std::count_if(realization.sensors.begin(), realization.sensors.end(),
                                                [&](Point x) { return squared_distance(z, x) <= r2; }));
}

/// Uniform cell list over the padded window for repeated disk-count queries.
/// Returns the same counts as count_covering_sensors.
class CoverageIndex {
 public:
  CoverageIndex(const SensorRealization& realization, EffectiveRadius R)
      : radius_{R.meters}, origin_{-realization.window.padded_half_width()} {
    const double span = 2.0 * realization.window.padded_half_width();
    // Cells no smaller than the query radius, and at most 4096 per side.
    cell_ = std::max(radius_, span / 4096.0);
    side_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / cell_)));
    std::vector<std::size_t> counts(side_ * side_ + 1, 0);
    for (const Point& p : realization.sensors) ++counts[cell_of(p) + 1];
    for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
    start_ = counts;
    points_.resize(realization.sensors.size());
    for (const Point& p : realization.sensors) points_[counts[cell_of(p)]++] = p;
  }

  [[nodiscard]] std::size_t count(Point z) const {
    const double r2 = radius_ * radius_;
    const std::size_t x0 = clamp_index(z.x - radius_), x1 = clamp_index(z.x + radius_);
    const std::size_t y0 = clamp_index(z.y - radius_), y1 = clamp_index(z.y + radius_);
    std::size_t n = 0;
    for (std::size_t cy = y0; cy <= y1; ++cy) {
      for (std::size_t cx = x0; cx <= x1; ++cx) {
        const std::size_t c = cy * side_ + cx;
        for (std::size_t i = start_[c]; i < start_[c + 1]; ++i)
          if (squared_distance(z, points_[i]) <= r2) ++n;
      }
    }
    return n;
  }

 private:
  [[nodiscard]] std::size_t clamp_index(double coord) const {
    const double t = std::floor((coord - origin_) / cell_);
    if (t <= 0.0) return 0;
    return std::min(side_ - 1, static_cast<std::size_t>(t));
  }
  [[nodiscard]] std::size_t cell_of(Point p) const { return clamp_index(p.y) * side_ + clamp_index(p.x); }

  double radius_;
  double origin_;
  double cell_ = 1.0;
  std::size_t side_ = 1;
  std::vector<std::size_t> start_;
  std::vector<Point> points_;
};

// ============================================================================
// Replications
// ============================================================================
/// Raw observations from one realization.
struct ReplicationOutcome {
  /// coverage_histogram[k] = test points covered by exactly k sensors.
  std::vector<std::size_t> coverage_histogram;
  std::size_t test_points = 0;
  /// Sensors whose tau-tolerance zone meets C: |X_i| <= r + R_S(tau).
  std::size_t intersecting = 0;
  /// Sensors whose tau-tolerance zone contains C: |X_i| + r <= R_S(tau).
  std::size_t covering = 0;

  [[nodiscard]] double exact_fraction(std::size_t k) const {
    if (test_points == 0) return 0.0;
    return k < coverage_histogram.size()
               ? static_cast<double>(coverage_histogram[k]) / static_cast<double>(test_points)
               : 0.0;
  }
};

/// Stratified test grid: one uniform point in each of side x side cells.
inline std::vector<Point> stratified_test_points(const SimulationConfig& sim, RandomStream& stream) {
  const std::size_t side = sim.grid_side();
  const double thw = sim.test_half_width.value_or(sim.half_width);
  const double cell = 2.0 * thw / static_cast<double>(side);
  const double x0 = sim.test_center.x - thw;
  const double y0 = sim.test_center.y - thw;
  std::vector<Point> pts;
  pts.reserve(side * side);
  for (std::size_t j = 0; j < side; ++j) {
    for (std::size_t i = 0; i < side; ++i) {
      const double x = x0 + (static_cast<double>(i) + stream.uniform()) * cell;
      const double y = y0 + (static_cast<double>(j) + stream.uniform()) * cell;
      pts.push_back({x, y});
    }
  }
  return pts;
}

/// Test-point stream for a replication; disjoint from the sensor stream.
inline RandomStream test_point_stream(std::uint64_t master_seed, std::uint64_t index) {
  return RandomStream::for_replication(splitmix64(master_seed ^ 0xA5A5A5A5DEADBEEFULL), index);
}

inline ReplicationOutcome run_replication(const ScenarioParams& p, const SimulationConfig& sim, std::uint64_t index,
                                          bool evaluate_test_points = true) {
  const SimulationWindow window = sim.window_for(p);
  const SensorRealization real = sample_ppp(p.net.density(), window, sim.seed, index);
  const EffectiveRadius R = p.radius();
  const double r = p.region.radius();

  ReplicationOutcome out;
  for (const Point& x : real.sensors) {
    const double d = std::hypot(x.x, x.y);
    if (d <= r + R.meters) ++out.intersecting;
    if (d + r <= R.meters) ++out.covering;
  }

  if (evaluate_test_points) {
    RandomStream stream = test_point_stream(sim.seed, index);
    const std::vector<Point> pts = stratified_test_points(sim, stream);
    const CoverageIndex cells(real, R);
    out.test_points = pts.size();
    for (const Point& z : pts) {
      const std::size_t k = cells.count(z);
      if (k >= out.coverage_histogram.size()) out.coverage_histogram.resize(k + 1, 0);
      ++out.coverage_histogram[k];
    }
  }
  return out;
}

/// Runs fn(i) for i in [0, n) over `workers` threads. Each index writes only
/// its own slot, so results do not depend on the worker count.
template <class Fn>
void parallel_for_index(std::size_t n, unsigned workers, Fn&& fn) {
  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, n))));
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> threads;
  threads.reserve(w);
  for (unsigned t = 0; t < w; ++t)
    threads.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += w) fn(i);
    });
}

inline std::vector<ReplicationOutcome> simulate(const ScenarioParams& p, const SimulationConfig& sim,
                                                bool evaluate_test_points = true) {
  sim.validate(p);
  std::vector<ReplicationOutcome> out(sim.replications);
  parallel_for_index(sim.replications, sim.workers,
                     [&](std::size_t i) { out[i] = run_replication(p, sim, i, evaluate_test_points); });
  return out;
}

/// Mean and across-replication standard error of a per-replication statistic,
/// reduced in replication order.
inline MetricEstimate summarize(const std::vector<ReplicationOutcome>& outcomes,
                                const std::function<double(const ReplicationOutcome&)>& statistic,
                                std::size_t samples_per_replication) {
  MetricEstimate est;
  est.replications = outcomes.size();
  est.samples_per_replication = samples_per_replication;
  if (outcomes.empty()) return est;
  double sum = 0.0;
  for (const auto& o : outcomes) sum += statistic(o);
  const double n = static_cast<double>(outcomes.size());
  est.mean = sum / n;
  if (outcomes.size() >= 2) {
    double ss = 0.0;
    for (const auto& o : outcomes) {
      const double d = statistic(o) - est.mean;
      ss += d * d;
    }
    est.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return est;
}

// ============================================================================
// Estimators
// ============================================================================
inline MetricEstimate estimate_exact_k_fraction(std::size_t k, const std::vector<ReplicationOutcome>& outcomes) {
  const std::size_t n = outcomes.empty() ? 0 : outcomes.front().test_points;
  return summarize(outcomes, [k](const ReplicationOutcome& o) { return o.exact_fraction(k); }, n);
}

inline MetricEstimate estimate_exact_k_fraction(std::size_t k, const ScenarioParams& p, const SimulationConfig& sim) {
  return estimate_exact_k_fraction(k, simulate(p, sim));
}

/// Fraction of test points covered by between 1 and m sensors.
inline MetricEstimate estimate_at_most_m_fraction(std::size_t m, const std::vector<ReplicationOutcome>& outcomes) {
  const std::size_t n = outcomes.empty() ? 0 : outcomes.front().test_points;
  return summarize(
      outcomes,
      [m](const ReplicationOutcome& o) {
        double s = 0.0;
        for (std::size_t k = 1; k <= m; ++k) s += o.exact_fraction(k);
        return s;
      },
      n);
}

inline MetricEstimate estimate_saf(const std::vector<ReplicationOutcome>& outcomes) {
  const std::size_t n = outcomes.empty() ? 0 : outcomes.front().test_points;
  return summarize(
      outcomes,
      [](const ReplicationOutcome& o) {
        if (o.test_points == 0) return 0.0;
        const std::size_t vacant = o.coverage_histogram.empty() ? 0 : o.coverage_histogram[0];
        return static_cast<double>(o.test_points - vacant) / static_cast<double>(o.test_points);
      },
      n);
}

inline MetricEstimate estimate_saf(const ScenarioParams& p, const SimulationConfig& sim) {
  return estimate_saf(simulate(p, sim));
}

/// Indicator of exactly m intersecting sensors; nullopt m means "at least one".
inline MetricEstimate estimate_intersection_events(std::optional<std::size_t> m,
                                                   const std::vector<ReplicationOutcome>& outcomes) {
  return summarize(
      outcomes,
      [m](const ReplicationOutcome& o) { return (m ? o.intersecting == *m : o.intersecting >= 1) ? 1.0 : 0.0; }, 1);
}

inline MetricEstimate estimate_intersection_events(std::optional<std::size_t> m, const ScenarioParams& p,
                                                   const SimulationConfig& sim) {
  return estimate_intersection_events(m, simulate(p, sim, false));
}

/// Indicator of exactly m containing sensors; nullopt m means "at least one".
inline MetricEstimate estimate_cover_events(std::optional<std::size_t> m,
                                            const std::vector<ReplicationOutcome>& outcomes) {
  return summarize(
      outcomes, [m](const ReplicationOutcome& o) { return (m ? o.covering == *m : o.covering >= 1) ? 1.0 : 0.0; },
      1);
}

inline MetricEstimate estimate_cover_events(std::optional<std::size_t> m, const ScenarioParams& p,
                                            const SimulationConfig& sim) {
  return estimate_cover_events(m, simulate(p, sim, false));
}

}  // namespace wsncov
