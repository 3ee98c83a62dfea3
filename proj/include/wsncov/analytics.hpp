// ============================================================================
// analytics.hpp -- closed-form tau-tolerance coverage metrics
//
// All metrics reduce to Poisson counts of sensors in a disk:
//   point coverage          B(z, R_S(tau))        area pi R_S(tau)^2
//   intersecting C=B(o,r)   C (+) S(tau)          area pi (R_S(tau)+r)^2
//   containing C            S(tau) (-) C          area pi (R_S(tau)-r)^2, if R_S(tau) > r
// ============================================================================
#pragma once

#include <cmath>
#include <stdexcept>

#include "wsncov/core.hpp"

namespace wsncov {

struct ScenarioParams {
  NetworkModel net{0.0, 0.0};
  ToleranceProfile profile = ToleranceProfile::none();
  double tau = 0.0;
  RegionOfInterest region{};

  [[nodiscard]] EffectiveRadius radius() const { return effective_radius(net, tau, profile); }
  [[nodiscard]] ScenarioParams with_density(double density) const {
    ScenarioParams p = *this;
    p.net = net.with_density(density);
    return p;
  }
};

// ============================================================================
// Poisson means of the three counting regions
// ============================================================================
inline double point_coverage_mean(const ScenarioParams& p) {
  const double R = p.radius().meters;
  return p.net.density() * kPi * R * R;
}

inline double intersection_mean(const ScenarioParams& p) {
  const double R = p.radius().meters + p.region.radius();
  return p.net.density() * kPi * R * R;
}

/// Zero when no single sensor can contain the region.
inline double containment_mean(const ScenarioParams& p) {
  const double gap = p.radius().meters - p.region.radius();
  if (!(gap > 0.0)) return 0.0;
  return p.net.density() * kPi * gap * gap;
}

inline bool single_sensor_can_cover(const ScenarioParams& p) {
  return p.radius().meters > p.region.radius();
}

/// Index K at which a Poisson(mean) series may be truncated: the first K with
/// P(N <= K) > 1 - 1e-12, capped at mean + 50 sqrt(mean) + 50.
inline long long poisson_truncation_point(double mean) {
  const auto cap = static_cast<long long>(std::ceil(mean + 50.0 * std::sqrt(mean) + 50.0));
  double cumulative = 0.0;
  for (long long k = 0; k < cap; ++k) {
    cumulative += poisson_pmf(k, mean);
    if (cumulative > 1.0 - 1e-12) return k;
  }
  return cap;
}

// ============================================================================
// Area fractions
// ============================================================================
/// P(a point is in the tau-tolerance zone of exactly k sensors).
///
/// This is the plain Poisson pmf of the count in B(z, R_S(tau)); the sign
/// inside the power is (pi R_S(tau)^2 lambda)^k, not its negative.
inline double exact_k_coverage_prob(long long k, const ScenarioParams& p) {
  if (k < 0) throw std::invalid_argument("k must be non-negative");
  return poisson_pmf(k, point_coverage_mean(p));
}

/// nu_m(tau): expected fraction covered by between 1 and m sensors.
inline double at_most_m_saf(long long m, const ScenarioParams& p) {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  const double mean = point_coverage_mean(p);
  double sum = 0.0;
  for (long long k = 1; k <= m; ++k) sum += poisson_pmf(k, mean);
  return sum;
}

/// nu_o(tau), the expected vacant fraction.
inline double vacancy(const ScenarioParams& p) { return std::exp(-point_coverage_mean(p)); }

/// nu(tau), the tau-tolerance sensed area fraction.
inline double saf(const ScenarioParams& p) { return 1.0 - vacancy(p); }

/// eta(tau) = nu(tau) / nu(0). Uses expm1 so the small-density limit
/// (R_S(tau)/R_S)^2 is resolved.
inline double cif(const ScenarioParams& p) {
  const double lambda = p.net.density();
  const double rs = p.net.sensing_radius();
  if (!(lambda > 0.0) || !(rs > 0.0))
    throw std::domain_error("coverage improvement factor undefined: nu(0) = 0 (density or sensing radius is zero)");
  const double R = p.radius().meters;
  return std::expm1(-lambda * kPi * R * R) / std::expm1(-lambda * kPi * rs * rs);
}

// ============================================================================
// Region intersection and containment
// ============================================================================
/// mu_m(tau): exactly m tau-tolerance zones meet C = B(o, r).
inline double m_intersection_prob(long long m, const ScenarioParams& p) {
  if (m < 0) throw std::invalid_argument("m must be non-negative");
  return poisson_pmf(m, intersection_mean(p));
}

inline double intersection_prob(const ScenarioParams& p) { return -std::expm1(-intersection_mean(p)); }

/// beta_m(tau): exactly m sensors each contain C in their tau-tolerance zone.
inline double m_cover_prob(long long m, const ScenarioParams& p) {
  if (m < 0) throw std::invalid_argument("m must be non-negative");
  if (!single_sensor_can_cover(p)) return m == 0 ? 1.0 : 0.0;
  return poisson_pmf(m, containment_mean(p));
}

inline double cover_prob(const ScenarioParams& p) {
  if (!single_sensor_can_cover(p)) return 0.0;
  return -std::expm1(-containment_mean(p));
}

// ============================================================================
// Planning queries
// ============================================================================
struct OptimalDensity {
  double density;      // sensors/m^2
  double max_probability;
};

/// Density maximizing mu_m(tau), and the maximum itself.
///
/// The maximizer puts the Poisson mean at m, so the maximum is the pmf at its
/// mode, m^m e^{-m} / m!. (The shorter m e^{-m}/m! agrees only at m = 1.)
inline OptimalDensity optimal_density(long long m, const NetworkModel& net, const ToleranceProfile& profile,
                                      double tau, const RegionOfInterest& region) {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  const double reach = effective_radius(net, tau, profile).meters + region.radius();
  if (!(reach > 0.0)) throw std::domain_error("optimal density undefined for zero reach");
  const double md = static_cast<double>(m);
  return {md / (kPi * reach * reach), poisson_pmf(m, md)};
}

/// Density giving saf == target_saf.
inline double required_density(double target_saf, const NetworkModel& net, const ToleranceProfile& profile,
                               double tau) {
  if (!(target_saf > 0.0 && target_saf < 1.0))
    throw std::invalid_argument("target sensed area fraction must lie in (0, 1)");
  const double R = effective_radius(net, tau, profile).meters;
  if (!(R > 0.0)) throw std::domain_error("required density undefined for zero effective radius");
  return -std::log1p(-target_saf) / (kPi * R * R);
}

/// Density at which eta(tau) equals target_cif, by bisection over log density.
///
/// eta falls monotonically from (R_S(tau)/R_S)^2 at lambda -> 0 to 1 as
/// lambda -> inf, so a unique root exists for 1 < target < (R_S(tau)/R_S)^2.
inline double density_for_cif(double target_cif, const ScenarioParams& p, double rel_tol = 1e-12) {
  const double rs = p.net.sensing_radius();
  if (!(rs > 0.0)) throw std::domain_error("coverage improvement factor undefined for zero sensing radius");
  const double ratio = p.radius().meters / rs;
  if (!(target_cif > 1.0 && target_cif < ratio * ratio))
    throw std::domain_error("target coverage improvement factor outside (1, (R_S(tau)/R_S)^2)");

  auto eta = [&](double log_lambda) { return cif(p.with_density(std::exp(log_lambda))); };
  // Bracket in units of the native coverage mean lambda * pi * R_S^2.
  const double unit = std::log(1.0 / (kPi * rs * rs));
  double lo = unit - 10.0;
  double hi = unit;
  while (eta(lo) <= target_cif) lo -= 10.0;
  while (eta(hi) >= target_cif) hi += 1.0;

  // A log-interval of width rel_tol is a relative density tolerance of rel_tol.
  while (hi - lo > rel_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (eta(mid) > target_cif)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace wsncov
