// ============================================================================
// core.hpp -- domain types for tolerance-aware sensor coverage
//
// A sensor at X senses the variable exactly inside B(X, R_S). When the
// variable's spatial variation is bounded by a tolerance function f(d, w),
// its value is also known to within tau on a wider disk of radius
// R_S + f^{-1}(tau, w). Everything downstream works with that effective
// radius; the field itself is never materialized.
// ============================================================================
#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wsncov {

inline constexpr double kPi = std::numbers::pi;

// ============================================================================
// Units
// ============================================================================
/// Sensors/km^2 -> sensors/m^2.
inline double per_km2_to_per_m2(double density_km2) { return density_km2 * 1e-6; }
/// Sensors/m^2 -> sensors/km^2.
inline double per_m2_to_per_km2(double density_m2) { return density_m2 * 1e6; }

// ============================================================================
// ToleranceProfile
// ============================================================================
/// Upper bound f(d, w) on |Theta(x) - Theta(y)| for points a distance d apart.
///
/// Two forms are built in. `exponential` is f(d) = A e^{w d} for d > 0 and
/// f(0) = 0; note that it jumps to A at d = 0+, so any tau <= A buys no extra
/// radius. `none` models w = infinity: nothing is known beyond the sensing
/// disk, so the tolerance radius is zero for every tau.
class ToleranceProfile {
 public:
  enum class Form { exponential, none };

  static ToleranceProfile exponential(double amplitude, double variation_rate) {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
      throw std::invalid_argument("tolerance amplitude A must be positive and finite");
    if (!(variation_rate > 0.0) || !std::isfinite(variation_rate))
      throw std::invalid_argument("variation rate w must be positive and finite");
    return ToleranceProfile(Form::exponential, amplitude, variation_rate);
  }

  static ToleranceProfile none() {
    return ToleranceProfile(Form::none, 1.0, std::numeric_limits<double>::infinity());
  }

  [[nodiscard]] Form form() const noexcept { return form_; }
  [[nodiscard]] double amplitude() const noexcept { return amplitude_; }
  /// +inf for the `none` form.
  [[nodiscard]] double variation_rate() const noexcept { return variation_rate_; }
  [[nodiscard]] bool has_profile() const noexcept { return form_ != Form::none; }

  [[nodiscard]] std::string describe() const {
    if (form_ == Form::none) return "none";
    return "exponential(A=" + std::to_string(amplitude_) + ",w=" + std::to_string(variation_rate_) + ")";
  }

  friend bool operator==(const ToleranceProfile&, const ToleranceProfile&) = default;

 private:
  ToleranceProfile(Form form, double amplitude, double rate)
      : form_{form}, amplitude_{amplitude}, variation_rate_{rate} {}

  Form form_;
  double amplitude_;
  double variation_rate_;
};

/// f(d, w): worst-case variation of the sensed variable over distance d (meters).
inline double tolerance_bound(double distance, const ToleranceProfile& profile) {
  if (!(distance >= 0.0)) throw std::invalid_argument("distance must be non-negative");
  if (distance == 0.0) return 0.0;
  switch (profile.form()) {
    case ToleranceProfile::Form::exponential:
      return profile.amplitude() * std::exp(profile.variation_rate() * distance);
    case ToleranceProfile::Form::none:
      return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

/// R(tau, w) = f^{-1}(tau, w): radius around a known point inside which the
/// variable is known to within tau. ln(tau/A)/w for tau > A, else 0.
inline double tolerance_radius(double tau, const ToleranceProfile& profile) {
  if (!(tau >= 0.0)) throw std::invalid_argument("tolerance tau must be non-negative");
  switch (profile.form()) {
    case ToleranceProfile::Form::exponential:
      if (tau <= profile.amplitude()) return 0.0;
      return std::log(tau / profile.amplitude()) / profile.variation_rate();
    case ToleranceProfile::Form::none:
      return 0.0;
  }
  return 0.0;
}

// ============================================================================
// Network and region
// ============================================================================
/// Homogeneous Poisson sensor field: density lambda (sensors/m^2) and native
/// sensing radius R_S (m).
class NetworkModel {
 public:
  NetworkModel(double density, double sensing_radius)
      : density_{density}, sensing_radius_{sensing_radius} {
    if (!(density >= 0.0) || !std::isfinite(density))
      throw std::invalid_argument("density must be finite and non-negative");
    if (!(sensing_radius >= 0.0) || !std::isfinite(sensing_radius))
      throw std::invalid_argument("sensing radius must be finite and non-negative");
  }

  [[nodiscard]] double density() const noexcept { return density_; }
  [[nodiscard]] double sensing_radius() const noexcept { return sensing_radius_; }
  [[nodiscard]] NetworkModel with_density(double density) const { return {density, sensing_radius_}; }

  friend bool operator==(const NetworkModel&, const NetworkModel&) = default;

 private:
  double density_;
  double sensing_radius_;
};

/// Disk of interest B(o, r).
class RegionOfInterest {
 public:
  explicit RegionOfInterest(double radius = 0.0) : radius_{radius} {
    if (!(radius >= 0.0) || !std::isfinite(radius))
      throw std::invalid_argument("region radius must be finite and non-negative");
  }
  [[nodiscard]] double radius() const noexcept { return radius_; }

  friend bool operator==(const RegionOfInterest&, const RegionOfInterest&) = default;

 private:
  double radius_;
};

/// R_S(tau) = R_S + R(tau, w), the radius of a sensor's tau-tolerance zone.
struct EffectiveRadius {
  double meters = 0.0;
  friend auto operator<=>(const EffectiveRadius&, const EffectiveRadius&) = default;
};

inline EffectiveRadius effective_radius(const NetworkModel& net, double tau,
                                        const ToleranceProfile& profile) {
  return EffectiveRadius{net.sensing_radius() + tolerance_radius(tau, profile)};
}

// ============================================================================
// Poisson pmf
// ============================================================================
/// e^{-mean} mean^k / k!, evaluated in log space.
inline double poisson_pmf(long long k, double mean) {
  if (k < 0) return 0.0;
  if (!(mean >= 0.0)) throw std::invalid_argument("Poisson mean must be non-negative");
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  if (std::isinf(mean)) return 0.0;
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
}

}  // namespace wsncov
