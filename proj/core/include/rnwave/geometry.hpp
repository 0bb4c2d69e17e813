#pragma once

// Static Reissner-Nordstrom exterior: metric factor, horizons, photon sphere,
// tortoise coordinate normalized to vanish on the photon sphere, and the
// tabulated rho_* <-> r map used by every other module.
//
// All lengths are in geometric units of the mass M.

#include <cstddef>
#include <span>
#include <vector>

namespace rnwave {

enum class Regime { Subcritical, Critical };

/// Mass and charge of the background. Supercritical (|Q| > M) parameters are
/// rejected at construction; |Q| within 1e-12 (relative) of M is classified
/// as critical and treated as exactly critical from then on.
class SpacetimeParams {
 public:
  SpacetimeParams(double mass, double charge);

  [[nodiscard]] double mass() const { return mass_; }
  [[nodiscard]] double charge() const { return charge_; }
  [[nodiscard]] Regime regime() const { return regime_; }
  [[nodiscard]] double r_plus() const { return r_plus_; }
  [[nodiscard]] double r_minus() const { return r_minus_; }

 private:
  double mass_;
  double charge_;
  Regime regime_;
  double r_plus_;
  double r_minus_;
};

struct Horizons {
  double r_minus;
  double r_plus;
};

/// F = 1 - 2M/r + Q^2/r^2, evaluated literally. Callers that need F close to
/// the horizon should use metric_factor_from_offset().
double metric_factor(const SpacetimeParams& params, double r);

/// F written as (r - r+)(r - r-)/r^2 with the horizon offset x = r - r+ kept
/// separately, so F stays accurate when r itself rounds to r+.
double metric_factor_from_offset(const SpacetimeParams& params, double offset);

Horizons horizons(const SpacetimeParams& params);

/// Exterior critical point of V_L: (3M + sqrt(9M^2 - 8Q^2)) / 2.
double photon_sphere_radius(const SpacetimeParams& params);

/// rho_*(r), normalized so that rho_*(alpha) = 0. Throws std::domain_error for
/// r <= r+.
double tortoise_of_r(const SpacetimeParams& params, double r);

/// Same as tortoise_of_r() with the argument given as x = r - r+ > 0.
double tortoise_of_offset(const SpacetimeParams& params, double offset);

/// Inverse of tortoise_of_offset(): the horizon offset x = r - r+ at rho_*.
/// Resolves offsets far below the double spacing of r near the horizon.
double horizon_offset_of_rho_star(const SpacetimeParams& params, double rho_star);

/// r(rho_*) = r+ + horizon_offset_of_rho_star(rho_*).
double r_of_rho_star(const SpacetimeParams& params, double rho_star);

/// Uniform grid in rho_* with cached r, r - r+ and F. Immutable once built.
class CoordinateMap {
 public:
  static CoordinateMap build(const SpacetimeParams& params, double rho_min,
                             double rho_max, std::size_t n_points);

  [[nodiscard]] const SpacetimeParams& params() const { return params_; }
  [[nodiscard]] std::size_t size() const { return rho_star_.size(); }
  [[nodiscard]] double spacing() const { return spacing_; }
  [[nodiscard]] double rho_min() const { return rho_star_.front(); }
  [[nodiscard]] double rho_max() const { return rho_star_.back(); }
  [[nodiscard]] double alpha() const { return alpha_; }
  /// Tortoise value of the photon sphere; zero by construction.
  [[nodiscard]] double alpha_star() const { return 0.0; }

  [[nodiscard]] std::span<const double> rho_star() const { return rho_star_; }
  [[nodiscard]] std::span<const double> r() const { return r_; }
  [[nodiscard]] std::span<const double> horizon_offset() const { return offset_; }
  [[nodiscard]] std::span<const double> F() const { return F_; }

  /// Index of the node closest to rho_* = 0.
  [[nodiscard]] std::size_t origin_index() const;

 private:
  CoordinateMap(const SpacetimeParams& params, double spacing, double alpha,
                std::vector<double> rho_star, std::vector<double> r,
                std::vector<double> offset, std::vector<double> F);

  SpacetimeParams params_;
  double spacing_;
  double alpha_;
  std::vector<double> rho_star_;
  std::vector<double> r_;
  std::vector<double> offset_;
  std::vector<double> F_;
};

struct EddingtonFinkelstein {
  double s_minus;
  double s_plus;
  double S_minus;
  double S_plus;
  /// True if either exponent was clamped at +-700 to avoid overflow.
  bool saturated = false;
};

/// s_-+ = t -+ rho_*, S_- = -exp(-s_-/4M), S_+ = exp(s_+/4M). The 4M is used
/// for every charge, not the charge-dependent surface gravity.
EddingtonFinkelstein eddington_finkelstein(double t, double rho_star, double mass);

}  // namespace rnwave
