#pragma once

// Potentials of the reduced wave equation u_tt - u'' + V u + V_L (-Lap_S2) u = 0
// on the tortoise grid: V, V_L, their rho_* derivatives, the per-harmonic
// effective potential V_l and the trapping terms 2V + rho_* V'.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "rnwave/geometry.hpp"

namespace rnwave {

/// V = (1/r) F dF/dr. Throws std::domain_error for r <= r+.
double potential_V(const SpacetimeParams& params, double r);

/// V_L = F / r^2. Throws std::domain_error for r <= r+.
double potential_VL(const SpacetimeParams& params, double r);

/// P_Q(r) = 3Mr^3 - 4(Q^2 + 2M^2)r^2 + 15MQ^2 r - 6Q^4 (Horner form).
double cubic_PQ(const SpacetimeParams& params, double r);

/// dV/drho_* = -2 F r^-7 P_Q(r).
double potential_V_prime(const SpacetimeParams& params, double r);

/// dV_L/drho_* = -2F r^-3 (1 - 3M/r + 2Q^2/r^2); vanishes at the photon sphere.
double potential_VL_prime(const SpacetimeParams& params, double r);

/// 2V + rho_* V' at r(rho_*).
double trapping_term_V(const SpacetimeParams& params, double rho_star);

/// 2V_L + rho_* V_L' at r(rho_*).
double trapping_term_VL(const SpacetimeParams& params, double rho_star);

/// I_l(r) = r^-2 (P_Q + l(l+1) P_L): positive multiple of -dV_l/drho_*.
/// Evaluated through an expansion about r+ so its sign is reliable close to
/// the horizon, including the degenerate critical horizon.
double peak_indicator(const SpacetimeParams& params, int l, double horizon_offset);

/// Number of sign changes of I_l on (r+, r_max], sampled on n_samples
/// logarithmically spaced horizon offsets starting at 1e-9 M.
int count_peak_sign_changes(const SpacetimeParams& params, int l, double r_max,
                            std::size_t n_samples = 4000);

/// Everything the evolution and functionals need from the potentials,
/// tabulated on one coordinate map.
class PotentialTable {
 public:
  static PotentialTable build(std::shared_ptr<const CoordinateMap> map);

  [[nodiscard]] const CoordinateMap& map() const { return *map_; }
  [[nodiscard]] std::shared_ptr<const CoordinateMap> shared_map() const { return map_; }

  [[nodiscard]] std::span<const double> V() const { return V_; }
  [[nodiscard]] std::span<const double> VL() const { return VL_; }
  [[nodiscard]] std::span<const double> V_prime() const { return V_prime_; }
  [[nodiscard]] std::span<const double> VL_prime() const { return VL_prime_; }
  [[nodiscard]] std::span<const double> trap_V() const { return trap_V_; }
  [[nodiscard]] std::span<const double> trap_VL() const { return trap_VL_; }

 private:
  explicit PotentialTable(std::shared_ptr<const CoordinateMap> map);

  std::shared_ptr<const CoordinateMap> map_;
  std::vector<double> V_;
  std::vector<double> VL_;
  std::vector<double> V_prime_;
  std::vector<double> VL_prime_;
  std::vector<double> trap_V_;
  std::vector<double> trap_VL_;
};

struct EffectivePotential {
  int l = 0;
  double ltilde_sq = 0.0;
  std::vector<double> values;
  double peak_r = 0.0;
  double peak_rho_star = 0.0;
};

/// V_l = V + l(l+1) V_L on the table's grid, with its unique exterior maximum
/// located by bisection on the sign change of I_l. Throws std::runtime_error
/// if the grid shows zero or several sign changes.
EffectivePotential effective_potential(const PotentialTable& table, int l);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct TrappingEnvelopes {
  std::vector<double> W;
  std::vector<double> W_L;
  Interval support_V;
  Interval support_VL;
  /// Set when the positive set of the angular trapping term reaches the left
  /// grid edge; allowed only in the critical regime, where support_VL.lo is
  /// then just the edge.
  bool support_VL_unbounded_left = false;
};

/// Positive parts of the trapping terms and the brackets of their supports.
/// Throws std::runtime_error when a positive region that should be compact
/// reaches the edge of the grid.
TrappingEnvelopes trapping_envelopes(const PotentialTable& table);

}  // namespace rnwave
