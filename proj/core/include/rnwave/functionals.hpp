#pragma once

// Snapshot functionals of a mode-decomposed field: energy, conformal charge
// and its flux, weighted L2/L6 norms, Morawetz-type weights and localized
// angular energies.
//
// Spherical harmonics are unit normalized, so ||u||^2 = sum_l int |u_l|^2
// drho_*. Quadratic functionals carry each mode's multiplicity weight.
// Integrals use the trapezoid rule on the uniform grid; u' is the centered
// difference (one-sided second order at the edges).

#include <cstddef>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "rnwave/evolution.hpp"
#include "rnwave/potentials.hpp"

namespace rnwave {

// ---------------------------------------------------------------------------
// Weights

struct WeightValue {
  double g;
  double g_prime;
};

/// g(rho) = int_0^{b(rho - center)} (1 + |tau|)^-sigma dtau, centered at the
/// effective-potential peak of one harmonic.
struct MorawetzWeight {
  double center = 0.0;
  double b = 0.1;
  double sigma = 2.0;
};

/// g(rho) = int_0^{b L^m rho} (1 + |tau|)^-sigma dtau with L = sqrt(1 + l(l+1)).
struct AngularModulatedWeight {
  double m = 0.5;
  double b = 0.1;
  double sigma = 2.0;
};

/// Smooth cutoff: 1 on [-plateau, plateau], 0 outside (-support, support).
struct ChiAlpha {
  double plateau = 1.0;
  double support = 2.0;
};

using WeightSpec = std::variant<MorawetzWeight, AngularModulatedWeight, ChiAlpha>;

/// Throws std::invalid_argument on sigma <= 1, b <= 0, sigma < 2 or m outside
/// [0, 1/2] for the modulated weight, or a cutoff without a plateau inside
/// its support.
void validate(const WeightSpec& spec);

MorawetzWeight morawetz_weight_for_mode(const PotentialTable& table, int l, double b, double sigma);

WeightValue morawetz_weight(const MorawetzWeight& spec, double rho_star);
WeightValue morawetz_weight(const AngularModulatedWeight& spec, int l, double rho_star);
double chi_alpha(const ChiAlpha& spec, double rho_star);

// ---------------------------------------------------------------------------
// Building blocks

/// Trapezoid rule on a uniform grid.
double trapezoid(std::span<const double> values, double spacing);

/// Centered first derivative, one-sided second order at both edges.
std::vector<double> centered_derivative(std::span<const double> values, double spacing);

/// Weighted field: mode states plus multiplicities (empty means all 1).
struct Field {
  std::span<const ModeState> modes;
  std::span<const double> weights;

  [[nodiscard]] double weight(std::size_t k) const { return weights.empty() ? 1.0 : weights[k]; }
};

struct EnergyResult {
  double total = 0.0;
  std::map<int, double> per_mode;
};

EnergyResult energy(const Field& field, const PotentialTable& table);

/// Energy of u~ = u/r in the normalized frame with measure F^(1/2) r^2 drho_*;
/// equals energy() up to quadrature and boundary terms.
double energy_normalized_form(const Field& field, const PotentialTable& table);

/// int (t^2 + rho^2) e + 2 t rho v u'.
double conformal_charge(const Field& field, const PotentialTable& table, double t);

/// 1/4 (t-rho)^2 (v-u')^2 + 1/4 (t+rho)^2 (v+u')^2 + 1/2 (t^2+rho^2) V_l u^2.
double conformal_charge_positive_form(const Field& field, const PotentialTable& table, double t);

/// t int [(2V + rho V') + l(l+1)(2V_L + rho V_L')] u^2: the exact rate of
/// change of the conformal charge.
double conformal_flux(const Field& field, const PotentialTable& table, double t);

/// sum_l int (1 + rho^2)^-beta |u_l|^2 (a squared norm).
double weighted_L2(const Field& field, const CoordinateMap& map, double beta);

/// <u, (t^2 + rho^2)/(rho^2 + 1) u>.
double conformal_weighted_L2(const Field& field, const CoordinateMap& map, double t);

/// ||u||^2 in L2(drho dw) and ||u/r||^2 in L2(r^2 drho dw); equal by construction.
double l2_norm_squared(const Field& field, const CoordinateMap& map);
double l2_norm_squared_tilde(const Field& field, const CoordinateMap& map);

struct SphereQuadrature {
  std::vector<double> nodes;    // cos(theta)
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre rule with n nodes on [-1, 1].
SphereQuadrature gauss_legendre(std::size_t n);

/// Y_l0(theta) = sqrt((2l+1)/4pi) P_l(cos theta).
double ylm0(int l, double cos_theta);

struct WeightedL6Result {
  double value = 0.0;
  /// False when the angular rule cannot integrate |u|^6 exactly
  /// (2n - 1 < 6 l_max).
  bool exact = true;
  std::size_t angular_nodes = 0;
};

/// (int F^3 r^-4 |u|^6 drho dw)^(1/6) with u = sum_l u_l Y_l0 reconstructed on
/// a Gauss-Legendre x trapezoid sphere grid (axisymmetric, so the azimuthal
/// trapezoid sum is exactly 2 pi). angular_nodes = 0 picks 3 l_max + 2.
/// Multiplicity weights do not enter this non-quadratic functional.
WeightedL6Result weighted_L6(const Field& field, const CoordinateMap& map,
                             std::size_t angular_nodes = 0);

/// sum_l (1 + l(l+1))^p int chi^2 |u_l|^2, i.e. ||L^p chi u||^2.
double angular_local_energy(const Field& field, const CoordinateMap& map, const ChiAlpha& chi,
                            double p);

struct SobolevRatio {
  double lhs;
  double energy;
  double conformal_charge;
  double rhs;
  double ratio;
};

/// ||F^(1/2) r^(-2/3) u||_6 divided by (E + E_C t^-2)^(1/6) E_C^(1/3) t^(-2/3)
/// (constant set to one). Throws std::invalid_argument for the zero state.
SobolevRatio sobolev_ratio(const Field& field, const PotentialTable& table, double t);

// ---------------------------------------------------------------------------
// Per-snapshot record

struct FunctionalOptions {
  std::vector<double> betas{1.0, 2.0};
  std::vector<double> angular_powers{0.75};
  ChiAlpha chi;
  AngularModulatedWeight modulation;
  std::size_t sphere_nodes = 0;
};

void validate(const FunctionalOptions& options);

struct FunctionalRecord {
  double t = 0.0;
  double E_total = 0.0;
  std::map<int, double> E_per_mode;
  double E_normalized_form = 0.0;
  double E_C = 0.0;
  double E_C_positive_form = 0.0;
  double conformal_flux = 0.0;
  std::map<double, double> weighted_L2;
  double weighted_L6 = 0.0;
  bool weighted_L6_exact = true;
  std::map<double, double> angular_local;
  double conformal_L2 = 0.0;
  double morawetz_bulk = 0.0;
  double radial_derivative_local = 0.0;
  double photon_sphere_angular = 0.0;
  double sobolev_lhs = 0.0;
  double sobolev_rhs = 0.0;
  /// No field above 1e-12 of its maximum within 10 cells of either edge.
  bool boundary_clear = true;
  bool finite = true;
};

/// Evaluates every functional of a snapshot; per-mode weight arrays are
/// precomputed once per run.
class FunctionalEvaluator {
 public:
  FunctionalEvaluator(std::shared_ptr<const PotentialTable> table, std::vector<int> ls,
                      std::vector<double> weights, FunctionalOptions options);

  [[nodiscard]] FunctionalRecord evaluate(std::span<const ModeState> states, double t) const;
  [[nodiscard]] const FunctionalOptions& options() const { return options_; }

 private:
  std::shared_ptr<const PotentialTable> table_;
  std::vector<int> ls_;
  std::vector<double> weights_;
  FunctionalOptions options_;
  std::vector<double> chi_sq_;
  std::vector<std::vector<double>> modulated_g_;
  std::vector<std::vector<double>> modulated_g_prime_;
};

struct RunSeries {
  EvolutionConfig config;
  FunctionalOptions options;
  double dt = 0.0;
  double spacing = 0.0;
  std::vector<FunctionalRecord> records;
};

/// Evolves `config` and records every snapshot.
RunSeries record_run(const EvolutionConfig& config, const FunctionalOptions& options);

}  // namespace rnwave
