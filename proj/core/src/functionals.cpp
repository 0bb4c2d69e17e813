#include "rnwave/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rnwave {

namespace {

double ltilde_sq(int l) { return static_cast<double>(l) * static_cast<double>(l + 1); }

// Antiderivative of (1 + |tau|)^-sigma from 0 to y, odd in y.
double bounded_ramp(double y, double sigma) {
  const double a = std::abs(y);
  const double value = sigma == 2.0 ? a / (1.0 + a) : (1.0 - std::pow(1.0 + a, 1.0 - sigma)) / (sigma - 1.0);
  return std::copysign(value, y);
}

double smooth_step_kernel(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

void require_same_grid(const Field& field, std::size_t n) {
  for (const auto& m : field.modes) {
    if (m.u.size() != n || m.v.size() != n) {
      throw std::invalid_argument("mode state does not match the grid");
    }
  }
  if (!field.weights.empty() && field.weights.size() != field.modes.size()) {
    throw std::invalid_argument("one weight per mode is required");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Weights

void validate(const WeightSpec& spec) {
  std::visit(
      [](const auto& w) {
        using T = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<T, ChiAlpha>) {
          if (!(w.plateau >= 0.0 && w.support > w.plateau)) {
            throw std::invalid_argument("chi_alpha needs 0 <= plateau < support");
          }
        } else {
          if (!(w.sigma > 1.0)) {
            throw std::invalid_argument("weight exponent sigma must exceed 1");
          }
          if (!(w.b > 0.0)) {
            throw std::invalid_argument("weight scale b must be positive");
          }
          if constexpr (std::is_same_v<T, AngularModulatedWeight>) {
            if (w.sigma < 2.0) {
              throw std::invalid_argument("angular modulation uses sigma >= 2");
            }
            if (!(w.m >= 0.0 && w.m <= 0.5)) {
              throw std::invalid_argument("angular modulation exponent m must lie in [0, 1/2]");
            }
          }
        }
      },
      spec);
}

MorawetzWeight morawetz_weight_for_mode(const PotentialTable& table, int l, double b, double sigma) {
  MorawetzWeight w{effective_potential(table, l).peak_rho_star, b, sigma};
  validate(WeightSpec{w});
  return w;
}

WeightValue morawetz_weight(const MorawetzWeight& spec, double rho_star) {
  validate(WeightSpec{spec});
  const double y = spec.b * (rho_star - spec.center);
  return {bounded_ramp(y, spec.sigma), spec.b * std::pow(1.0 + std::abs(y), -spec.sigma)};
}

WeightValue morawetz_weight(const AngularModulatedWeight& spec, int l, double rho_star) {
  validate(WeightSpec{spec});
  const double scale = spec.b * std::pow(1.0 + ltilde_sq(l), 0.5 * spec.m);
  const double y = scale * rho_star;
  return {bounded_ramp(y, spec.sigma), scale * std::pow(1.0 + std::abs(y), -spec.sigma)};
}

double chi_alpha(const ChiAlpha& spec, double rho_star) {
  const double a = std::abs(rho_star);
  if (a <= spec.plateau) return 1.0;
  if (a >= spec.support) return 0.0;
  const double s = (spec.support - a) / (spec.support - spec.plateau);
  const double up = smooth_step_kernel(s);
  return up / (up + smooth_step_kernel(1.0 - s));
}

// ---------------------------------------------------------------------------
// Building blocks

double trapezoid(std::span<const double> values, double spacing) {
  if (values.size() < 2) {
    return 0.0;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  sum -= 0.5 * (values.front() + values.back());
  return spacing * sum;
}

std::vector<double> centered_derivative(std::span<const double> values, double spacing) {
  const std::size_t n = values.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) {
    return d;
  }
  const double inv = 1.0 / (2.0 * spacing);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = (values[i + 1] - values[i - 1]) * inv;
  }
  d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) * inv;
  d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) * inv;
  return d;
}

// sum over cells of ((u[i+1] - u[i]) / h)^2 h: the gradient term the
// centered Laplacian actually conserves.
double cell_gradient_squared(std::span<const double> u, double spacing) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double d = u[i + 1] - u[i];
    sum += d * d;
  }
  return sum / spacing;
}

EnergyResult energy(const Field& field, const PotentialTable& table) {
  const auto& map = table.map();
  const std::size_t n = map.size();
  require_same_grid(field, n);
  const auto V = table.V();
  const auto VL = table.VL();
  EnergyResult out;
  std::vector<double> density(n);
  for (std::size_t k = 0; k < field.modes.size(); ++k) {
    const auto& m = field.modes[k];
    const double lsq = ltilde_sq(m.l);
    for (std::size_t i = 0; i < n; ++i) {
      density[i] = 0.5 * (m.v[i] * m.v[i] + (V[i] + lsq * VL[i]) * m.u[i] * m.u[i]);
    }
    const double e = trapezoid(density, map.spacing()) + 0.5 * cell_gradient_squared(m.u, map.spacing());
    out.per_mode[m.l] = e;
    out.total += field.weight(k) * e;
  }
  return out;
}

double energy_normalized_form(const Field& field, const PotentialTable& table) {
  const auto& map = table.map();
  const std::size_t n = map.size();
  require_same_grid(field, n);
  const auto r = map.r();
  const auto VL = table.VL();
  std::vector<double> tilde(n), density(n);
  double total = 0.0;
  for (std::size_t k = 0; k < field.modes.size(); ++k) {
    const auto& m = field.modes[k];
    for (std::size_t i = 0; i < n; ++i) {
      tilde[i] = m.u[i] / r[i];
    }
    const double lsq = ltilde_sq(m.l);
    // |u~_T|^2 F r^2 = v^2; angular term = l(l+1) V_L u^2.
    for (std::size_t i = 0; i < n; ++i) {
      density[i] = 0.5 * (m.v[i] * m.v[i] + lsq * VL[i] * m.u[i] * m.u[i]);
    }
    // |u~_R|^2 F r^2 = r^2 (d(u/r))^2, on cells like energy().
    double radial = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double d = 0.5 * (r[i] + r[i + 1]) * (tilde[i + 1] - tilde[i]);
      radial += d * d;
    }
    total += field.weight(k) * (trapezoid(density, map.spacing()) + 0.5 * radial / map.spacing());
  }
  return total;
}

double conformal_charge(const Field& field, const PotentialTable& table, double t) {
  const auto& map = table.map();
  const std::size_t n = map.size();
  require_same_grid(field, n);
  const auto rho = map.rho_star();
  const auto V = table.V();
  const auto VL = table.VL();
  std::vector<double> density(n);
  double total = 0.0;
  for (std::size_t k = 0; k < field.modes.size(); ++k) {
    const auto& m = field.modes[k];
    const auto du = centered_derivative(m.u, map.spacing());
    const double lsq = ltilde_sq(m.l);
    for (std::size_t i = 0; i < n; ++i) {
      const double e =
          0.5 * (m.v[i] * m.v[i] + du[i] * du[i] + (V[i] + lsq * VL[i]) * m.u[i] * m.u[i]);
      density[i] = (t * t + rho[i] * rho[i]) * e + 2.0 * t * rho[i] * m.v[i] * du[i];
    }
    total += field.weight(k) * trapezoid(density, map.spacing());
  }
  return total;
}

double conformal_charge_positive_form(const Field& field, const PotentialTable& table, double t) {
  const auto& map = table.map();
  const std::size_t n = map.size();
  require_same_grid(field, n);
  const auto rho = map.rho_star();
  const auto V = table.V();
  const auto VL = table.VL();
  std::vector<double> density(n);
  double total = 0.0;
  for (std::size_t k = 0; k < field.modes.size(); ++k) {
    const auto& m = field.modes[k];
    const auto du = centered_derivative(m.u, map.spacing());
    const double lsq = ltilde_sq(m.l);
    for (std::size_t i = 0; i < n; ++i) {
      const double in = (t - rho[i]) * (m.v[i] - du[i]);
      const double out = (t + rho[i]) * (m.v[i] + du[i]);
      density[i] = 0.25 * (in * in + out * out) +
                   0.5 * (t * t + rho[i] * rho[i]) * (V[i] + lsq * VL[i]) * m.u[i] * m.u[i];
    }
    total += field.weight(k) * trapezoid(density, map.spacing());
  }
  return total;
}

double conformal_flux(const Field& field, const PotentialTable& table, double t) {
  const auto& map = table.map();
  const std::size_t n = map.size();
  require_same_grid(field, n);
  const auto trapV = table.trap_V();
  const auto trapVL = table.trap_VL();
  std::vector<double> density(n);
  double total = 0.0;
  for (std::size_t k = 0; k < field.modes.size(); ++k) {
    const auto& m = field.modes[k];
    const double lsq = ltilde_sq(m.l);
    for (std::size_t i = 0; i < n; ++i) {
      density[i] = (trapV[i] + lsq * trapVL[i]) * m.u[i] * m.u[i];
    }
    total += field.weight(k) * trapezoid(density, map.spacing());
  }
  return t * total;
}

namespace {

template <typename WeightFn>
double weighted_square_sum(const Field& field, const CoordinateMap& map, WeightFn&& weight_at) {
  const std::size_t n = map.size();
  require_same_grid(field, n);
  std::vector<double> density(n);
  double total = 0.0;
  for (std::size_t k = 0; k < field.modes.size(); ++k) {
    const auto& m = field.modes[k];
    for (std::size_t i = 0; i < n; ++i) {
      density[i] = weight_at(i, m.l) * m.u[i] * m.u[i];
    }
    total += field.weight(k) * trapezoid(density, map.spacing());
  }
  return total;
}

}  // namespace

double weighted_L2(const Field& field, const CoordinateMap& map, double beta) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("weighted L2 needs beta > 0");
  }
  const auto rho = map.rho_star();
  return weighted_square_sum(field, map, [&](std::size_t i, int) {
    return std::pow(1.0 + rho[i] * rho[i], -beta);
  });
}

double conformal_weighted_L2(const Field& field, const CoordinateMap& map, double t) {
  const auto rho = map.rho_star();
  return weighted_square_sum(field, map, [&](std::size_t i, int) {
    const double r2 = rho[i] * rho[i];
    return (t * t + r2) / (r2 + 1.0);
  });
}

double l2_norm_squared(const Field& field, const CoordinateMap& map) {
  return weighted_square_sum(field, map, [](std::size_t, int) { return 1.0; });
}

double l2_norm_squared_tilde(const Field& field, const CoordinateMap& map) {
  const std::size_t n = map.size();
  require_same_grid(field, n);
  const auto r = map.r();
  std::vector<double> density(n);
  double total = 0.0;
  for (std::size_t k = 0; k < field.modes.size(); ++k) {
    const auto& m = field.modes[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double tilde = m.u[i] / r[i];
      density[i] = tilde * tilde * r[i] * r[i];
    }
    total += field.weight(k) * trapezoid(density, map.spacing());
  }
  return total;
}

SphereQuadrature gauss_legendre(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  }
  SphereQuadrature q{std::vector<double>(n), std::vector<double>(n)};
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pn_minus = n == 1 ? 1.0 : p0;
      dp = nd * (x * pn - pn_minus) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[i] = x;
    q.nodes[n - 1 - i] = -x;
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  return q;
}

double ylm0(int l, double cos_theta) {
  double p0 = 1.0;
  double p1 = cos_theta;
  double p = l == 0 ? p0 : p1;
  for (int k = 2; k <= l; ++k) {
    const double kd = static_cast<double>(k);
    p = ((2.0 * kd - 1.0) * cos_theta * p1 - (kd - 1.0) * p0) / kd;
    p0 = p1;
    p1 = p;
  }
  return std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi)) * p;
}

WeightedL6Result weighted_L6(const Field& field, const CoordinateMap& map, std::size_t angular_nodes) {
  const std::size_t n = map.size();
  require_same_grid(field, n);
  WeightedL6Result out;
  if (field.modes.empty()) {
    return out;
  }
  int l_max = 0;
  for (const auto& m : field.modes) {
    l_max = std::max(l_max, m.l);
  }
  const std::size_t nodes = angular_nodes == 0 ? static_cast<std::size_t>(3 * l_max + 2) : angular_nodes;
  out.angular_nodes = nodes;
  out.exact = 2 * nodes - 1 >= static_cast<std::size_t>(6 * l_max);
  const auto quad = gauss_legendre(nodes);

  std::vector<std::vector<double>> harmonics(field.modes.size(), std::vector<double>(nodes));
  for (std::size_t k = 0; k < field.modes.size(); ++k) {
    for (std::size_t j = 0; j < nodes; ++j) {
      harmonics[k][j] = ylm0(field.modes[k].l, quad.nodes[j]);
    }
  }
  const auto F = map.F();
  const auto r = map.r();
  std::vector<double> density(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sphere = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
      double u = 0.0;
      for (std::size_t k = 0; k < field.modes.size(); ++k) {
        u += field.modes[k].u[i] * harmonics[k][j];
      }
      const double u2 = u * u;
      sphere += quad.weights[j] * u2 * u2 * u2;
    }
    const double r2 = r[i] * r[i];
    density[i] = 2.0 * std::numbers::pi * F[i] * F[i] * F[i] / (r2 * r2) * sphere;
  }
  out.value = std::pow(trapezoid(density, map.spacing()), 1.0 / 6.0);
  return out;
}

double angular_local_energy(const Field& field, const CoordinateMap& map, const ChiAlpha& chi,
                            double p) {
  if (!(p >= 0.0 && p <= 2.0)) {
    throw std::invalid_argument("angular power must lie in [0, 2]");
  }
  validate(WeightSpec{chi});
  const auto rho = map.rho_star();
  std::vector<double> chi_sq(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double c = chi_alpha(chi, rho[i]);
    chi_sq[i] = c * c;
  }
  return weighted_square_sum(field, map, [&](std::size_t i, int l) {
    return std::pow(1.0 + ltilde_sq(l), p) * chi_sq[i];
  });
}

SobolevRatio sobolev_ratio(const Field& field, const PotentialTable& table, double t) {
  SobolevRatio out{};
  out.lhs = weighted_L6(field, table.map()).value;
  out.energy = energy(field, table).total;
  out.conformal_charge = conformal_charge_positive_form(field, table, t);
  if (!(out.energy > 0.0) || !(out.conformal_charge > 0.0)) {
    throw std::invalid_argument("Sobolev ratio is undefined for the zero state");
  }
  out.rhs = std::pow(out.energy + out.conformal_charge / (t * t), 1.0 / 6.0) *
            std::cbrt(out.conformal_charge) * std::pow(t, -2.0 / 3.0);
  out.ratio = out.lhs / out.rhs;
  return out;
}

// ---------------------------------------------------------------------------
// Per-snapshot record

void validate(const FunctionalOptions& options) {
  for (double beta : options.betas) {
    if (!(beta > 0.0)) {
      throw std::invalid_argument("weighted L2 exponents must be positive");
    }
  }
  for (double p : options.angular_powers) {
    if (!(p >= 0.0 && p <= 2.0)) {
      throw std::invalid_argument("angular powers must lie in [0, 2]");
    }
  }
  validate(WeightSpec{options.chi});
  validate(WeightSpec{options.modulation});
}

FunctionalEvaluator::FunctionalEvaluator(std::shared_ptr<const PotentialTable> table, std::vector<int> ls,
                                         std::vector<double> weights, FunctionalOptions options)
    : table_(std::move(table)), ls_(std::move(ls)), weights_(std::move(weights)), options_(std::move(options)) {
  validate(options_);
  if (weights_.size() != ls_.size()) {
    throw std::invalid_argument("one weight per mode is required");
  }
  const auto rho = table_->map().rho_star();
  const std::size_t n = rho.size();
  chi_sq_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = chi_alpha(options_.chi, rho[i]);
    chi_sq_[i] = c * c;
  }
  for (int l : ls_) {
    std::vector<double> g(n), gp(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto w = morawetz_weight(options_.modulation, l, rho[i]);
      g[i] = w.g;
      gp[i] = w.g_prime;
    }
    modulated_g_.push_back(std::move(g));
    modulated_g_prime_.push_back(std::move(gp));
  }
}

FunctionalRecord FunctionalEvaluator::evaluate(std::span<const ModeState> states, double t) const {
  if (states.size() != ls_.size()) {
    throw std::invalid_argument("snapshot does not match the evaluator's modes");
  }
  const auto& table = *table_;
  const auto& map = table.map();
  const Field field{states, weights_};
  const std::size_t n = map.size();
  const double h = map.spacing();
  const auto rho = map.rho_star();
  const auto VL_prime = table.VL_prime();

  FunctionalRecord rec;
  rec.t = t;
  const auto en = energy(field, table);
  rec.E_total = en.total;
  rec.E_per_mode = en.per_mode;
  rec.E_normalized_form = energy_normalized_form(field, table);
  rec.E_C = conformal_charge(field, table, t);
  rec.E_C_positive_form = conformal_charge_positive_form(field, table, t);
  rec.conformal_flux = conformal_flux(field, table, t);
  for (double beta : options_.betas) {
    rec.weighted_L2[beta] = weighted_L2(field, map, beta);
  }
  const auto l6 = weighted_L6(field, map, options_.sphere_nodes);
  rec.weighted_L6 = l6.value;
  rec.weighted_L6_exact = l6.exact;
  for (double p : options_.angular_powers) {
    rec.angular_local[p] = angular_local_energy(field, map, options_.chi, p);
  }
  rec.conformal_L2 = conformal_weighted_L2(field, map, t);

  std::vector<double> bulk(n), radial(n), angular(n);
  double global_max = 0.0;
  double edge_max = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& m = states[k];
    const auto du = centered_derivative(m.u, h);
    const double lsq = ltilde_sq(m.l);
    const auto& g = modulated_g_[k];
    const auto& gp = modulated_g_prime_[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double u2 = m.u[i] * m.u[i];
      bulk[i] = gp[i] * du[i] * du[i] - g[i] * VL_prime[i] * lsq * u2;
      radial[i] = du[i] * du[i] / (1.0 + rho[i] * rho[i]);
      angular[i] = (1.0 + lsq) * rho[i] * rho[i] * chi_sq_[i] * u2;
      const double mag = std::abs(m.u[i]) + std::abs(m.v[i]);
      global_max = std::max(global_max, mag);
      if (i < 10 || i + 10 >= n) {
        edge_max = std::max(edge_max, mag);
      }
    }
    const double w = weights_[k];
    rec.morawetz_bulk += w * trapezoid(bulk, h);
    rec.radial_derivative_local += w * trapezoid(radial, h);
    rec.photon_sphere_angular += w * trapezoid(angular, h);
  }
  rec.boundary_clear = !(edge_max > 1e-12 * global_max);

  rec.sobolev_lhs = rec.weighted_L6;
  if (rec.E_total > 0.0 && rec.E_C_positive_form > 0.0) {
    rec.sobolev_rhs = std::pow(rec.E_total + rec.E_C_positive_form / (t * t), 1.0 / 6.0) *
                      std::cbrt(rec.E_C_positive_form) * std::pow(t, -2.0 / 3.0);
  }

  rec.finite = std::isfinite(rec.E_total) && std::isfinite(rec.E_C) && std::isfinite(rec.weighted_L6) &&
               std::isfinite(rec.conformal_flux);
  return rec;
}

RunSeries record_run(const EvolutionConfig& config, const FunctionalOptions& options) {
  validate(options);
  const Background background = make_background(config);
  std::vector<int> ls;
  std::vector<double> weights;
  for (const auto& m : config.modes) {
    ls.push_back(m.l);
    weights.push_back(m.weight);
  }
  FunctionalEvaluator evaluator(background.table, ls, weights, options);
  RunSeries series;
  series.config = config;
  series.options = options;
  series.spacing = background.map->spacing();
  const auto summary = evolve(config, background, [&](const Snapshot& snap) {
    series.records.push_back(evaluator.evaluate(snap.modes, snap.t));
  });
  series.dt = summary.dt;
  return series;
}

}  // namespace rnwave
