#include "rnwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rnwave {

namespace {

constexpr double kCriticalTolerance = 1e-12;

// Un-normalized closed-form tortoise coordinate as a function of the horizon
// offset x = r - r+. Returns -inf at x = 0.
double raw_tortoise(const SpacetimeParams& p, double x) {
  const double M = p.mass();
  const double r = p.r_plus() + x;
  if (x <= 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  if (p.regime() == Regime::Critical) {
    return r + 2.0 * M * std::log(x / M) - M * M / x;
  }
  const double rp = p.r_plus();
  const double rm = p.r_minus();
  const double split = rp - rm;
  double value = r + rp * rp / split * std::log(x / M);
  if (rm != 0.0) {
    value -= rm * rm / split * std::log((x + split) / M);
  }
  return value;
}

double normalization(const SpacetimeParams& p) {
  return raw_tortoise(p, photon_sphere_radius(p) - p.r_plus());
}

}  // namespace

SpacetimeParams::SpacetimeParams(double mass, double charge)
    : mass_(mass), charge_(charge) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::invalid_argument("mass must be positive and finite");
  }
  if (!std::isfinite(charge)) {
    throw std::invalid_argument("charge must be finite");
  }
  const double excess = (std::abs(charge) - mass) / mass;
  if (excess > kCriticalTolerance) {
    throw std::invalid_argument("supercritical parameters |Q| > M are not supported (M=" +
                                std::to_string(mass) + ", Q=" + std::to_string(charge) + ")");
  }
  if (std::abs(excess) <= kCriticalTolerance) {
    regime_ = Regime::Critical;
    charge_ = std::copysign(mass, charge);
    r_plus_ = mass;
    r_minus_ = mass;
  } else {
    regime_ = Regime::Subcritical;
    const double root = std::sqrt((mass - charge) * (mass + charge));
    r_plus_ = mass + root;
    // Q^2 / r+ instead of M - root avoids cancellation for small Q.
    r_minus_ = charge * charge / r_plus_;
  }
}

double metric_factor(const SpacetimeParams& params, double r) {
  const double M = params.mass();
  const double Q = params.charge();
  return 1.0 - 2.0 * M / r + Q * Q / (r * r);
}

double metric_factor_from_offset(const SpacetimeParams& params, double offset) {
  const double r = params.r_plus() + offset;
  const double split = params.r_plus() - params.r_minus();
  return offset * (offset + split) / (r * r);
}

Horizons horizons(const SpacetimeParams& params) {
  return {params.r_minus(), params.r_plus()};
}

double photon_sphere_radius(const SpacetimeParams& params) {
  const double M = params.mass();
  const double Q = params.charge();
  return 0.5 * (3.0 * M + std::sqrt(9.0 * M * M - 8.0 * Q * Q));
}

double tortoise_of_offset(const SpacetimeParams& params, double offset) {
  if (!(offset > 0.0)) {
    throw std::domain_error("tortoise coordinate requires r > r+");
  }
  return raw_tortoise(params, offset) - normalization(params);
}

double tortoise_of_r(const SpacetimeParams& params, double r) {
  if (!(r > params.r_plus())) {
    throw std::domain_error("tortoise coordinate requires r > r+");
  }
  return tortoise_of_offset(params, r - params.r_plus());
}

double horizon_offset_of_rho_star(const SpacetimeParams& params, double rho_star) {
  if (!std::isfinite(rho_star)) {
    throw std::invalid_argument("rho_* must be finite");
  }
  const double M = params.mass();
  const double shift = normalization(params);
  // Bisection runs in y = log(x / M); tortoise is increasing in y.
  auto residual = [&](double y) { return raw_tortoise(params, M * std::exp(y)) - shift - rho_star; };

  double seed = 0.0;
  if (rho_star < 0.0) {
    if (params.regime() == Regime::Critical) {
      seed = std::log(M / -rho_star);
    } else {
      const double rate = (params.r_plus() - params.r_minus()) /
                          (params.r_plus() * params.r_plus());
      seed = rate * rho_star;
    }
  } else {
    const double x0 = std::max(rho_star + photon_sphere_radius(params) - params.r_plus(), 1e-3 * M);
    seed = std::log(x0 / M);
  }

  double lo = seed - 1.0;
  double hi = seed + 1.0;
  double step = 1.0;
  int expansions = 0;
  while (residual(lo) > 0.0) {
    lo -= step;
    step *= 2.0;
    if (++expansions > 64 || lo < -745.0) {
      throw std::runtime_error("could not bracket r(rho_*) below rho_* = " + std::to_string(rho_star));
    }
  }
  step = 1.0;
  expansions = 0;
  while (residual(hi) < 0.0) {
    hi += step;
    step *= 2.0;
    if (++expansions > 64 || hi > 700.0) {
      throw std::runtime_error("could not bracket r(rho_*) above rho_* = " + std::to_string(rho_star));
    }
  }

  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    if (residual(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return M * std::exp(0.5 * (lo + hi));
}

double r_of_rho_star(const SpacetimeParams& params, double rho_star) {
  return params.r_plus() + horizon_offset_of_rho_star(params, rho_star);
}

CoordinateMap::CoordinateMap(const SpacetimeParams& params, double spacing, double alpha,
                             std::vector<double> rho_star, std::vector<double> r,
                             std::vector<double> offset, std::vector<double> F)
    : params_(params),
      spacing_(spacing),
      alpha_(alpha),
      rho_star_(std::move(rho_star)),
      r_(std::move(r)),
      offset_(std::move(offset)),
      F_(std::move(F)) {}

CoordinateMap CoordinateMap::build(const SpacetimeParams& params, double rho_min,
                                   double rho_max, std::size_t n_points) {
  if (!(rho_min < 0.0 && rho_max > 0.0)) {
    throw std::invalid_argument("coordinate map requires rho_min < 0 < rho_max");
  }
  if (n_points < 16) {
    throw std::invalid_argument("coordinate map requires at least 16 points");
  }
  const double last = static_cast<double>(n_points - 1);
  std::vector<double> rho(n_points), r(n_points), offset(n_points), F(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double k = static_cast<double>(i);
    // Weighted form puts rho_* = 0 exactly on the middle node of symmetric grids.
    rho[i] = (rho_min * (last - k) + rho_max * k) / last;
    offset[i] = horizon_offset_of_rho_star(params, rho[i]);
    r[i] = params.r_plus() + offset[i];
    F[i] = metric_factor_from_offset(params, offset[i]);
  }
  const double spacing = (rho_max - rho_min) / last;
  return {params, spacing, photon_sphere_radius(params), std::move(rho), std::move(r),
          std::move(offset), std::move(F)};
}

std::size_t CoordinateMap::origin_index() const {
  const auto it = std::min_element(rho_star_.begin(), rho_star_.end(),
                                   [](double a, double b) { return std::abs(a) < std::abs(b); });
  return static_cast<std::size_t>(it - rho_star_.begin());
}

EddingtonFinkelstein eddington_finkelstein(double t, double rho_star, double mass) {
  constexpr double kMaxExponent = 700.0;
  EddingtonFinkelstein out{};
  out.s_minus = t - rho_star;
  out.s_plus = t + rho_star;
  double lower = -out.s_minus / (4.0 * mass);
  double upper = out.s_plus / (4.0 * mass);
  if (std::abs(lower) > kMaxExponent) {
    lower = std::copysign(kMaxExponent, lower);
    out.saturated = true;
  }
  if (std::abs(upper) > kMaxExponent) {
    upper = std::copysign(kMaxExponent, upper);
    out.saturated = true;
  }
  out.S_minus = -std::exp(lower);
  out.S_plus = std::exp(upper);
  return out;
}

}  // namespace rnwave
