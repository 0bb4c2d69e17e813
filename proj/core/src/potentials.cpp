#include "rnwave/potentials.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rnwave {

namespace {

void require_exterior(const SpacetimeParams& p, double r) {
  if (!(r > p.r_plus())) {
    throw std::domain_error("potential evaluated at r <= r+");
  }
}

// P_Q expanded about r+: exact cubic, with P_Q(r+) taken from its closed form
// so the critical double root is exactly zero.
double cubic_PQ_from_offset(const SpacetimeParams& p, double x) {
  const double M = p.mass();
  const double Q2 = p.charge() * p.charge();
  const double rp = p.r_plus();
  const double root = rp - M;  // sqrt(M^2 - Q^2)
  const double gap = root * root;
  const double p0 = -2.0 * (2.0 * M * M - Q2) * gap - 4.0 * M * root * gap;
  const double p1 = 9.0 * M * rp * rp - 8.0 * (Q2 + 2.0 * M * M) * rp + 15.0 * M * Q2;
  const double p2 = 9.0 * M * rp - 4.0 * (Q2 + 2.0 * M * M);
  const double p3 = 3.0 * M;
  return p0 + x * (p1 + x * (p2 + x * p3));
}

// r^2 - 3Mr + 2Q^2 expanded about r+, using r+^2 = 2M r+ - Q^2.
double angular_indicator_from_offset(const SpacetimeParams& p, double x) {
  const double M = p.mass();
  const double Q2 = p.charge() * p.charge();
  const double rp = p.r_plus();
  const double at_horizon = p.regime() == Regime::Critical ? 0.0 : Q2 - M * rp;
  return at_horizon + x * ((2.0 * rp - 3.0 * M) + x);
}

struct RadialValues {
  double V;
  double VL;
  double V_prime;
  double VL_prime;
};

RadialValues radial_values(const SpacetimeParams& p, double x) {
  const double M = p.mass();
  const double Q2 = p.charge() * p.charge();
  const double r = p.r_plus() + x;
  const double F = metric_factor_from_offset(p, x);
  const double r2 = r * r;
  const double r3 = r2 * r;
  const double dF = 2.0 * M / r2 - 2.0 * Q2 / r3;
  RadialValues out{};
  out.V = F * dF / r;
  out.VL = F / r2;
  out.V_prime = -2.0 * F * cubic_PQ_from_offset(p, x) / (r3 * r3 * r);
  out.VL_prime = -2.0 * F * angular_indicator_from_offset(p, x) / (r3 * r2);
  return out;
}

}  // namespace

double potential_V(const SpacetimeParams& params, double r) {
  require_exterior(params, r);
  return radial_values(params, r - params.r_plus()).V;
}

double potential_VL(const SpacetimeParams& params, double r) {
  require_exterior(params, r);
  return radial_values(params, r - params.r_plus()).VL;
}

double cubic_PQ(const SpacetimeParams& params, double r) {
  const double M = params.mass();
  const double Q2 = params.charge() * params.charge();
  return ((3.0 * M * r - 4.0 * (Q2 + 2.0 * M * M)) * r + 15.0 * M * Q2) * r - 6.0 * Q2 * Q2;
}

double potential_V_prime(const SpacetimeParams& params, double r) {
  require_exterior(params, r);
  return radial_values(params, r - params.r_plus()).V_prime;
}

double potential_VL_prime(const SpacetimeParams& params, double r) {
  require_exterior(params, r);
  return radial_values(params, r - params.r_plus()).VL_prime;
}

double trapping_term_V(const SpacetimeParams& params, double rho_star) {
  const auto v = radial_values(params, horizon_offset_of_rho_star(params, rho_star));
  return 2.0 * v.V + rho_star * v.V_prime;
}

double trapping_term_VL(const SpacetimeParams& params, double rho_star) {
  const auto v = radial_values(params, horizon_offset_of_rho_star(params, rho_star));
  return 2.0 * v.VL + rho_star * v.VL_prime;
}

double peak_indicator(const SpacetimeParams& params, int l, double horizon_offset) {
  const double r = params.r_plus() + horizon_offset;
  const double ltilde_sq = static_cast<double>(l) * static_cast<double>(l + 1);
  return cubic_PQ_from_offset(params, horizon_offset) / (r * r) +
         ltilde_sq * angular_indicator_from_offset(params, horizon_offset);
}

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

template <typename Range>
int count_sign_changes(const Range& values) {
  int changes = 0;
  int previous = 0;
  for (double v : values) {
    const int s = sign_of(v);
    if (s == 0) {
      continue;
    }
    if (previous != 0 && s != previous) {
      ++changes;
    }
    previous = s;
  }
  return changes;
}

}  // namespace

int count_peak_sign_changes(const SpacetimeParams& params, int l, double r_max,
                            std::size_t n_samples) {
  if (l < 0) {
    throw std::invalid_argument("harmonic index must be non-negative");
  }
  if (n_samples < 2 || !(r_max > params.r_plus())) {
    throw std::invalid_argument("peak scan needs r_max > r+ and at least two samples");
  }
  const double M = params.mass();
  const double x_lo = 1e-9 * M;
  const double x_hi = r_max - params.r_plus();
  const double ratio = std::log(x_hi / x_lo) / static_cast<double>(n_samples - 1);
  std::vector<double> samples(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double x = i + 1 == n_samples ? x_hi : x_lo * std::exp(ratio * static_cast<double>(i));
    samples[i] = peak_indicator(params, l, x);
  }
  return count_sign_changes(samples);
}

PotentialTable::PotentialTable(std::shared_ptr<const CoordinateMap> map) : map_(std::move(map)) {}

PotentialTable PotentialTable::build(std::shared_ptr<const CoordinateMap> map) {
  if (!map) {
    throw std::invalid_argument("potential table needs a coordinate map");
  }
  PotentialTable table(std::move(map));
  const auto& m = *table.map_;
  const std::size_t n = m.size();
  table.V_.resize(n);
  table.VL_.resize(n);
  table.V_prime_.resize(n);
  table.VL_prime_.resize(n);
  table.trap_V_.resize(n);
  table.trap_VL_.resize(n);
  const auto rho = m.rho_star();
  const auto offset = m.horizon_offset();
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = radial_values(m.params(), offset[i]);
    table.V_[i] = v.V;
    table.VL_[i] = v.VL;
    table.V_prime_[i] = v.V_prime;
    table.VL_prime_[i] = v.VL_prime;
    table.trap_V_[i] = 2.0 * v.V + rho[i] * v.V_prime;
    table.trap_VL_[i] = 2.0 * v.VL + rho[i] * v.VL_prime;
  }
  return table;
}

EffectivePotential effective_potential(const PotentialTable& table, int l) {
  if (l < 0) {
    throw std::invalid_argument("harmonic index must be non-negative");
  }
  const auto& map = table.map();
  const auto& params = map.params();
  const auto offset = map.horizon_offset();
  const std::size_t n = map.size();

  EffectivePotential out;
  out.l = l;
  out.ltilde_sq = static_cast<double>(l) * static_cast<double>(l + 1);
  out.values.resize(n);
  const auto V = table.V();
  const auto VL = table.VL();
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = V[i] + out.ltilde_sq * VL[i];
  }

  std::vector<double> indicator(n);
  for (std::size_t i = 0; i < n; ++i) {
    indicator[i] = peak_indicator(params, l, offset[i]);
  }
  const int changes = count_sign_changes(indicator);
  if (changes != 1) {
    throw std::runtime_error("effective potential for l=" + std::to_string(l) + " has " +
                             std::to_string(changes) + " critical points on the grid");
  }
  std::size_t hi = 1;
  while (hi < n && !(indicator[hi] > 0.0)) {
    ++hi;
  }
  double x_lo = offset[hi - 1];
  double x_hi = offset[hi];
  if (indicator[hi - 1] == 0.0) {
    x_hi = x_lo;
  }
  while (x_hi - x_lo > 1e-12 * params.mass()) {
    const double mid = 0.5 * (x_lo + x_hi);
    if (mid <= x_lo || mid >= x_hi) {
      break;
    }
    if (peak_indicator(params, l, mid) < 0.0) {
      x_lo = mid;
    } else {
      x_hi = mid;
    }
  }
  const double x_peak = 0.5 * (x_lo + x_hi);
  out.peak_r = params.r_plus() + x_peak;
  out.peak_rho_star = tortoise_of_offset(params, x_peak);
  return out;
}

TrappingEnvelopes trapping_envelopes(const PotentialTable& table) {
  const auto& map = table.map();
  const auto rho = map.rho_star();
  const std::size_t n = map.size();
  const bool critical = map.params().regime() == Regime::Critical;

  TrappingEnvelopes out;
  out.W.resize(n);
  out.W_L.resize(n);
  const auto trapV = table.trap_V();
  const auto trapVL = table.trap_VL();
  for (std::size_t i = 0; i < n; ++i) {
    out.W[i] = std::max(0.0, trapV[i]);
    out.W_L[i] = std::max(0.0, trapVL[i]);
  }

  auto support = [&](const std::vector<double>& w, bool allow_left_edge, const char* name,
                     bool& touches_left) -> Interval {
    std::size_t first = n;
    std::size_t last = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] > 0.0) {
        first = std::min(first, i);
        last = i;
      }
    }
    if (first == n) {
      throw std::runtime_error(std::string("trapping term ") + name + " is nowhere positive on the grid");
    }
    touches_left = first == 0;
    if ((touches_left && !allow_left_edge) || last + 1 == n) {
      throw std::runtime_error(std::string("positive region of ") + name +
                               " reaches the grid edge; widen the grid");
    }
    return {rho[touches_left ? 0 : first - 1], rho[last + 1]};
  };

  bool unused = false;
  out.support_V = support(out.W, false, "2V + rho V'", unused);
  out.support_VL = support(out.W_L, critical, "2V_L + rho V_L'", out.support_VL_unbounded_left);
  return out;
}

}  // namespace rnwave
