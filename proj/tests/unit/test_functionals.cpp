#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rnwave/functionals.hpp"

using namespace rnwave;

namespace {

std::shared_ptr<const PotentialTable> make_table(double Q, double lo, double hi, std::size_t n) {
  auto map = std::make_shared<const CoordinateMap>(CoordinateMap::build(SpacetimeParams(1, Q), lo, hi, n));
  return std::make_shared<const PotentialTable>(PotentialTable::build(map));
}

ModeState gaussian_state(const CoordinateMap& map, int l, double c, double w, double A, bool ingoing = false) {
  const auto d = make_initial_data({ingoing ? InitialDataKind::IngoingGaussian : InitialDataKind::TimeSymmetricGaussian,
                                    c, w, A},
                                   l, map);
  return ModeState{l, 1.0, d.u0, d.u1};
}

Field one(const ModeState& s) { return Field{std::span(&s, 1), {}}; }

// Random smooth state: a few Gaussians in u and v.
ModeState random_state(const CoordinateMap& map, int l, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> center(-15, 15), width(0.5, 3), amp(-2, 2);
  ModeState s{l, 1.0, std::vector<double>(map.size(), 0.0), std::vector<double>(map.size(), 0.0)};
  for (int k = 0; k < 3; ++k) {
    const double cu = center(rng), wu = width(rng), au = amp(rng);
    const double cv = center(rng), wv = width(rng), av = amp(rng);
    for (std::size_t i = 0; i < map.size(); ++i) {
      const double x = map.rho_star()[i];
      s.u[i] += au * std::exp(-(x - cu) * (x - cu) / (wu * wu));
      s.v[i] += av * std::exp(-(x - cv) * (x - cv) / (wv * wv));
    }
  }
  return s;
}

}  // namespace

TEST(Quadrature, TrapezoidAndDerivative) {
  std::vector<double> v{1, 1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(trapezoid(v, 0.5), 2.0);
  EXPECT_EQ(trapezoid(std::vector<double>{3.0}, 1.0), 0.0);
  std::vector<double> q(11);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = 0.5 * i * i;
  const auto d = centered_derivative(q, 1.0);
  for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(d[i], static_cast<double>(i), 1e-13);
}

TEST(Energy, ZeroState) {
  const auto table = make_table(0, -20, 20, 401);
  const ModeState z{0, 1.0, std::vector<double>(401, 0.0), std::vector<double>(401, 0.0)};
  EXPECT_EQ(energy(one(z), *table).total, 0.0);
  EXPECT_EQ(energy_normalized_form(one(z), *table), 0.0);
  EXPECT_EQ(conformal_charge(one(z), *table, 3.0), 0.0);
  EXPECT_EQ(conformal_charge_positive_form(one(z), *table, 3.0), 0.0);
  EXPECT_EQ(conformal_flux(one(z), *table, 3.0), 0.0);
  EXPECT_EQ(weighted_L2(one(z), table->map(), 2.0), 0.0);
  EXPECT_EQ(weighted_L6(one(z), table->map()).value, 0.0);
  EXPECT_THROW(sobolev_ratio(one(z), *table, 2.0), std::invalid_argument);
}

TEST(Energy, GaussianMatchesQuadratureOracle) {
  const auto table = make_table(0, -20, 20, 50001);
  const auto s = gaussian_state(table->map(), 0, 0, 1, 1);
  const double exact = oracle::gaussian_energy(1, 0, 0, 0, 1, 1, false);
  EXPECT_NEAR(energy(one(s), *table).total / exact, 1.0, 1e-6);
}

TEST(Energy, WeightedTotalAndPerMode) {
  const auto table = make_table(0, -30, 30, 1201);
  std::vector<ModeState> modes{gaussian_state(table->map(), 0, 0, 1, 1), gaussian_state(table->map(), 3, 2, 1, 1)};
  std::vector<double> weights{1.0, 7.0};
  const auto e = energy(Field{modes, weights}, *table);
  EXPECT_NEAR(e.total, e.per_mode.at(0) + 7.0 * e.per_mode.at(3), 1e-14 * e.total);
}

TEST(Energy, NormalizedFormAgrees) {
  const auto table = make_table(0.4, -40, 40, 3201);  // h = 0.025
  for (int l : {0, 2}) {
    for (bool ingoing : {false, true}) {
      const auto s = gaussian_state(table->map(), l, 1.5, 1, 1, ingoing);
      const double e = energy(one(s), *table).total;
      EXPECT_LE(std::abs(energy_normalized_form(one(s), *table) - e), 1e-4 * e) << "l=" << l;
    }
  }
}

TEST(ConformalCharge, TwoFormsAgreeOnRandomStates) {
  const auto table = make_table(0.3, -30, 30, 1201);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> time(1, 200);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_state(table->map(), trial % 5, rng);
    const double t = time(rng);
    const double a = conformal_charge(one(s), *table, t);
    const double b = conformal_charge_positive_form(one(s), *table, t);
    ASSERT_LE(std::abs(a - b), 1e-10 * (1 + std::abs(a))) << "trial " << trial;
    ASSERT_GE(b, 0.0);
  }
}

TEST(ConformalCharge, StaticDataKeepsPotentialTerms) {
  const auto table = make_table(0, -30, 30, 1201);
  const auto& map = table->map();
  const auto s = gaussian_state(map, 2, 1, 1, 1);  // v = 0
  const double t = 4.0;
  const auto du = centered_derivative(s.u, map.spacing());
  const auto eff = effective_potential(*table, 2);
  std::vector<double> gradient(map.size()), potential(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double w = t * t + map.rho_star()[i] * map.rho_star()[i];
    gradient[i] = 0.5 * w * du[i] * du[i];
    potential[i] = 0.5 * w * eff.values[i] * s.u[i] * s.u[i];
  }
  const double full = conformal_charge_positive_form(one(s), *table, t);
  EXPECT_NEAR(full - trapezoid(gradient, map.spacing()), trapezoid(potential, map.spacing()), 1e-13 * full);
}

TEST(ConformalCharge, GaussianMatchesQuadratureOracle) {
  const auto table = make_table(0, -20, 20, 50001);
  const auto s = gaussian_state(table->map(), 1, 2, 1, 1);
  const double t = 1.0;
  const auto density = [&](double rho) {
    const double x = rho - 2;
    const double g = std::exp(-x * x);
    const double dg = -2 * x * g;
    return (t * t + rho * rho) * 0.5 * (dg * dg + oracle::V_l(1, 0, 1, rho) * g * g);
  };
  const double exact = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(density, -10, 14, 20, 1e-13);
  EXPECT_NEAR(conformal_charge(one(s), *table, t) / exact, 1.0, 1e-6);
}

TEST(ConformalFlux, NegativeOutsideTrappingRegion) {
  const auto table = make_table(0, -100, 100, 4001);
  const auto far_out = gaussian_state(table->map(), 0, 50, 2, 1);
  EXPECT_LT(conformal_flux(one(far_out), *table, 10.0), 0.0);
  const auto far_in = gaussian_state(table->map(), 0, -50, 2, 1);
  EXPECT_LT(conformal_flux(one(far_in), *table, 10.0), 0.0);
  const auto peak = gaussian_state(table->map(), 0, 0, 0.5, 1);
  EXPECT_GT(conformal_flux(one(peak), *table, 10.0), 0.0);
}

TEST(WeightedL2, CancellationAndMonotonicity) {
  const auto table = make_table(0, -30, 30, 6001);
  const auto& map = table->map();
  for (double beta : {1.0, 2.0}) {
    ModeState s{0, 1.0, std::vector<double>(map.size()), std::vector<double>(map.size(), 0.0)};
    for (std::size_t i = 0; i < map.size(); ++i) {
      const double x = map.rho_star()[i];
      s.u[i] = std::pow(1 + x * x, beta / 2) * std::exp(-(x - 1) * (x - 1) / 4);
    }
    EXPECT_NEAR(weighted_L2(one(s), map, beta), std::sqrt(std::numbers::pi / 2) * 2, 1e-10);
  }
  const auto g = gaussian_state(map, 1, 3, 2, 1);
  EXPECT_GE(weighted_L2(one(g), map, 1.0), weighted_L2(one(g), map, 2.0));
  EXPECT_THROW(weighted_L2(one(g), map, 0.0), std::invalid_argument);
}

TEST(WeightedL2, NormEquivalence) {
  const auto table = make_table(0.5, -30, 30, 1201);
  std::mt19937_64 rng(7);
  const auto s = random_state(table->map(), 2, rng);
  EXPECT_NEAR(l2_norm_squared(one(s), table->map()), l2_norm_squared_tilde(one(s), table->map()),
              1e-13 * l2_norm_squared(one(s), table->map()));
}

TEST(WeightedL2, DominatedByConformalCharge) {
  const auto table = make_table(0, -40, 40, 1601);
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_state(table->map(), trial % 3, rng);
    for (double t : {1.0, 10.0, 50.0}) {
      EXPECT_LE(0.125 * conformal_weighted_L2(one(s), table->map(), t),
                conformal_charge_positive_form(one(s), *table, t));
    }
  }
}

TEST(Sphere, GaussLegendreAndHarmonics) {
  for (std::size_t n : {1u, 2u, 5u, 12u}) {
    const auto q = gauss_legendre(n);
    double sum = 0.0, moment = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sum += q.weights[j];
      moment += q.weights[j] * std::pow(q.nodes[j], 2 * n - 2);
    }
    EXPECT_NEAR(sum, 2.0, 1e-14);
    EXPECT_NEAR(moment, 2.0 / (2 * n - 1), 1e-14);
  }
  const auto q = gauss_legendre(20);
  for (int l : {0, 1, 4, 9}) {
    for (int k : {0, 1, 4, 9}) {
      double s = 0.0;
      for (std::size_t j = 0; j < 20; ++j) s += 2 * std::numbers::pi * q.weights[j] * ylm0(l, q.nodes[j]) * ylm0(k, q.nodes[j]);
      EXPECT_NEAR(s, l == k ? 1.0 : 0.0, 1e-13);
    }
  }
  EXPECT_THROW(gauss_legendre(0), std::invalid_argument);
}

TEST(WeightedL6, SingleMonopole) {
  const auto table = make_table(0, -30, 30, 1201);
  const auto& map = table->map();
  const auto s = gaussian_state(map, 0, 1, 1.5, 2);
  std::vector<double> density(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double F = map.F()[i], r = map.r()[i];
    density[i] = F * F * F / std::pow(r, 4) * std::pow(s.u[i], 6);
  }
  const double expected = std::pow(trapezoid(density, map.spacing()) / std::pow(4 * std::numbers::pi, 2), 1.0 / 6.0);
  const auto got = weighted_L6(one(s), map);
  EXPECT_NEAR(got.value, expected, 1e-13 * expected);
  EXPECT_TRUE(got.exact);
}

TEST(WeightedL6, TwoModesAgreeWithOversampledSphere) {
  const auto table = make_table(0, -30, 30, 1201);
  std::vector<ModeState> modes{gaussian_state(table->map(), 0, 0, 1, 1), gaussian_state(table->map(), 2, 1, 1.5, 0.7)};
  const auto coarse = weighted_L6(Field{modes, {}}, table->map());
  const auto fine = weighted_L6(Field{modes, {}}, table->map(), 10 * coarse.angular_nodes);
  EXPECT_TRUE(coarse.exact);
  EXPECT_NEAR(coarse.value, fine.value, 1e-8 * fine.value);
  const auto sparse = weighted_L6(Field{modes, {}}, table->map(), 3);
  EXPECT_FALSE(sparse.exact);
}

TEST(Weights, Morawetz) {
  const MorawetzWeight w{-1.2, 0.1, 2.0};
  EXPECT_EQ(morawetz_weight(w, -1.2).g, 0.0);
  EXPECT_NEAR(morawetz_weight(w, 1e9).g, 1.0, 1e-6);
  EXPECT_NEAR(morawetz_weight(w, -1.2 + 7).g, -morawetz_weight(w, -1.2 - 7).g, 1e-15);
  for (double sigma : {2.0, 3.0, 2.5}) {
    const MorawetzWeight ws{0.5, 0.3, sigma};
    for (double x : {-20.0, -1.0, 0.7, 4.0}) {
      const double h = 1e-5;
      const double fd = (morawetz_weight(ws, x + h).g - morawetz_weight(ws, x - h).g) / (2 * h);
      EXPECT_NEAR(morawetz_weight(ws, x).g_prime, fd, 1e-8);
    }
  }
  EXPECT_THROW(morawetz_weight(MorawetzWeight{0, 0.1, 1.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(morawetz_weight(MorawetzWeight{0, 0.0, 2.0}, 0.0), std::invalid_argument);
  const auto table = make_table(0, -50, 50, 1001);
  EXPECT_NEAR(morawetz_weight_for_mode(*table, 0, 0.1, 2.0).center, -1.0 / 3.0 + 2 * std::log(2.0 / 3.0), 1e-10);
}

TEST(Weights, AngularModulated) {
  const AngularModulatedWeight w{0.5, 0.1, 2.0};
  EXPECT_EQ(morawetz_weight(w, 3, 0.0).g, 0.0);
  const double L = std::sqrt(1.0 + 12.0);
  const double y = 0.1 * std::sqrt(L) * 5.0;
  EXPECT_NEAR(morawetz_weight(w, 3, 5.0).g, y / (1 + y), 1e-15);
  EXPECT_THROW(validate(WeightSpec{AngularModulatedWeight{0.5, 0.1, 1.5}}), std::invalid_argument);
  EXPECT_THROW(validate(WeightSpec{AngularModulatedWeight{0.7, 0.1, 2.0}}), std::invalid_argument);
}

TEST(Weights, ChiAlpha) {
  const ChiAlpha chi;
  EXPECT_EQ(chi_alpha(chi, 0.0), 1.0);
  EXPECT_EQ(chi_alpha(chi, -1.0), 1.0);
  EXPECT_EQ(chi_alpha(chi, 2.0), 0.0);
  EXPECT_EQ(chi_alpha(chi, -5.0), 0.0);
  double previous = 1.0;
  for (double x = 1.0; x <= 2.0; x += 0.01) {
    const double c = chi_alpha(chi, x);
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, previous + 1e-15);
    EXPECT_NEAR(c, chi_alpha(chi, -x), 1e-15);
    previous = c;
  }
  EXPECT_NEAR(chi_alpha(chi, 1.5), 0.5, 1e-15);
  EXPECT_THROW(validate(WeightSpec{ChiAlpha{2.0, 1.0}}), std::invalid_argument);
}

TEST(AngularLocal, Examples) {
  const auto table = make_table(0, -30, 30, 1201);
  const auto& map = table->map();
  const auto s = gaussian_state(map, 3, 0.5, 1, 1);
  const ChiAlpha wide{25, 28};
  EXPECT_NEAR(angular_local_energy(one(s), map, wide, 0.0), l2_norm_squared(one(s), map), 1e-13);
  const ChiAlpha chi;
  const double base = angular_local_energy(one(s), map, chi, 0.0);
  EXPECT_NEAR(angular_local_energy(one(s), map, chi, 0.75), std::pow(13.0, 0.75) * base, 1e-13 * base);
  EXPECT_THROW(angular_local_energy(one(s), map, chi, 2.5), std::invalid_argument);
}

TEST(Sobolev, HomogeneityAndBoundedFamily) {
  const auto table = make_table(0, -60, 60, 4801);
  const auto a = gaussian_state(table->map(), 0, 0, 1, 1);
  const auto b = gaussian_state(table->map(), 0, 0, 1, 5);
  EXPECT_NEAR(sobolev_ratio(one(a), *table, 3.0).ratio, sobolev_ratio(one(b), *table, 3.0).ratio, 1e-12);
  double lo = 1e300, hi = 0.0;
  for (double w : {0.5, 1.0, 2.0, 4.0}) {
    const auto s = gaussian_state(table->map(), 0, 0, w, 1);
    const double r = sobolev_ratio(one(s), *table, 1.0).ratio;
    EXPECT_TRUE(std::isfinite(r));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_LT(hi, 1.0);
  EXPECT_GT(lo, 0.0);
}

TEST(Evaluator, RecordMatchesIndividualFunctionals) {
  const auto table = make_table(0, -40, 40, 1601);
  std::vector<ModeState> modes{gaussian_state(table->map(), 0, 0, 1, 1), gaussian_state(table->map(), 2, 1, 1, 1)};
  std::vector<double> weights{1.0, 5.0};
  FunctionalOptions opts;
  opts.betas = {1.0, 2.0, 3.0};
  opts.angular_powers = {0.0, 0.75};
  const FunctionalEvaluator ev(table, {0, 2}, weights, opts);
  const auto rec = ev.evaluate(modes, 4.0);
  const Field field{modes, weights};
  EXPECT_EQ(rec.E_total, energy(field, *table).total);
  EXPECT_EQ(rec.E_C, conformal_charge(field, *table, 4.0));
  EXPECT_EQ(rec.weighted_L2.at(3.0), weighted_L2(field, table->map(), 3.0));
  EXPECT_EQ(rec.angular_local.at(0.75), angular_local_energy(field, table->map(), opts.chi, 0.75));
  EXPECT_TRUE(rec.boundary_clear);
  EXPECT_TRUE(rec.finite);
  EXPECT_GT(rec.radial_derivative_local, 0.0);
  EXPECT_GT(rec.photon_sphere_angular, 0.0);
  EXPECT_THROW(ev.evaluate(std::span(modes.data(), 1), 4.0), std::invalid_argument);
  FunctionalOptions bad;
  bad.betas = {-1.0};
  EXPECT_THROW(validate(bad), std::invalid_argument);
}
