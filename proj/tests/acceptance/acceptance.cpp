// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rnwave/analysis.hpp"
#include "rnwave/evolution.hpp"
#include "rnwave/functionals.hpp"
#include "rnwave/geometry.hpp"
#include "rnwave/io.hpp"
#include "rnwave/potentials.hpp"

using namespace rnwave;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << (ok ? "" : "FAILED ") << what;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::shared_ptr<const CoordinateMap> make_map(double Q, double lo, double hi, std::size_t n) {
  return std::make_shared<const CoordinateMap>(CoordinateMap::build(SpacetimeParams(1, Q), lo, hi, n));
}

ModeSpec mode(int l, InitialDataKind kind, double center, double width, double amplitude = 1.0) {
  return ModeSpec{l, InitialDataSpec{kind, center, width, amplitude}, 1.0};
}

// ---------------------------------------------------------------------------

void geometry_goldens(Outcome& o) {
  const SpacetimeParams schw(1, 0);
  const SpacetimeParams crit(1, 1);
  o.require(std::abs(schw.r_plus() - 2.0) < 1e-15, "r+ = " + fmt(schw.r_plus()));
  o.require(std::abs(photon_sphere_radius(schw) - 3.0) < 1e-15, "alpha(Q=0) = " + fmt(photon_sphere_radius(schw)));
  o.require(std::abs(photon_sphere_radius(crit) - 2.0) < 1e-15, "alpha(Q=1) = " + fmt(photon_sphere_radius(crit)));
  const double r4 = tortoise_of_r(schw, 4.0);
  o.require(std::abs(r4 - (1 + 2 * std::log(2.0))) < 1e-13, "rho*(4) = " + fmt(r4));

  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (double Q : {0.0, 0.6, 1.0}) {
    const SpacetimeParams p(1, Q);
    std::uniform_real_distribution<double> logx(std::log(1e-6), std::log(1e3));
    for (int i = 0; i < 1000; ++i) {
      const double r = p.r_plus() + std::exp(logx(rng));
      worst = std::max(worst, std::abs(r_of_rho_star(p, tortoise_of_r(p, r)) - r));
    }
  }
  o.require(worst <= 1e-9, "round trip max |dr| = " + fmt(worst));
}

void potential_goldens(Outcome& o) {
  const SpacetimeParams schw(1, 0);
  o.require(std::abs(potential_V(schw, 3) - 2.0 / 81) < 1e-16, "V(3) = " + fmt(potential_V(schw, 3)));
  o.require(std::abs(potential_VL(schw, 3) - 1.0 / 27) < 1e-16, "V_L(3) = " + fmt(potential_VL(schw, 3)));
  o.require(std::abs(potential_V_prime(schw, 8.0 / 3)) < 1e-16, "V'(8/3) = " + fmt(potential_V_prime(schw, 8.0 / 3)));
  o.require(std::abs(potential_VL_prime(schw, 3)) < 1e-16, "V_L'(3) = " + fmt(potential_VL_prime(schw, 3)));

  double worst_order = 1e9;
  for (double Q : {0.0, 0.7, 1.0}) {
    double err[2];
    for (int k = 0; k < 2; ++k) {
      const auto table = PotentialTable::build(make_map(Q, -20, 20, k == 0 ? 401 : 801));
      const double h = table.map().spacing();
      double e = 0.0;
      for (std::size_t i = 1; i + 1 < table.map().size(); ++i) {
        e = std::max(e, std::abs((table.V()[i + 1] - table.V()[i - 1]) / (2 * h) - table.V_prime()[i]));
        e = std::max(e, std::abs((table.VL()[i + 1] - table.VL()[i - 1]) / (2 * h) - table.VL_prime()[i]));
      }
      err[k] = e;
    }
    worst_order = std::min(worst_order, std::log2(err[0] / err[1]));
  }
  o.require(worst_order >= 1.9, "derivative order >= " + fmt(worst_order));
}

void peak_structure(Outcome& o) {
  int bad = 0;
  for (double Q : {0.0, 0.5, 0.9, 1.0}) {
    for (int l = 0; l <= 100; ++l) {
      if (count_peak_sign_changes(SpacetimeParams(1, Q), l, 1e3) != 1) ++bad;
    }
  }
  o.require(bad == 0, "non-unique sign changes: " + std::to_string(bad));

  const auto table = PotentialTable::build(make_map(0, -50, 50, 1001));
  const double alpha0 = -1.0 / 3 + 2 * std::log(2.0 / 3);
  const double p0 = effective_potential(table, 0).peak_rho_star;
  o.require(std::abs(p0 - alpha0) < 1e-9, "(alpha_0)* = " + fmt(p0) + " vs -1/3 + 2 ln(2/3)");
  const double p1 = effective_potential(table, 1).peak_r;
  o.require(std::abs(p1 - (3 + std::sqrt(73.0)) / 4) < 1e-9, "alpha_1 r = " + fmt(p1));
  const double p50 = effective_potential(table, 50).peak_r;
  o.require(std::abs(p50 - 3) < 1e-3, "peak_r(50) - 3 = " + fmt(p50 - 3));
}

void trapping_signs(Outcome& o) {
  double worst = -1e300;
  for (double Q : {0.0, 0.5, 0.9}) {
    const auto table = PotentialTable::build(make_map(Q, -300, 300, 6001));
    const auto rho = table.map().rho_star();
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (std::abs(rho[i]) >= 50) worst = std::max(worst, table.trap_V()[i]);
    }
  }
  o.require(worst < 0, "max 2V+rho V' on |rho*|>=50 = " + fmt(worst));
  const double crit = trapping_term_VL(SpacetimeParams(1, 1), -100);
  o.require(crit > 0, "critical 2V_L+rho V_L' at -100 = " + fmt(crit));
}

void conservation(Outcome& o) {
  EvolutionConfig c;  // [-200, 200], h = 0.025, cfl 0.5, t in [1, 150]
  c.modes = {mode(0, InitialDataKind::IngoingGaussian, 0, 1)};
  const auto table = series_table(record_run(c, FunctionalOptions{}));
  const auto drift = check_energy_drift(table.column("t"), table.column("E"), table.column("boundary_clear"));
  o.require(drift.value < 1e-6, "drift = " + fmt(drift.value) + " (" + drift.detail + ")");
  const auto conv = convergence_order(c);
  o.require(conv.measured && std::abs(conv.order - 2) <= 0.2, "order = " + fmt(conv.order));
}

void conformal_identities(Outcome& o) {
  const auto map = make_map(0.4, -60, 60, 4801);
  const auto table = PotentialTable::build(map);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ModeState> states;
    for (int l = 0; l < 3; ++l) {
      ModeState s{l, 1 + 50 * (unit(rng) + 1), std::vector<double>(map->size(), 0.0),
                  std::vector<double>(map->size(), 0.0)};
      for (int g = 0; g < 3; ++g) {
        const double c = 30 * unit(rng);
        const double w = 1.5 + unit(rng);
        const double a = unit(rng);
        const double b = unit(rng);
        for (std::size_t i = 0; i < map->size(); ++i) {
          const double z = (map->rho_star()[i] - c) / w;
          const double e = std::exp(-z * z);
          s.u[i] += a * e;
          s.v[i] += b * z * e;
        }
      }
      states.push_back(std::move(s));
    }
    const Field f{states, {}};
    const double t = states[0].t;
    const double d = conformal_charge(f, table, t);
    const double p = conformal_charge_positive_form(f, table, t);
    worst = std::max(worst, std::abs(d - p) / std::abs(p));
  }
  o.require(worst <= 1e-10, "two forms max rel diff = " + fmt(worst));

  std::vector<double> mismatch;
  for (int k = 0; k < 3; ++k) {
    EvolutionConfig c;
    c.n_points = 16000 * (std::size_t{1} << k) + 1;
    c.snapshot_interval = 0.5 / (1 << k);
    c.t_end = 60;
    c.modes = {mode(0, InitialDataKind::IngoingGaussian, 0, 1)};
    const auto s = series_table(record_run(c, FunctionalOptions{}));
    mismatch.push_back(
        check_conformal_identity(s.column("t"), s.column("E_C"), s.column("flux"), s.column("E"),
                                 s.column("boundary_clear"))
            .value);
  }
  o.require(mismatch[0] < 0.01, "flux mismatch = " + fmt(mismatch[0]));
  for (int k = 0; k < 2; ++k) {
    const double ratio = mismatch[k] / mismatch[k + 1];
    o.require(std::abs(std::log2(ratio) - 2) <= 0.2, "refinement ratio = " + fmt(ratio));
  }
}

// Shared by the local decay, angular and headline decay criteria.
const VerificationReport& mixed_report() {
  static const VerificationReport report = [] {
    EvolutionConfig c;
    c.rho_min = -400;
    c.rho_max = 400;
    c.n_points = 32001;
    c.t_end = 200;
    for (int l = 0; l <= 2; ++l) c.modes.push_back(mode(l, InitialDataKind::TimeSymmetricGaussian, 10, 2));
    return build_report(series_table(record_run(c, FunctionalOptions{})));
  }();
  return report;
}

void require_check(Outcome& o, const std::string& name) {
  const auto* c = mixed_report().find(name);
  if (c == nullptr) {
    o.require(false, name + " missing");
    return;
  }
  o.require(c->status == CheckStatus::Pass, name + " = " + fmt(c->measured) + " (" + to_string(c->status) + ")");
}

void local_decay(Outcome& o) { require_check(o, "local_decay_beta2"); }
void angular_modulation(Outcome& o) { require_check(o, "angular_local_p0.75"); }

void headline_decay(Outcome& o) {
  require_check(o, "decay_weighted_L6");
  require_check(o, "decay_weighted_L2_beta1");
}

void linearity_determinism(Outcome& o) {
  EvolutionConfig c;
  c.rho_min = -80;
  c.rho_max = 80;
  c.n_points = 3201;
  c.t_end = 60;
  c.snapshot_interval = 1;

  // Superposition through the stepper: evolve a, b and a + 2.5 b.
  const auto background = [&] {
    c.modes = {mode(1, InitialDataKind::TimeSymmetricGaussian, 0, 1)};
    return make_background(c);
  }();
  const auto& map = *background.map;
  const auto a = make_initial_data({InitialDataKind::TimeSymmetricGaussian, -5, 1, 1}, 1, map);
  const auto b = make_initial_data({InitialDataKind::IngoingGaussian, 10, 2, 1}, 1, map);
  ModeState sa{1, 1, a.u0, a.u1};
  ModeState sb{1, 1, b.u0, b.u1};
  ModeState sab{1, 1, a.u0, a.u1};
  for (std::size_t i = 0; i < map.size(); ++i) {
    sab.u[i] += 2.5 * b.u0[i];
    sab.v[i] += 2.5 * b.u1[i];
  }
  ModeStepper stepper(background.effective[0].values, map.spacing());
  const double dt = 0.5 * map.spacing();
  for (int k = 0; k < 2000; ++k) {
    stepper.step(sa, dt);
    stepper.step(sb, dt);
    stepper.step(sab, dt);
  }
  double err = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    err = std::max(err, std::abs(sab.u[i] - sa.u[i] - 2.5 * sb.u[i]));
    scale = std::max(scale, std::abs(sab.u[i]));
  }
  o.require(err <= 1e-13 * scale, "superposition residual = " + fmt(err / scale));

  c.modes = {mode(0, InitialDataKind::TimeSymmetricGaussian, 0, 1), mode(1, InitialDataKind::IngoingGaussian, 10, 2),
             mode(2, InitialDataKind::StaticMoment, -10, 1.5)};
  c.threads = 1;
  const auto first = to_csv(series_table(record_run(c, FunctionalOptions{})));
  const auto again = to_csv(series_table(record_run(c, FunctionalOptions{})));
  c.threads = 3;
  const auto threaded = to_csv(series_table(record_run(c, FunctionalOptions{})));
  o.require(first == again, "rerun byte-identical");
  o.require(first == threaded, "threaded run byte-identical");
}

struct Criterion {
  int number;
  const char* name;
  double budget_seconds;
  std::function<void(Outcome&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "geometry goldens", 1, geometry_goldens},
      {2, "potential goldens", 1, potential_goldens},
      {3, "peak structure", 5, peak_structure},
      {4, "trapping signs", 1, trapping_signs},
      {5, "conservation", 60, conservation},
      {6, "conformal identities", 120, conformal_identities},
      {7, "local decay", 180, local_decay},
      {8, "angular modulation", 180, angular_modulation},
      {9, "headline decay", 300, headline_decay},
      {10, "linearity and determinism", 60, linearity_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(seconds <= c.budget_seconds, "runtime " + fmt(seconds) + "s of " + fmt(c.budget_seconds) + "s");
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.number, c.name, o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
