#include "rnwave/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <thread>

namespace rnwave {

namespace {

// Gaussian tails fall below 1e-16 of the peak beyond this many widths.
constexpr double kGaussianReach = 6.0697085553;
constexpr std::size_t kEdgeClearance = 10;

}  // namespace

InitialDataKind parse_initial_data_kind(const std::string& name) {
  if (name == "time_symmetric_gaussian") return InitialDataKind::TimeSymmetricGaussian;
  if (name == "ingoing_gaussian") return InitialDataKind::IngoingGaussian;
  if (name == "static_moment") return InitialDataKind::StaticMoment;
  throw std::invalid_argument("unknown initial data kind '" + name + "'");
}

std::string to_string(InitialDataKind kind) {
  switch (kind) {
    case InitialDataKind::TimeSymmetricGaussian:
      return "time_symmetric_gaussian";
    case InitialDataKind::IngoingGaussian:
      return "ingoing_gaussian";
    case InitialDataKind::StaticMoment:
      return "static_moment";
  }
  return "unknown";
}

InitialData make_initial_data(const InitialDataSpec& spec, int l, const CoordinateMap& map) {
  if (l < 0) {
    throw std::invalid_argument("harmonic index must be non-negative");
  }
  if (!(spec.width > 0.0)) {
    throw std::invalid_argument("initial data width must be positive");
  }
  const double lo = map.rho_min();
  const double hi = map.rho_max();
  const double margin = 0.1 * (hi - lo);
  if (spec.center < lo + margin || spec.center > hi - margin) {
    throw std::invalid_argument("initial data center must lie in the middle 80% of the grid");
  }
  const double clearance = static_cast<double>(kEdgeClearance) * map.spacing();
  const double reach = kGaussianReach * spec.width;
  if (spec.center - reach < lo + clearance || spec.center + reach > hi - clearance) {
    throw std::invalid_argument("initial data support comes within 10 cells of the grid edge");
  }

  const auto rho = map.rho_star();
  const std::size_t n = map.size();
  InitialData out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const double w2 = spec.width * spec.width;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = rho[i] - spec.center;
    const double g = spec.amplitude * std::exp(-d * d / w2);
    switch (spec.kind) {
      case InitialDataKind::TimeSymmetricGaussian:
        out.u0[i] = g;
        break;
      case InitialDataKind::IngoingGaussian:
        out.u0[i] = g;
        out.u1[i] = -2.0 * d / w2 * g;
        break;
      case InitialDataKind::StaticMoment:
        out.u1[i] = g;
        break;
    }
  }
  return out;
}

ModeStepper::ModeStepper(std::span<const double> potential, double spacing)
    : potential_(potential), spacing_(spacing), accel_(potential.size(), 0.0) {
  if (potential.size() < 3) {
    throw std::invalid_argument("stepper needs at least three grid points");
  }
  if (!(spacing > 0.0)) {
    throw std::invalid_argument("grid spacing must be positive");
  }
}

void ModeStepper::accelerate(std::span<const double> u) {
  const std::size_t n = u.size();
  const double inv_h2 = 1.0 / (spacing_ * spacing_);
  const double* p = potential_.data();
  double* a = accel_.data();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    a[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_h2 - p[i] * u[i];
  }
}

void ModeStepper::step(ModeState& state, double dt) {
  const std::size_t n = potential_.size();
  if (state.u.size() != n || state.v.size() != n) {
    throw std::invalid_argument("mode state does not match the grid");
  }
  if (!(dt > 0.0) || dt > kMaxCfl * spacing_ * (1.0 + 1e-12)) {
    throw std::invalid_argument("time step violates the CFL bound");
  }
  double* u = state.u.data();
  double* v = state.v.data();
  const double h = spacing_;
  const double half = 0.5 * dt;

  const double left0 = u[0], left1 = u[1], left2 = u[2];
  const double right0 = u[n - 1], right1 = u[n - 2], right2 = u[n - 3];

  accelerate(state.u);
  const double* a = accel_.data();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    v[i] += half * a[i];
    u[i] += dt * v[i];
  }

  // Outgoing conditions u_t = +u' (left) and u_t = -u' (right), trapezoidal in
  // time with one-sided second-order differences.
  const double c = dt / (4.0 * h);
  u[0] = (left0 + c * (-3.0 * left0 + 4.0 * left1 - left2) + c * (4.0 * u[1] - u[2])) /
         (1.0 + 3.0 * c);
  u[n - 1] = (right0 - c * (3.0 * right0 - 4.0 * right1 + right2) + c * (4.0 * u[n - 2] - u[n - 3])) /
             (1.0 + 3.0 * c);

  accelerate(state.u);
  double checksum = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    v[i] += half * a[i];
    checksum += std::abs(u[i]) + std::abs(v[i]);
  }
  v[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
  v[n - 1] = -(3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
  state.t += dt;

  checksum += std::abs(u[0]) + std::abs(u[n - 1]) + std::abs(v[0]) + std::abs(v[n - 1]);
  if (!std::isfinite(checksum)) {
    throw EvolutionError("non-finite values in mode l=" + std::to_string(state.l) +
                             " at t=" + std::to_string(state.t),
                         state.l, state.t);
  }
}

void step(ModeState& state, std::span<const double> potential, double spacing, double dt) {
  ModeStepper stepper(potential, spacing);
  stepper.step(state, dt);
}

void validate(const EvolutionConfig& config) {
  SpacetimeParams params(config.mass, config.charge);
  (void)params;
  if (!(config.rho_min < 0.0 && config.rho_max > 0.0)) {
    throw std::invalid_argument("grid must satisfy rho_min < 0 < rho_max");
  }
  if (config.n_points < 16) {
    throw std::invalid_argument("grid needs at least 16 points");
  }
  if (!(config.cfl > 0.0 && config.cfl <= kMaxCfl)) {
    throw std::invalid_argument("cfl must lie in (0, 0.9]");
  }
  if (!(config.t_end >= config.t0)) {
    throw std::invalid_argument("t_end must not precede t0");
  }
  if (!(config.snapshot_interval > 0.0)) {
    throw std::invalid_argument("snapshot interval must be positive");
  }
  if (config.modes.empty()) {
    throw std::invalid_argument("at least one mode is required");
  }
  std::set<int> seen;
  for (const auto& mode : config.modes) {
    if (mode.l < 0) {
      throw std::invalid_argument("harmonic index must be non-negative");
    }
    if (!seen.insert(mode.l).second) {
      throw std::invalid_argument("harmonic index l=" + std::to_string(mode.l) + " listed twice");
    }
    if (!(mode.weight > 0.0) || !std::isfinite(mode.weight)) {
      throw std::invalid_argument("mode weight must be positive");
    }
  }
}

Background make_background(const EvolutionConfig& config) {
  validate(config);
  Background bg;
  const SpacetimeParams params(config.mass, config.charge);
  bg.map = std::make_shared<const CoordinateMap>(
      CoordinateMap::build(params, config.rho_min, config.rho_max, config.n_points));
  bg.table = std::make_shared<const PotentialTable>(PotentialTable::build(bg.map));
  bg.effective.reserve(config.modes.size());
  for (const auto& mode : config.modes) {
    bg.effective.push_back(effective_potential(*bg.table, mode.l));
  }
  return bg;
}

TimeGrid time_grid(const EvolutionConfig& config, double spacing) {
  const double span = config.t_end - config.t0;
  const double nominal = config.cfl * spacing;
  TimeGrid grid{0, nominal, 1};
  if (span > 0.0) {
    grid.steps = static_cast<std::size_t>(std::ceil(span / nominal - 1e-9));
    grid.steps = std::max<std::size_t>(grid.steps, 1);
    grid.dt = span / static_cast<double>(grid.steps);
  }
  grid.steps_per_snapshot =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.snapshot_interval / grid.dt)));
  return grid;
}

namespace {

unsigned worker_count(unsigned requested, std::size_t modes) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, modes));
}

}  // namespace

EvolutionSummary evolve(const EvolutionConfig& config, const Background& background,
                        const Observer& observer) {
  validate(config);
  const auto& map = *background.map;
  if (background.effective.size() != config.modes.size()) {
    throw std::invalid_argument("background does not match the configured modes");
  }

  std::vector<ModeState> states;
  std::vector<ModeStepper> steppers;
  states.reserve(config.modes.size());
  steppers.reserve(config.modes.size());
  for (std::size_t k = 0; k < config.modes.size(); ++k) {
    auto data = make_initial_data(config.modes[k].data, config.modes[k].l, map);
    states.push_back(ModeState{config.modes[k].l, config.t0, std::move(data.u0), std::move(data.u1)});
    steppers.emplace_back(background.effective[k].values, map.spacing());
  }

  const TimeGrid grid = time_grid(config, map.spacing());
  EvolutionSummary summary;
  summary.dt = grid.dt;

  auto notify = [&](std::size_t step_index) {
    const double t = step_index == grid.steps ? config.t_end
                                              : config.t0 + static_cast<double>(step_index) * grid.dt;
    for (auto& s : states) {
      s.t = t;
    }
    if (observer) {
      observer(Snapshot{t, summary.snapshots, config, background, states});
    }
    ++summary.snapshots;
  };

  const unsigned workers = worker_count(config.threads, states.size());
  auto advance = [&](std::size_t k, std::size_t count) {
    for (std::size_t s = 0; s < count; ++s) {
      steppers[k].step(states[k], grid.dt);
    }
  };

  notify(0);
  std::size_t done = 0;
  while (done < grid.steps) {
    const std::size_t count = std::min(grid.steps_per_snapshot, grid.steps - done);
    if (workers <= 1) {
      for (std::size_t k = 0; k < states.size(); ++k) {
        advance(k, count);
      }
    } else {
      std::vector<std::exception_ptr> errors(states.size());
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t k = w; k < states.size(); k += workers) {
            try {
              advance(k, count);
            } catch (...) {
              errors[k] = std::current_exception();
            }
          }
        });
      }
      for (auto& th : pool) {
        th.join();
      }
      for (const auto& e : errors) {
        if (e) {
          std::rethrow_exception(e);
        }
      }
    }
    done += count;
    notify(done);
  }
  summary.steps = grid.steps;
  summary.final_time = config.t_end;
  return summary;
}

EvolutionSummary evolve(const EvolutionConfig& config, const Observer& observer) {
  const Background background = make_background(config);
  return evolve(config, background, observer);
}

std::vector<ModeState> evolve_to_end(const EvolutionConfig& config) {
  std::vector<ModeState> final_states;
  EvolutionConfig quiet = config;
  quiet.snapshot_interval = std::max(config.snapshot_interval, config.t_end - config.t0);
  evolve(quiet, [&](const Snapshot& snap) {
    if (snap.t == config.t_end) {
      final_states.assign(snap.modes.begin(), snap.modes.end());
    }
  });
  return final_states;
}

ConvergenceResult convergence_order(const EvolutionConfig& config, int refinements) {
  if (refinements < 3) {
    throw std::invalid_argument("convergence order needs at least three resolutions");
  }
  ConvergenceResult result;
  const bool all_zero = std::all_of(config.modes.begin(), config.modes.end(),
                                    [](const ModeSpec& m) { return m.data.amplitude == 0.0; });
  if (all_zero) {
    return result;
  }

  std::vector<std::vector<ModeState>> runs;
  std::vector<std::size_t> strides;
  std::size_t points = config.n_points;
  for (int k = 0; k < refinements; ++k) {
    EvolutionConfig refined = config;
    refined.n_points = points;
    runs.push_back(evolve_to_end(refined));
    strides.push_back(std::size_t{1} << k);
    points = 2 * points - 1;
  }

  const double h = (config.rho_max - config.rho_min) / static_cast<double>(config.n_points - 1);
  auto difference = [&](std::size_t a, std::size_t b) {
    double sum = 0.0;
    for (std::size_t m = 0; m < config.modes.size(); ++m) {
      const auto& ua = runs[a][m].u;
      const auto& ub = runs[b][m].u;
      for (std::size_t i = 0; i < config.n_points; ++i) {
        const double d = ua[i * strides[a]] - ub[i * strides[b]];
        sum += d * d;
      }
    }
    return std::sqrt(h * sum);
  };

  const std::size_t last = runs.size() - 1;
  result.coarse_difference = difference(last - 2, last - 1);
  result.fine_difference = difference(last - 1, last);
  result.measured = true;
  result.order = std::log2(result.coarse_difference / result.fine_difference);
  if (!(result.order >= 1.0)) {
    throw std::runtime_error("self-convergence order " + std::to_string(result.order) +
                             " is below 1");
  }
  return result;
}

}  // namespace rnwave
