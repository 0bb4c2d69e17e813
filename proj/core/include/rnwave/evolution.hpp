#pragma once

// Time-domain evolution of single spherical-harmonic modes of
//   u_tt = u'' - V_l u
// on a uniform rho_* grid: kick-drift-kick leapfrog in time, second-order
// centered Laplacian in space, and outgoing (Sommerfeld) conditions at both
// edges.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rnwave/geometry.hpp"
#include "rnwave/potentials.hpp"

namespace rnwave {

enum class InitialDataKind { TimeSymmetricGaussian, IngoingGaussian, StaticMoment };

InitialDataKind parse_initial_data_kind(const std::string& name);
std::string to_string(InitialDataKind kind);

struct InitialDataSpec {
  InitialDataKind kind = InitialDataKind::TimeSymmetricGaussian;
  double center = 0.0;
  double width = 1.0;
  double amplitude = 1.0;
};

struct InitialData {
  std::vector<double> u0;
  std::vector<double> u1;
};

/// Gaussian data on the map's grid. Rejects non-positive widths, centers
/// outside the middle 80% of the grid, and pulses whose numerical support
/// (|rho_* - center| < 6.07 width) comes within 10 cells of an edge.
InitialData make_initial_data(const InitialDataSpec& spec, int l, const CoordinateMap& map);

struct ModeState {
  int l = 0;
  double t = 1.0;
  std::vector<double> u;
  std::vector<double> v;
};

/// Raised when a step produces non-finite values.
class EvolutionError : public std::runtime_error {
 public:
  EvolutionError(const std::string& what, int l, double t)
      : std::runtime_error(what), l_(l), t_(t) {}
  [[nodiscard]] int l() const { return l_; }
  [[nodiscard]] double t() const { return t_; }

 private:
  int l_;
  double t_;
};

/// Largest stable Courant factor accepted by the stepper.
inline constexpr double kMaxCfl = 0.9;

/// Advances one mode by dt. Owns the acceleration scratch buffer so repeated
/// calls do not allocate.
class ModeStepper {
 public:
  /// `potential` is V_l on the grid; it must outlive the stepper.
  ModeStepper(std::span<const double> potential, double spacing);

  void step(ModeState& state, double dt);

 private:
  void accelerate(std::span<const double> u);

  std::span<const double> potential_;
  double spacing_;
  std::vector<double> accel_;
};

/// Free-function form of a single step.
void step(ModeState& state, std::span<const double> potential, double spacing, double dt);

struct ModeSpec {
  int l = 0;
  InitialDataSpec data;
  /// Multiplicity used in quadratic functionals (emulates m-degeneracy).
  double weight = 1.0;
};

struct EvolutionConfig {
  double mass = 1.0;
  double charge = 0.0;
  double rho_min = -200.0;
  double rho_max = 200.0;
  std::size_t n_points = 16001;
  std::vector<ModeSpec> modes;
  double t0 = 1.0;
  double t_end = 150.0;
  double cfl = 0.5;
  double snapshot_interval = 0.5;
  /// Worker threads for mode-parallel stepping; 0 picks hardware concurrency.
  unsigned threads = 1;
};

/// Throws std::invalid_argument listing the first violated constraint.
void validate(const EvolutionConfig& config);

/// Background shared by all modes of a run.
struct Background {
  std::shared_ptr<const CoordinateMap> map;
  std::shared_ptr<const PotentialTable> table;
  std::vector<EffectivePotential> effective;  // one per mode, config order
};

Background make_background(const EvolutionConfig& config);

/// Read-only view handed to observers at each snapshot.
struct Snapshot {
  double t;
  std::size_t index;
  const EvolutionConfig& config;
  const Background& background;
  std::span<const ModeState> modes;
};

using Observer = std::function<void(const Snapshot&)>;

struct EvolutionSummary {
  std::size_t steps = 0;
  std::size_t snapshots = 0;
  double dt = 0.0;
  double final_time = 0.0;
};

/// Number of steps and step size actually used: dt = cfl * h, shrunk so that
/// an integer number of steps lands exactly on t_end.
struct TimeGrid {
  std::size_t steps;
  double dt;
  std::size_t steps_per_snapshot;
};
TimeGrid time_grid(const EvolutionConfig& config, double spacing);

/// Runs every mode from t0 to t_end, calling `observer` at t0, every
/// snapshot_interval, and at t_end. Throws EvolutionError on contamination.
EvolutionSummary evolve(const EvolutionConfig& config, const Background& background,
                        const Observer& observer);
EvolutionSummary evolve(const EvolutionConfig& config, const Observer& observer);

/// Final states only.
std::vector<ModeState> evolve_to_end(const EvolutionConfig& config);

struct ConvergenceResult {
  /// False when the data is identically zero and no order can be measured.
  bool measured = false;
  double order = 0.0;
  double coarse_difference = 0.0;
  double fine_difference = 0.0;
};

/// Self-convergence order from runs at h, h/2, h/4 (nested grids), comparing
/// final states on the coarse nodes in discrete L2. Throws std::runtime_error
/// when the measured order is below 1.
ConvergenceResult convergence_order(const EvolutionConfig& config, int refinements = 3);

}  // namespace rnwave
