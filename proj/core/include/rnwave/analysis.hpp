#pragma once

// Post-processing of recorded series: decay fits, conservation and flux
// checks, saturation of space-time integrals, and the verification report.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rnwave/io.hpp"

namespace rnwave {

enum class CheckStatus { Pass, Fail, Inconclusive };
std::string to_string(CheckStatus status);

struct DecayFit {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log residuals
  std::size_t samples = 0;
};

/// Least squares in (log t, log y) over samples with t in [t_lo, t_hi].
/// Throws std::invalid_argument on fewer than 10 samples or any y <= 0.
DecayFit fit_decay_exponent(std::span<const double> t, std::span<const double> y, double t_lo, double t_hi);

struct ScalarCheck {
  CheckStatus status = CheckStatus::Inconclusive;
  double value = 0.0;
  double at_t = 0.0;
  std::string detail;
};

/// max |E(t) - E(t0)| / E(t0) while `clear` holds (empty = always). All-zero
/// energy counts as conserved; zero E(t0) with later nonzero E is inconclusive.
/// The status is left Inconclusive for the caller to grade.
ScalarCheck check_energy_drift(std::span<const double> t, std::span<const double> E,
                               std::span<const double> clear = {});

/// max over interior snapshots of |(E_C[k+1] - E_C[k-1]) / (t[k+1] - t[k-1]) - flux[k]| / max(E, |flux|),
/// restricted to the leading uniform-cadence, boundary-clear stretch.
ScalarCheck check_conformal_identity(std::span<const double> t, std::span<const double> E_C,
                                     std::span<const double> flux, std::span<const double> E,
                                     std::span<const double> clear = {});

struct SpacetimeIntegral {
  std::vector<double> cumulative;
  /// (I(T) - I(T/2)) / I(T); 0 when I(T) = 0.
  double saturation = 0.0;
};

/// Cumulative trapezoid in t; I(T/2) is interpolated linearly.
SpacetimeIntegral spacetime_integral(std::span<const double> t, std::span<const double> f);

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::Inconclusive;
  double measured = 0.0;
  std::string bound;
  double target = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ReportOptions {
  double drift_tolerance = 1e-6;
  double flux_tolerance = 0.01;
  double two_form_tolerance = 1e-10;
  double normalized_energy_tolerance = 1e-4;
  double domination_constant = 0.125;
  double local_decay_saturation = 0.1;
  double angular_saturation = 0.15;
  double fit_window_start = 0.25;  // fraction of T
  double l6_exponent = -1.0 / 3.0;
  double l2_exponent = -0.5;
  double exponent_slack = 0.05;
};

struct VerificationReport {
  std::vector<Check> checks;

  [[nodiscard]] const Check* find(const std::string& name) const;
  [[nodiscard]] std::string to_json() const;
  [[nodiscard]] std::string to_text() const;
};

/// One check per criterion; missing columns make that check inconclusive.
VerificationReport build_report(const Table& series, const ReportOptions& options = {});

}  // namespace rnwave
