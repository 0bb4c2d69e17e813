#include "rnwave/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace rnwave {

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

DecayFit fit_decay_exponent(std::span<const double> t, std::span<const double> y, double t_lo, double t_hi) {
  if (t.size() != y.size()) {
    throw std::invalid_argument("time and value series differ in length");
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) {
      continue;
    }
    if (!(y[i] > 0.0) || !(t[i] > 0.0)) {
      throw std::invalid_argument("decay fit needs positive values; got " + std::to_string(y[i]) +
                                  " at t=" + std::to_string(t[i]));
    }
    xs.push_back(std::log(t[i]));
    ys.push_back(std::log(y[i]));
  }
  if (xs.size() < 10) {
    throw std::invalid_argument("decay fit window holds " + std::to_string(xs.size()) +
                                " samples; at least 10 are needed");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  DecayFit fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.samples = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

namespace {

std::size_t clear_prefix(std::span<const double> clear, std::size_t n) {
  if (clear.empty()) {
    return n;
  }
  std::size_t k = 0;
  while (k < n && clear[k] != 0.0) {
    ++k;
  }
  return k;
}

}  // namespace

ScalarCheck check_energy_drift(std::span<const double> t, std::span<const double> E,
                               std::span<const double> clear) {
  ScalarCheck out;
  if (t.size() != E.size() || t.size() < 2) {
    out.detail = "need at least two snapshots";
    return out;
  }
  const std::size_t end = clear_prefix(clear, t.size());
  if (end < 2) {
    out.detail = "boundary contact before the second snapshot";
    return out;
  }
  const double e0 = E[0];
  if (e0 == 0.0) {
    const bool all_zero = std::all_of(E.begin(), E.begin() + static_cast<std::ptrdiff_t>(end),
                                      [](double e) { return e == 0.0; });
    out.value = 0.0;
    out.status = all_zero ? CheckStatus::Pass : CheckStatus::Inconclusive;
    out.detail = all_zero ? "zero field" : "zero initial energy";
    return out;
  }
  for (std::size_t k = 0; k < end; ++k) {
    const double d = std::abs(E[k] - e0) / std::abs(e0);
    if (!(d <= out.value)) {
      out.value = d;
      out.at_t = t[k];
    }
  }
  out.detail = "window [" + label(t[0]) + ", " + label(t[end - 1]) + "]";
  return out;
}

ScalarCheck check_conformal_identity(std::span<const double> t, std::span<const double> E_C,
                                     std::span<const double> flux, std::span<const double> E,
                                     std::span<const double> clear) {
  ScalarCheck out;
  const std::size_t n = t.size();
  if (E_C.size() != n || flux.size() != n || E.size() != n || n < 3) {
    out.detail = "need at least three snapshots";
    return out;
  }
  std::size_t end = clear_prefix(clear, n);
  const double cadence = t[1] - t[0];
  for (std::size_t k = 1; k < end; ++k) {
    if (std::abs((t[k] - t[k - 1]) - cadence) > 1e-9 * std::max(1.0, std::abs(cadence))) {
      end = k;
      break;
    }
  }
  if (end < 3) {
    out.detail = "fewer than three uniform, boundary-clear snapshots";
    return out;
  }
  for (std::size_t k = 1; k + 1 < end; ++k) {
    const double rate = (E_C[k + 1] - E_C[k - 1]) / (t[k + 1] - t[k - 1]);
    const double scale = std::max(std::abs(E[k]), std::abs(flux[k]));
    if (scale == 0.0) {
      continue;
    }
    const double m = std::abs(rate - flux[k]) / scale;
    if (!(m <= out.value)) {
      out.value = m;
      out.at_t = t[k];
    }
  }
  out.detail = "window [" + label(t[0]) + ", " + label(t[end - 1]) + "]";
  return out;
}

SpacetimeIntegral spacetime_integral(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size()) {
    throw std::invalid_argument("time and integrand series differ in length");
  }
  SpacetimeIntegral out;
  out.cumulative.assign(t.size(), 0.0);
  for (std::size_t k = 1; k < t.size(); ++k) {
    out.cumulative[k] = out.cumulative[k - 1] + 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
  }
  if (t.empty()) {
    return out;
  }
  const double total = out.cumulative.back();
  if (total == 0.0) {
    return out;
  }
  const double half = 0.5 * t.back();
  double at_half = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (t[k] >= half) {
      const double s = (half - t[k - 1]) / (t[k] - t[k - 1]);
      at_half = out.cumulative[k - 1] + std::clamp(s, 0.0, 1.0) * (out.cumulative[k] - out.cumulative[k - 1]);
      break;
    }
  }
  out.saturation = (total - at_half) / total;
  return out;
}

const Check* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) {
      return &c;
    }
  }
  return nullptr;
}

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["checks"] = nlohmann::ordered_json::array();
  std::size_t passed = 0, failed = 0, inconclusive = 0;
  for (const auto& c : checks) {
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["status"] = to_string(c.status);
    j["measured"] = c.measured;
    j["bound"] = c.bound;
    j["target"] = c.target;
    j["tolerance"] = c.tolerance;
    j["detail"] = c.detail;
    doc["checks"].push_back(std::move(j));
    (c.status == CheckStatus::Pass ? passed : c.status == CheckStatus::Fail ? failed : inconclusive)++;
  }
  doc["summary"] = {{"pass", passed}, {"fail", failed}, {"inconclusive", inconclusive}};
  return doc.dump(2) + "\n";
}

std::string VerificationReport::to_text() const {
  std::string out;
  for (const auto& c : checks) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", c.measured);
    std::string status = to_string(c.status);
    std::transform(status.begin(), status.end(), status.begin(), [](unsigned char ch) { return std::toupper(ch); });
    status.resize(12, ' ');
    out += status + c.name + "  measured=" + buf;
    if (!c.bound.empty()) out += "  (" + c.bound + ")";
    if (!c.detail.empty()) out += "  " + c.detail;
    out += "\n";
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Check missing(const std::string& name, const std::string& column) {
  Check c;
  c.name = name;
  c.status = CheckStatus::Inconclusive;
  c.measured = std::numeric_limits<double>::quiet_NaN();
  c.detail = "series has no column '" + column + "'";
  return c;
}

// Grades `value` against an upper bound.
void grade_upper(Check& c, double value, double limit, bool strict) {
  c.measured = value;
  c.target = 0.0;
  c.tolerance = limit;
  c.bound = std::string(strict ? "< " : "<= ") + fmt(limit);
  const bool ok = strict ? value < limit : value <= limit;
  c.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
}

}  // namespace

VerificationReport build_report(const Table& series, const ReportOptions& options) {
  VerificationReport report;
  auto& checks = report.checks;
  const bool has_t = series.has("t") && !series.rows.empty();
  const auto t = has_t ? series.column("t") : std::vector<double>{};
  const auto clear = series.has("boundary_clear") ? series.column("boundary_clear") : std::vector<double>{};
  const bool all_clear = std::all_of(clear.begin(), clear.end(), [](double c) { return c != 0.0; });

  // Contamination.
  {
    Check c;
    c.name = "finite";
    c.bound = "no NaN or Inf";
    c.status = CheckStatus::Pass;
    for (std::size_t k = 0; k < series.rows.size() && c.status == CheckStatus::Pass; ++k) {
      for (std::size_t j = 0; j < series.columns.size(); ++j) {
        if (!std::isfinite(series.rows[k][j])) {
          c.status = CheckStatus::Fail;
          c.measured = static_cast<double>(k);
          c.detail = "non-finite " + series.columns[j] + " in row " + std::to_string(k) +
                     (has_t ? " (t=" + fmt(t[k]) + ")" : "");
          break;
        }
      }
    }
    if (series.rows.empty()) {
      c.status = CheckStatus::Inconclusive;
      c.detail = "empty series";
    }
    checks.push_back(c);
  }
  if (!has_t) {
    checks.push_back(missing("energy_drift", "t"));
    return report;
  }

  // Conservation.
  if (series.has("E")) {
    const auto E = series.column("E");
    const auto drift = check_energy_drift(t, E, clear);
    Check c;
    c.name = "energy_drift";
    grade_upper(c, drift.value, options.drift_tolerance, true);
    if (drift.detail.rfind("window", 0) == 0) {
      c.detail = drift.detail + ", max at t=" + fmt(drift.at_t);
    } else {
      c.status = drift.status == CheckStatus::Pass ? CheckStatus::Pass : CheckStatus::Inconclusive;
      c.detail = drift.detail;
    }
    checks.push_back(c);
  } else {
    checks.push_back(missing("energy_drift", "E"));
  }

  if (series.has("E_C") && series.has("flux") && series.has("E")) {
    const auto id = check_conformal_identity(t, series.column("E_C"), series.column("flux"), series.column("E"), clear);
    Check c;
    c.name = "conformal_flux_identity";
    if (id.detail.rfind("window", 0) == 0) {
      grade_upper(c, id.value, options.flux_tolerance, true);
      c.detail = id.detail + ", max at t=" + fmt(id.at_t);
    } else {
      c.status = CheckStatus::Inconclusive;
      c.detail = id.detail;
    }
    checks.push_back(c);
  } else {
    checks.push_back(missing("conformal_flux_identity", "E_C"));
  }

  if (series.has("E_C") && series.has("E_C_positive")) {
    const auto a = series.column("E_C");
    const auto b = series.column("E_C_positive");
    double worst = 0.0;
    double min_positive = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < a.size(); ++k) {
      worst = std::max(worst, std::abs(a[k] - b[k]) / (1.0 + std::abs(a[k])));
      min_positive = std::min(min_positive, b[k]);
    }
    Check c;
    c.name = "conformal_charge_two_forms";
    grade_upper(c, worst, options.two_form_tolerance, false);
    if (min_positive < 0.0) {
      c.status = CheckStatus::Fail;
      c.detail = "positive form went negative";
    }
    checks.push_back(c);
  } else {
    checks.push_back(missing("conformal_charge_two_forms", "E_C_positive"));
  }

  if (series.has("E") && series.has("E_normalized")) {
    const auto E = series.column("E");
    const auto En = series.column("E_normalized");
    const std::size_t end = clear.empty() ? E.size() : clear_prefix(clear, E.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < end; ++k) {
      if (E[k] != 0.0) worst = std::max(worst, std::abs(En[k] - E[k]) / std::abs(E[k]));
    }
    Check c;
    c.name = "energy_two_forms";
    grade_upper(c, worst, options.normalized_energy_tolerance, false);
    checks.push_back(c);
  } else {
    checks.push_back(missing("energy_two_forms", "E_normalized"));
  }

  if (series.has("E_C_positive") && series.has("conformal_L2")) {
    const auto ec = series.column("E_C_positive");
    const auto w = series.column("conformal_L2");
    double fitted = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ec.size(); ++k) {
      if (w[k] > 0.0) fitted = std::min(fitted, ec[k] / w[k]);
    }
    Check c;
    c.name = "weighted_L2_domination";
    c.target = options.domination_constant;
    c.bound = "C >= " + fmt(options.domination_constant);
    if (std::isinf(fitted)) {
      c.status = CheckStatus::Inconclusive;
      c.measured = std::numeric_limits<double>::quiet_NaN();
      c.detail = "zero field";
    } else {
      c.measured = fitted;
      c.status = fitted >= options.domination_constant ? CheckStatus::Pass : CheckStatus::Fail;
      c.detail = "largest admissible C = " + fmt(fitted);
    }
    checks.push_back(c);
  } else {
    checks.push_back(missing("weighted_L2_domination", "conformal_L2"));
  }

  // Space-time integrals.
  auto saturation_check = [&](const std::string& name, const std::string& column, double limit) {
    if (!series.has(column)) {
      checks.push_back(missing(name, column));
      return;
    }
    const auto s = spacetime_integral(t, series.column(column));
    Check c;
    c.name = name;
    if (s.cumulative.back() == 0.0) {
      c.status = CheckStatus::Inconclusive;
      c.detail = "integrand vanishes";
      checks.push_back(c);
      return;
    }
    grade_upper(c, s.saturation, limit, true);
    c.detail = "I(T)=" + fmt(s.cumulative.back()) + " at T=" + fmt(t.back());
    if (!all_clear) {
      c.status = CheckStatus::Inconclusive;
      c.detail += "; boundary contact during the run";
    }
    checks.push_back(c);
  };
  saturation_check("local_decay_beta2", "wL2_beta2", options.local_decay_saturation);
  for (const auto& col : series.columns) {
    if (col.rfind("angE_p", 0) == 0) {
      saturation_check("angular_local_" + col.substr(5), col, options.angular_saturation);
    }
  }

  // Decay exponents.
  auto decay_check = [&](const std::string& name, const std::string& column, bool take_root, double exponent) {
    if (!series.has(column)) {
      checks.push_back(missing(name, column));
      return;
    }
    auto y = series.column(column);
    if (take_root) {
      for (auto& v : y) v = std::sqrt(std::max(v, 0.0));
    }
    Check c;
    c.name = name;
    c.target = exponent;
    c.tolerance = options.exponent_slack;
    c.bound = "slope <= " + fmt(exponent + options.exponent_slack);
    const double T = t.back();
    try {
      const auto fit = fit_decay_exponent(t, y, options.fit_window_start * T, T);
      c.measured = fit.slope;
      c.status = fit.slope <= exponent + options.exponent_slack ? CheckStatus::Pass : CheckStatus::Fail;
      c.detail = "window [" + fmt(fit.t_lo) + ", " + fmt(fit.t_hi) + "], " + std::to_string(fit.samples) +
                 " samples, rms residual " + fmt(fit.residual);
      if (!all_clear) {
        c.status = CheckStatus::Inconclusive;
        c.detail += "; boundary contact during the run";
      }
    } catch (const std::invalid_argument& e) {
      c.status = CheckStatus::Inconclusive;
      c.measured = std::numeric_limits<double>::quiet_NaN();
      c.detail = e.what();
    }
    checks.push_back(c);
  };
  decay_check("decay_weighted_L6", "wL6", false, options.l6_exponent);
  decay_check("decay_weighted_L2_beta1", "wL2_beta1", true, options.l2_exponent);

  if (series.has("sobolev_lhs") && series.has("sobolev_rhs")) {
    const auto lhs = series.column("sobolev_lhs");
    const auto rhs = series.column("sobolev_rhs");
    double worst = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < lhs.size(); ++k) {
      if (rhs[k] > 0.0) {
        worst = std::max(worst, lhs[k] / rhs[k]);
        any = true;
      }
    }
    Check c;
    c.name = "sobolev_ratio";
    c.measured = any ? worst : std::numeric_limits<double>::quiet_NaN();
    c.bound = "finite";
    c.status = !any ? CheckStatus::Inconclusive : std::isfinite(worst) ? CheckStatus::Pass : CheckStatus::Fail;
    c.detail = any ? "largest ratio over the run; the constant is not fixed" : "zero field";
    checks.push_back(c);
  } else {
    checks.push_back(missing("sobolev_ratio", "sobolev_lhs"));
  }
  return report;
}

}  // namespace rnwave
