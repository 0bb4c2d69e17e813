#pragma once

// Flat `key = value` run configuration. Lines starting with `#` are comments.
//
//   key               default                    meaning
//   M                 1                          mass
//   Q                 0                          charge, |Q| <= M
//   rho_min           -200                       left grid edge (rho_*)
//   rho_max           200                        right grid edge
//   n_points          16001                      grid nodes
//   cfl               0.5                        dt / h, at most 0.9
//   t0                1                          start time
//   t_end             150                        final time
//   snapshot_interval 0.5                        record cadence
//   modes             (required)                 l:kind:center:width:amplitude[:weight], comma separated
//   betas             1,2                        weighted L2 exponents
//   angular_powers    0.75                       exponents p of ||L^p chi u||^2
//   chi_plateau       1                          cutoff plateau half-width
//   chi_support       2                          cutoff support half-width
//   morawetz_b        0.1                        modulated weight scale
//   morawetz_sigma    2                          modulated weight decay exponent
//   modulation_m      0.5                        power of L in the modulated weight
//   sphere_order      0                          Gauss-Legendre nodes, 0 = 3 l_max + 2

#include <optional>
#include <string>
#include <vector>

#include "rnwave/evolution.hpp"
#include "rnwave/functionals.hpp"

namespace rnwave {

struct RunConfig {
  EvolutionConfig evolution;
  FunctionalOptions functionals;
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;

  [[nodiscard]] bool ok() const { return config.has_value(); }
};

/// Parses and validates; collects every error rather than stopping at the first.
ParseResult parse_config(const std::string& text);

/// `l:kind:center:width:amplitude[:weight]`.
ModeSpec parse_mode(const std::string& text);

/// Canonical text form; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const RunConfig& config);

}  // namespace rnwave
