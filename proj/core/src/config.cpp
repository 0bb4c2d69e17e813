#include "rnwave/config.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rnwave {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return "";
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) {
    parts.push_back(trim(part));
  }
  if (!s.empty() && s.back() == sep) {
    parts.emplace_back();
  }
  return parts;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("'" + s + "' is not a number");
  }
  if (used != s.size() || !std::isfinite(value)) {
    throw std::invalid_argument("'" + s + "' is not a finite number");
  }
  return value;
}

long long parse_integer(const std::string& s) {
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("'" + s + "' is not an integer");
  }
  if (used != s.size()) {
    throw std::invalid_argument("'" + s + "' is not an integer");
  }
  return value;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) {
    out.push_back(parse_double(part));
  }
  if (out.empty()) {
    throw std::invalid_argument("empty list");
  }
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += (i ? "," : "") + format_number(values[i]);
  }
  return out;
}

}  // namespace

ModeSpec parse_mode(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 5 && parts.size() != 6) {
    throw std::invalid_argument("mode '" + text + "' must be l:kind:center:width:amplitude[:weight]");
  }
  ModeSpec mode;
  const long long l = parse_integer(parts[0]);
  if (l < 0 || l > 1000) {
    throw std::invalid_argument("mode '" + text + "': l must lie in [0, 1000]");
  }
  mode.l = static_cast<int>(l);
  mode.data.kind = parse_initial_data_kind(parts[1]);
  mode.data.center = parse_double(parts[2]);
  mode.data.width = parse_double(parts[3]);
  mode.data.amplitude = parse_double(parts[4]);
  if (parts.size() == 6) {
    mode.weight = parse_double(parts[5]);
  }
  return mode;
}

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  auto& errors = result.errors;
  RunConfig config;
  auto& ev = config.evolution;
  auto& fn = config.functionals;
  bool have_modes = false;

  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"M", [&](const std::string& v) { ev.mass = parse_double(v); }},
      {"Q", [&](const std::string& v) { ev.charge = parse_double(v); }},
      {"rho_min", [&](const std::string& v) { ev.rho_min = parse_double(v); }},
      {"rho_max", [&](const std::string& v) { ev.rho_max = parse_double(v); }},
      {"n_points",
       [&](const std::string& v) {
         const long long n = parse_integer(v);
         if (n < 16) throw std::invalid_argument("must be at least 16");
         ev.n_points = static_cast<std::size_t>(n);
       }},
      {"cfl", [&](const std::string& v) { ev.cfl = parse_double(v); }},
      {"t0", [&](const std::string& v) { ev.t0 = parse_double(v); }},
      {"t_end", [&](const std::string& v) { ev.t_end = parse_double(v); }},
      {"snapshot_interval", [&](const std::string& v) { ev.snapshot_interval = parse_double(v); }},
      {"modes",
       [&](const std::string& v) {
         ev.modes.clear();
         have_modes = true;
         for (const auto& part : split(v, ',')) {
           ev.modes.push_back(parse_mode(part));
         }
       }},
      {"betas", [&](const std::string& v) { fn.betas = parse_list(v); }},
      {"angular_powers", [&](const std::string& v) { fn.angular_powers = parse_list(v); }},
      {"chi_plateau", [&](const std::string& v) { fn.chi.plateau = parse_double(v); }},
      {"chi_support", [&](const std::string& v) { fn.chi.support = parse_double(v); }},
      {"morawetz_b", [&](const std::string& v) { fn.modulation.b = parse_double(v); }},
      {"morawetz_sigma", [&](const std::string& v) { fn.modulation.sigma = parse_double(v); }},
      {"modulation_m", [&](const std::string& v) { fn.modulation.m = parse_double(v); }},
      {"sphere_order",
       [&](const std::string& v) {
         const long long n = parse_integer(v);
         if (n < 0) throw std::invalid_argument("must be non-negative");
         fn.sphere_nodes = static_cast<std::size_t>(n);
       }},
  };

  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto where = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected key = value");
      continue;
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      errors.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (!seen.insert(key).second) {
      errors.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    try {
      it->second(value);
    } catch (const std::exception& e) {
      errors.push_back(where + key + ": " + e.what());
    }
  }

  // Range checks, each reported independently.
  auto check = [&](bool ok, const std::string& message) {
    if (!ok) errors.push_back(message);
  };
  check(ev.mass > 0.0, "M must be positive");
  if (ev.mass > 0.0 && std::abs(ev.charge) > ev.mass * (1.0 + 1e-12)) {
    errors.push_back("supercritical: |Q| > M is not supported");
  }
  check(ev.rho_min < 0.0 && ev.rho_max > 0.0, "rho_min < 0 < rho_max is required");
  check(ev.cfl > 0.0 && ev.cfl <= kMaxCfl, "cfl must lie in (0, 0.9]");
  check(ev.t_end >= ev.t0, "t_end must not precede t0");
  check(ev.snapshot_interval > 0.0, "snapshot_interval must be positive");
  check(have_modes, "modes is required");
  std::set<int> ls;
  for (const auto& m : ev.modes) {
    check(ls.insert(m.l).second, "mode l=" + std::to_string(m.l) + " listed twice");
    check(m.weight > 0.0, "mode l=" + std::to_string(m.l) + ": weight must be positive");
    check(m.data.width > 0.0, "mode l=" + std::to_string(m.l) + ": width must be positive");
  }
  for (double b : fn.betas) {
    check(b > 0.0, "betas must be positive");
  }
  for (double p : fn.angular_powers) {
    check(p >= 0.0 && p <= 2.0, "angular_powers must lie in [0, 2]");
  }
  for (const WeightSpec& w : {WeightSpec{fn.chi}, WeightSpec{fn.modulation}}) {
    try {
      validate(w);
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }

  // Mode placement needs the grid, so only once the scalars are sound.
  if (errors.empty()) {
    try {
      const SpacetimeParams params(ev.mass, ev.charge);
      const auto map = CoordinateMap::build(params, ev.rho_min, ev.rho_max, ev.n_points);
      for (const auto& m : ev.modes) {
        try {
          (void)make_initial_data(m.data, m.l, map);
        } catch (const std::exception& e) {
          errors.push_back("mode l=" + std::to_string(m.l) + ": " + e.what());
        }
      }
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }

  if (errors.empty()) {
    result.config = std::move(config);
  }
  return result;
}

std::string to_config_text(const RunConfig& config) {
  const auto& ev = config.evolution;
  const auto& fn = config.functionals;
  std::string out;
  auto line = [&](const std::string& key, const std::string& value) { out += key + " = " + value + "\n"; };
  line("M", format_number(ev.mass));
  line("Q", format_number(ev.charge));
  line("rho_min", format_number(ev.rho_min));
  line("rho_max", format_number(ev.rho_max));
  line("n_points", std::to_string(ev.n_points));
  line("cfl", format_number(ev.cfl));
  line("t0", format_number(ev.t0));
  line("t_end", format_number(ev.t_end));
  line("snapshot_interval", format_number(ev.snapshot_interval));
  std::string modes;
  for (std::size_t i = 0; i < ev.modes.size(); ++i) {
    const auto& m = ev.modes[i];
    modes += (i ? "," : "") + std::to_string(m.l) + ":" + to_string(m.data.kind) + ":" +
             format_number(m.data.center) + ":" + format_number(m.data.width) + ":" +
             format_number(m.data.amplitude) + ":" + format_number(m.weight);
  }
  line("modes", modes);
  line("betas", join(fn.betas));
  line("angular_powers", join(fn.angular_powers));
  line("chi_plateau", format_number(fn.chi.plateau));
  line("chi_support", format_number(fn.chi.support));
  line("morawetz_b", format_number(fn.modulation.b));
  line("morawetz_sigma", format_number(fn.modulation.sigma));
  line("modulation_m", format_number(fn.modulation.m));
  line("sphere_order", std::to_string(fn.sphere_nodes));
  return out;
}

}  // namespace rnwave
