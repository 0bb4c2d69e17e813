// rnwave: geometry and potential tables, mode evolution, verification reports.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "rnwave/analysis.hpp"
#include "rnwave/config.hpp"
#include "rnwave/io.hpp"

namespace fs = std::filesystem;
using namespace rnwave;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridArgs {
  double M = 1.0;
  double Q = 0.0;
  double rho_min = -50.0;
  double rho_max = 50.0;
  std::size_t n = 1001;
};

void add_grid_options(CLI::App* app, GridArgs& g) {
  app->add_option("--M", g.M, "mass")->capture_default_str();
  app->add_option("--Q", g.Q, "charge, |Q| <= M")->capture_default_str();
  app->add_option("--rho-min", g.rho_min, "left grid edge")->capture_default_str();
  app->add_option("--rho-max", g.rho_max, "right grid edge")->capture_default_str();
  app->add_option("--n", g.n, "grid nodes")->capture_default_str();
}

std::shared_ptr<const CoordinateMap> build_map(const GridArgs& g) {
  try {
    const SpacetimeParams params(g.M, g.Q);
    return std::make_shared<const CoordinateMap>(CoordinateMap::build(params, g.rho_min, g.rho_max, g.n));
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

void emit(const std::string& out_dir, const std::string& name, const std::string& contents) {
  if (out_dir.empty()) {
    std::cout << contents;
    return;
  }
  fs::create_directories(out_dir);
  write_file_atomic(fs::path(out_dir) / name, contents);
}

void mark_failed(const std::string& out_dir, const std::string& message) {
  if (out_dir.empty()) {
    return;
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  try {
    write_file_atomic(fs::path(out_dir) / "FAILED", message + "\n");
  } catch (const std::exception&) {
  }
}

void clear_failed(const std::string& out_dir) {
  std::error_code ec;
  fs::remove(fs::path(out_dir) / "FAILED", ec);
}

unsigned threads_from_env() {
  const char* env = std::getenv("RNWAVE_THREADS");
  if (env == nullptr || *env == '\0') {
    return 0;
  }
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 0) {
    throw ValidationError("RNWAVE_THREADS must be a non-negative integer");
  }
  return static_cast<unsigned>(n);
}

int run_evolve(const std::string& config_path, const std::string& out_dir) {
  const std::string text = read_file(config_path);
  const auto parsed = parse_config(text);
  if (!parsed.ok()) {
    std::string message = "invalid config " + config_path + ":";
    for (const auto& e : parsed.errors) {
      message += "\n  " + e;
    }
    throw ValidationError(message);
  }
  RunConfig config = *parsed.config;
  config.evolution.threads = threads_from_env();

  fs::create_directories(out_dir);
  clear_failed(out_dir);
  // Remove stale outputs first so a failed run leaves nothing misleading.
  for (const char* name : {"series.csv", "config.txt"}) {
    fs::remove(fs::path(out_dir) / name);
  }
  const auto series = record_run(config.evolution, config.functionals);
  write_file_atomic(fs::path(out_dir) / "config.txt", text);
  write_file_atomic(fs::path(out_dir) / "series.csv", to_csv(series_table(series)));
  std::cerr << "evolved " << series.records.size() << " snapshots to t=" << series.records.back().t << " (dt="
            << series.dt << ")\n";
  return kOk;
}

int run_verify(const std::string& run_dir) {
  const auto series_path = fs::path(run_dir) / "series.csv";
  if (!fs::exists(series_path)) {
    throw ValidationError("no series.csv in " + run_dir);
  }
  clear_failed(run_dir);
  for (const char* name : {"report.json", "report.txt"}) {
    fs::remove(fs::path(run_dir) / name);
  }
  const auto report = build_report(parse_csv(read_file(series_path)));
  write_file_atomic(fs::path(run_dir) / "report.json", report.to_json());
  const auto text = report.to_text();
  write_file_atomic(fs::path(run_dir) / "report.txt", text);
  std::cout << text;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear waves on Reissner-Nordstrom exteriors"};
  app.require_subcommand(1);

  GridArgs geo;
  std::string geo_out;
  auto* geometry = app.add_subcommand("geometry-table", "rho_star, r, F on a uniform rho_star grid");
  add_grid_options(geometry, geo);
  geometry->add_option("--out", geo_out, "output directory (default: stdout)");

  GridArgs pot;
  std::vector<int> ls{0, 1, 2};
  std::string pot_out;
  auto* potentials = app.add_subcommand("potentials-table", "V, V_L, V_l and trapping terms on the grid");
  add_grid_options(potentials, pot);
  potentials->add_option("--l", ls, "harmonic indices")->delimiter(',')->capture_default_str();
  potentials->add_option("--out", pot_out, "output directory (default: stdout)");

  std::string config_path;
  std::string evolve_out = "run";
  auto* evolve = app.add_subcommand("evolve", "evolve the configured modes and record functionals");
  evolve->add_option("--config", config_path, "key = value config file")->required();
  evolve->add_option("--out", evolve_out, "output directory")->capture_default_str();

  std::string run_dir;
  auto* verify = app.add_subcommand("verify", "check a run's series and write report.json, report.txt");
  verify->add_option("--run", run_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  std::string failure_dir;
  try {
    if (*geometry) {
      failure_dir = geo_out;
      emit(geo_out, "geometry.csv", to_csv(geometry_table(*build_map(geo))));
      if (!geo_out.empty()) clear_failed(geo_out);
      return kOk;
    }
    if (*potentials) {
      failure_dir = pot_out;
      for (int l : ls) {
        if (l < 0) throw ValidationError("--l values must be non-negative");
      }
      const auto table = PotentialTable::build(build_map(pot));
      emit(pot_out, "potentials.csv", to_csv(potentials_table(table, ls)));
      if (!pot_out.empty()) clear_failed(pot_out);
      return kOk;
    }
    if (*evolve) {
      failure_dir = evolve_out;
      return run_evolve(config_path, evolve_out);
    }
    failure_dir = run_dir;
    return run_verify(run_dir);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    mark_failed(failure_dir, e.what());
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    mark_failed(failure_dir, e.what());
    return kRuntime;
  }
}
