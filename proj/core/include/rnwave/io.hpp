#pragma once

// CSV tables with fixed "%.16e" formatting (17 significant digits), and the
// series layout used for run output.

#include <filesystem>
#include <string>
#include <vector>

#include "rnwave/functionals.hpp"

namespace rnwave {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column, or -1.
  [[nodiscard]] int find(const std::string& name) const;
  [[nodiscard]] bool has(const std::string& name) const { return find(name) >= 0; }
  /// Whole column; throws std::out_of_range for an unknown name.
  [[nodiscard]] std::vector<double> column(const std::string& name) const;
};

std::string format_value(double v);

std::string to_csv(const Table& table);
Table parse_csv(const std::string& text);

/// Writes via a temporary file and rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// Column names for a run, in output order. Leading columns are
/// t,E,E_C,flux,wL2_beta2,wL6,angE_p<p>...; diagnostics follow.
std::vector<std::string> series_columns(const FunctionalOptions& options, const std::vector<int>& ls);

/// Column label for a parameter value, e.g. 2 -> "2", 0.75 -> "0.75".
std::string label(double value);

Table series_table(const RunSeries& series);

/// rho_star, r, F on the map's grid.
Table geometry_table(const CoordinateMap& map);

/// rho_star, V, V_L, V_l for each l, trapV, trapVL.
Table potentials_table(const PotentialTable& table, const std::vector<int>& ls);

}  // namespace rnwave
