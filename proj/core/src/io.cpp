#include "rnwave/io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rnwave {

int Table::find(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

std::vector<double> Table::column(const std::string& name) const {
  const int idx = find(name);
  if (idx < 0) {
    throw std::out_of_range("no column '" + name + "'");
  }
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    out.push_back(row[static_cast<std::size_t>(idx)]);
  }
  return out;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string label(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += (i ? "," : "") + table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_value(row[i]);
    }
    out += '\n';
  }
  return out;
}

Table parse_csv(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty CSV");
  }
  {
    std::istringstream header(line);
    std::string name;
    while (std::getline(header, name, ',')) {
      table.columns.push_back(name);
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      // strtod accepts nan and inf, which is what contamination checks need.
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw std::runtime_error("CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != table.columns.size()) {
      throw std::runtime_error("CSV line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                               " fields, expected " + std::to_string(table.columns.size()));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write " + tmp.string());
    }
    out << contents;
    out.flush();
    if (!out) {
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> series_columns(const FunctionalOptions& options, const std::vector<int>& ls) {
  std::vector<std::string> cols{"t", "E", "E_C", "flux", "wL2_beta2", "wL6"};
  for (double p : options.angular_powers) {
    cols.push_back("angE_p" + label(p));
  }
  for (double beta : options.betas) {
    if (beta != 2.0) {
      cols.push_back("wL2_beta" + label(beta));
    }
  }
  for (const char* name : {"E_C_positive", "E_normalized", "conformal_L2", "morawetz_bulk", "radial_local",
                           "photon_angular", "sobolev_lhs", "sobolev_rhs", "wL6_exact", "boundary_clear"}) {
    cols.emplace_back(name);
  }
  for (int l : ls) {
    cols.push_back("E_l" + std::to_string(l));
  }
  return cols;
}

Table series_table(const RunSeries& series) {
  std::vector<int> ls;
  for (const auto& m : series.config.modes) {
    ls.push_back(m.l);
  }
  Table table;
  table.columns = series_columns(series.options, ls);
  auto lookup = [](const std::map<double, double>& m, double key) {
    const auto it = m.find(key);
    return it == m.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
  };
  for (const auto& r : series.records) {
    std::vector<double> row{r.t, r.E_total, r.E_C, r.conformal_flux, lookup(r.weighted_L2, 2.0), r.weighted_L6};
    for (double p : series.options.angular_powers) {
      row.push_back(lookup(r.angular_local, p));
    }
    for (double beta : series.options.betas) {
      if (beta != 2.0) {
        row.push_back(lookup(r.weighted_L2, beta));
      }
    }
    row.insert(row.end(), {r.E_C_positive_form, r.E_normalized_form, r.conformal_L2, r.morawetz_bulk,
                           r.radial_derivative_local, r.photon_sphere_angular, r.sobolev_lhs, r.sobolev_rhs,
                           r.weighted_L6_exact ? 1.0 : 0.0, r.boundary_clear ? 1.0 : 0.0});
    for (int l : ls) {
      row.push_back(r.E_per_mode.at(l));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table geometry_table(const CoordinateMap& map) {
  Table table;
  table.columns = {"rho_star", "r", "F"};
  const auto rho = map.rho_star();
  const auto r = map.r();
  const auto F = map.F();
  for (std::size_t i = 0; i < map.size(); ++i) {
    table.rows.push_back({rho[i], r[i], F[i]});
  }
  return table;
}

Table potentials_table(const PotentialTable& pot, const std::vector<int>& ls) {
  Table table;
  table.columns = {"rho_star", "V", "V_L"};
  std::vector<double> ltilde_sq;
  for (int l : ls) {
    table.columns.push_back("V_l" + std::to_string(l));
    ltilde_sq.push_back(static_cast<double>(l) * static_cast<double>(l + 1));
  }
  table.columns.push_back("trapV");
  table.columns.push_back("trapVL");
  const auto rho = pot.map().rho_star();
  const auto V = pot.V();
  const auto VL = pot.VL();
  for (std::size_t i = 0; i < rho.size(); ++i) {
    std::vector<double> row{rho[i], V[i], VL[i]};
    for (double lsq : ltilde_sq) {
      row.push_back(V[i] + lsq * VL[i]);
    }
    row.push_back(pot.trap_V()[i]);
    row.push_back(pot.trap_VL()[i]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace rnwave
