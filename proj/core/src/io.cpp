#include "vwapexec/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vwapexec/quadrature.hpp"

namespace vwapexec {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::invalid_argument("csv: no column named '" + name + "'");
}

std::vector<double> CsvTable::column_values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[c]);
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? std::string{} : field.substr(first, last - first + 1));
  }
  return out;
}

double parse_number(const std::string& text, std::size_t line) {
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw std::invalid_argument("csv line " + std::to_string(line) + ": cannot parse '" + text + "'");
  return x;
}

TimeGrid grid_from_times(const std::vector<double>& t) {
  if (t.size() < 3) throw std::invalid_argument("csv: need at least 3 time nodes");
  if (t.front() != 0.0) throw std::invalid_argument("csv: time column must start at 0");
  const TimeGrid grid = build_grid(t.back(), t.size() - 1);
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::abs(t[i] - grid.node(i)) > 1e-9 * grid.horizon())
      throw std::invalid_argument("csv: time column is not a uniform grid");
  return grid;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split(line);
    if (table.columns.empty()) {
      table.columns = std::move(fields);
      continue;
    }
    if (fields.size() != table.columns.size())
      throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(table.columns.size()) + " fields");
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_number(f, lineno));
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw std::invalid_argument("csv: missing header");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  return read_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, table);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

CsvTable profile_table(const VolumeProfile& profile) {
  CsvTable t{{"t", "v", "V", "calV", "V2int"}, {}};
  const auto& g = profile.grid();
  for (std::size_t i = 0; i < g.size(); ++i)
    t.rows.push_back({g.node(i), profile.v()[i], profile.V()[i], profile.calV()[i], profile.V2int()[i]});
  return t;
}

VolumeProfile profile_from_table(const CsvTable& table) {
  const TimeGrid grid = grid_from_times(table.column_values("t"));
  return profile_from_samples(grid, table.column_values("v"));
}

CsvTable strategy_table(const Strategy& s, const InventoryCurve& inventory) {
  if (inventory.phi.size() != s.zeta.size()) throw std::invalid_argument("strategy_table: size mismatch");
  CsvTable t{{"t", "zeta", "phi"}, {}};
  for (std::size_t i = 0; i < s.grid.size(); ++i) t.rows.push_back({s.grid.node(i), s.zeta[i], inventory.phi[i]});
  return t;
}

CsvTable strategy_table(const Strategy& s) { return strategy_table(s, inventory_from_rate(s)); }

Strategy strategy_from_table(const CsvTable& table) {
  const TimeGrid grid = grid_from_times(table.column_values("t"));
  auto zeta = table.column_values("zeta");
  double Phi = 0.0;
  try {
    Phi = table.column_values("phi").front();
  } catch (const std::invalid_argument&) {
    Phi = trapezoid(zeta, grid.step());
  }
  return Strategy{grid, std::move(zeta), Phi, std::nullopt};
}

void to_json(nlohmann::json& j, const CostBreakdown& c) {
  j = {{"total", c.total}, {"permanent", c.permanent}, {"temporary", c.temporary}, {"price_risk", c.price_risk}};
}

void to_json(nlohmann::json& j, const MvValue& v) {
  j = {{"expectation", v.expectation}, {"variance", v.variance}, {"objective", v.objective}, {"lambda", v.lambda}};
}

void to_json(nlohmann::json& j, const SolveReport& r) {
  j = {{"objective", r.objective},
       {"iterations", r.iterations},
       {"kkt_residual", r.kkt_residual},
       {"active_bounds", r.active_bounds},
       {"status", to_string(r.status)}};
}

void to_json(nlohmann::json& j, const MomentEstimate& m) {
  j = {{"mean", m.mean},
       {"variance", m.variance},
       {"std_error_mean", m.std_error_mean},
       {"std_error_variance", m.std_error_variance},
       {"n_paths", m.n_paths}};
}

void to_json(nlohmann::json& j, const OrderingEntry& e) {
  j = {{"name", e.name},
       {"cost", e.cost},
       {"mean_gap", e.mean_gap},
       {"gap_std_error", e.gap_std_error},
       {"impact_gap", e.impact_gap},
       {"impact_gap_std_error", e.impact_gap_std_error}};
}

void to_json(nlohmann::json& j, const OrderingReport& r) {
  j = {{"reference", r.reference},
       {"candidates", r.candidates},
       {"anticipating", r.anticipating},
       {"anticipating_le_all", r.anticipating_le_all},
       {"reference_minimal", r.reference_minimal},
       {"anticipating_strictly_better", r.anticipating_strictly_better}};
}

}  // namespace vwapexec
