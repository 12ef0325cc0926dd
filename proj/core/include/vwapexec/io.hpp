#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vwapexec/cost.hpp"
#include "vwapexec/montecarlo.hpp"
#include "vwapexec/optimizer.hpp"
#include "vwapexec/strategy.hpp"
#include "vwapexec/volume.hpp"

namespace vwapexec {

/// Doubles are written with 17 significant digits so they read back exactly.
std::string format_double(double x);

/// Simple comma-separated table with a header row.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws std::invalid_argument if absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> column_values(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Columns t,v,V,calV,V2int.
CsvTable profile_table(const VolumeProfile& profile);
/// Reads columns t,v (others ignored); t must be a uniform grid from 0.
VolumeProfile profile_from_table(const CsvTable& table);

/// Columns t,zeta,phi.
CsvTable strategy_table(const Strategy& s);
CsvTable strategy_table(const Strategy& s, const InventoryCurve& inventory);
Strategy strategy_from_table(const CsvTable& table);

void to_json(nlohmann::json& j, const CostBreakdown& c);
void to_json(nlohmann::json& j, const MvValue& v);
void to_json(nlohmann::json& j, const SolveReport& r);
void to_json(nlohmann::json& j, const MomentEstimate& m);
void to_json(nlohmann::json& j, const OrderingEntry& e);
void to_json(nlohmann::json& j, const OrderingReport& r);

}  // namespace vwapexec
