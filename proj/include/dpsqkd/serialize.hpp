#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dpsqkd/attacks.hpp"
#include "dpsqkd/keyrate.hpp"

namespace dpsqkd {

/// Fixed 12-significant-digit rendering shared by every emitter.
std::string format_number(double x);

/// Number rounded to 12 significant digits, so JSON output is as stable as CSV.
nlohmann::json json_number(double x);

nlohmann::json to_json(const HermitianOperator& op);
nlohmann::json to_json(const Eigen::MatrixXd& m);
nlohmann::json to_json(const KktReport& kkt);
nlohmann::json to_json(const MedResult& med);
nlohmann::json to_json(const CloningResult& clone);
nlohmann::json to_json(const AttackProfile& profile);

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// Column names: distance_km, e_b, e_eff, p_click, tau_<name>, r_<name>_bits_per_pulse.
std::vector<std::string> sweep_column_names(const SweepTable& table);
std::vector<std::vector<double>> sweep_columns(const SweepTable& table);

/// CSV with the resolved configuration as leading `# key = value` lines.
std::string sweep_to_csv(const SweepTable& table, const ConfigEntries& config);
/// {"config": {...}, "column_order": [...], "columns": {name: [values...]}}.
std::string sweep_to_json(const SweepTable& table, const ConfigEntries& config);

/// Generic columnar emitters for tables assembled by hand.
std::string columns_to_csv(const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& columns,
                           const ConfigEntries& config);
std::string columns_to_json(const std::vector<std::string>& names,
                            const std::vector<std::vector<double>>& columns,
                            const ConfigEntries& config);

/// Flattens a JSON report into `path,value` CSV lines (arrays indexed by position).
std::string report_to_csv(const nlohmann::json& report, const ConfigEntries& config);

nlohmann::json config_to_json(const ConfigEntries& config);

}  // namespace dpsqkd
