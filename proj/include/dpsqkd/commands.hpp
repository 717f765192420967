#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "dpsqkd/config.hpp"
#include "dpsqkd/keyrate.hpp"

namespace dpsqkd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverFailure = 3;

enum class CloneMode { Optimal, Unitary };
CloneMode parse_clone_mode(const std::string& s);

struct CommandIo {
  std::ostream& out;
  std::ostream& err;
};

// Report builders. They throw on failure; the cmd_* wrappers map exceptions
// to exit codes.

/// MED dossier for the n-pulse ensemble, 3 <= n <= 6.
nlohmann::json med_report(int n);
nlohmann::json clone_report(CloneMode mode);
/// Sweep over the configured grid with the configured attack columns.
SweepTable keyrate_table(const RunConfig& config);

struct FiniteSizeTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
};
/// Asymptotic and finite-size rates side by side, plus the deviation t.
FiniteSizeTable finite_size_table(const RunConfig& config);
SweepTable wcs_table(const RunConfig& config);

int cmd_med(int n, const RunConfig& config, CommandIo io);
int cmd_clone(CloneMode mode, const RunConfig& config, CommandIo io);
int cmd_keyrate(const RunConfig& config, CommandIo io);
int cmd_finite_size(const RunConfig& config, CommandIo io);
int cmd_wcs(const RunConfig& config, CommandIo io);

}  // namespace dpsqkd
