#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dpsqkd/keyrate.hpp"
#include "dpsqkd/wcs.hpp"

namespace dpsqkd {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

const char* to_string(OutputFormat f);
OutputFormat parse_output_format(const std::string& s);

struct DistanceGrid {
  double start_km = 0.0;
  double stop_km = 150.0;
  double step_km = 5.0;
};

/// Key-rate sweep columns accepted in [sweep] attacks.
inline const std::vector<std::string> kKeyrateAttacks = {"ir",      "med", "cloning",
                                                         "unitary", "low", "unconditional"};

struct RunConfig {
  ChannelModel channel;
  std::vector<std::string> attacks = kKeyrateAttacks;
  DistanceGrid grid;
  std::optional<FiniteSizeParams> finite_size;
  std::optional<WcsParams> wcs;
  std::vector<WcsAttack> wcs_attacks = {WcsAttack::InterceptResend, WcsAttack::Usd,
                                        WcsAttack::PhaseRandomized};
  WcsOptions wcs_options;
  OutputFormat format = OutputFormat::Csv;
  std::string output_path;  // empty: standard output

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// Flat `key = value` text with [section] headers and `#` comments.
/// Sections: channel, sweep, finite_size, wcs, output. Unknown sections,
/// unknown keys, duplicate keys and malformed values raise ConfigError with a
/// `source:line:` prefix. Values not present keep their value from `base`.
RunConfig parse_config(std::istream& in, const std::string& source, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Set one `section.key` as if it had been read from a file.
void apply_setting(RunConfig& config, const std::string& section, const std::string& key,
                   const std::string& value, const std::string& where);

/// Parses "a=1,b=2" lists used by --finite-size and --wcs flags into the given section.
void apply_setting_list(RunConfig& config, const std::string& section, const std::string& list,
                        const std::string& where);

/// Path from the DPSQKD_CONFIG environment variable, if set and non-empty.
std::optional<std::string> config_path_from_env();

/// Fully resolved configuration as ordered (section.key, value) pairs.
std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& config);

/// Serializes a configuration in the file format; parse_config reads it back.
std::string to_config_text(const RunConfig& config);

}  // namespace dpsqkd
