#include <deque>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dpsqkd/commands.hpp"
#include "dpsqkd/config.hpp"

namespace {

struct Flag {
  CLI::Option* option = nullptr;
  std::string section;
  std::string key;
  std::string value;
};

// Registers a string flag that maps onto one configuration key.
void add_setting_flag(CLI::App* app, std::deque<Flag>& flags, const std::string& name,
                      const std::string& section, const std::string& key, const std::string& help) {
  flags.push_back(Flag{nullptr, section, key, {}});
  flags.back().option = app->add_option(name, flags.back().value, help);
}

void add_channel_flags(CLI::App* app, std::deque<Flag>& flags) {
  add_setting_flag(app, flags, "--loss", "channel", "loss_db_per_km", "Fiber loss in dB/km");
  add_setting_flag(app, flags, "--dark-count", "channel", "dark_count_prob", "Dark-count probability per slot");
  add_setting_flag(app, flags, "--efficiency", "channel", "detector_efficiency", "Detector efficiency");
  add_setting_flag(app, flags, "--baseline-error", "channel", "baseline_error", "Baseline error B");
  add_setting_flag(app, flags, "--f-ec", "channel", "f_ec", "Error-correction inefficiency");
  add_setting_flag(app, flags, "--pulses", "channel", "n_pulses", "Pulses per block");
  add_setting_flag(app, flags, "--start", "sweep", "start_km", "First distance in km");
  add_setting_flag(app, flags, "--stop", "sweep", "stop_km", "Last distance in km");
  add_setting_flag(app, flags, "--step", "sweep", "step_km", "Distance step in km");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dpsqkd;

  CLI::App app{"DPS QKD attack and key-rate analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string format;
  std::string output;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "Configuration file (default: $DPSQKD_CONFIG)");
  app.add_option("--format", format, "Output format: csv or json");
  app.add_option("--output", output, "Output file (default: standard output)");
  app.add_option("--set", sets, "Override section.key=value (repeatable)");

  std::deque<Flag> flags;
  std::string finite_list;
  std::string wcs_list;

  int med_n = 3;
  auto* med = app.add_subcommand("med", "Minimum-error discrimination attack");
  med->add_option("--n", med_n, "Pulses per block (3..6)");

  std::string clone_mode = "optimal";
  auto* clone = app.add_subcommand("clone", "Cloning attacks");
  clone->add_option("--mode", clone_mode, "optimal or unitary");

  auto* keyrate = app.add_subcommand("keyrate", "Key-rate and shrinking-factor sweep");
  add_channel_flags(keyrate, flags);
  add_setting_flag(keyrate, flags, "--attacks", "sweep", "attacks",
                   "Columns: ir,med,cloning,unitary,low,unconditional");
  auto* keyrate_fs = keyrate->add_option("--finite-size", finite_list, "n=...,k=...,eps=...");

  auto* finite = app.add_subcommand("finite-size", "Asymptotic versus finite-size key rates");
  add_channel_flags(finite, flags);
  add_setting_flag(finite, flags, "--attacks", "sweep", "attacks", "Rate columns");
  add_setting_flag(finite, flags, "--n-key", "finite_size", "n", "Key block length n");
  add_setting_flag(finite, flags, "--k", "finite_size", "k", "Parameter-estimation sample size k");
  add_setting_flag(finite, flags, "--eps", "finite_size", "eps", "Failure probability eps'");
  auto* finite_fs = finite->add_option("--finite-size", finite_list, "n=...,k=...,eps=...");

  auto* wcs = app.add_subcommand("wcs", "Weak-coherent-state key rates");
  add_channel_flags(wcs, flags);
  auto* wcs_params = wcs->add_option("--wcs", wcs_list, "mu=...,slices=...");
  add_setting_flag(wcs, flags, "--attack", "wcs", "attacks", "ir,usd,phase-randomized");
  add_setting_flag(wcs, flags, "--usd-model", "wcs", "usd_model", "error-budget or loss-exploiting");
  add_setting_flag(wcs, flags, "--mismatch", "wcs", "mismatch", "half-angle or strict-text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) {
      config = load_config_file(config_path);
    } else if (auto env = config_path_from_env()) {
      config = load_config_file(*env);
    }
    const std::string where = "command line";
    for (const auto& f : flags) {
      if (f.option->count() > 0) apply_setting(config, f.section, f.key, f.value, where);
    }
    if (keyrate_fs->count() > 0 || finite_fs->count() > 0) {
      apply_setting_list(config, "finite_size", finite_list, where);
    }
    if (wcs_params->count() > 0) apply_setting_list(config, "wcs", wcs_list, where);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      const auto dot = s.find('.');
      if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw ConfigError(where + ": --set expects section.key=value, got '" + s + "'");
      }
      apply_setting(config, s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1),
                    where);
    }
    if (!format.empty()) config.format = parse_output_format(format);
    if (!output.empty()) config.output_path = output;
    config.validate();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const CommandIo io{std::cout, std::cerr};
  if (*med) return cmd_med(med_n, config, io);
  if (*clone) {
    try {
      return cmd_clone(parse_clone_mode(clone_mode), config, io);
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitConfigError;
    }
  }
  if (*keyrate) return cmd_keyrate(config, io);
  if (*finite) return cmd_finite_size(config, io);
  if (*wcs) return cmd_wcs(config, io);
  return kExitConfigError;
}
