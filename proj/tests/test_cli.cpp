#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "dpsqkd/commands.hpp"
#include "dpsqkd/config.hpp"
#include "dpsqkd/serialize.hpp"

using namespace dpsqkd;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.conf");
}

std::string config_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

struct Run {
  int status = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  Run r;
  const std::string cmd = std::string(DPSQKD_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

}  // namespace

TEST(Config, ParsesSectionsAndKeepsDefaults) {
  const auto c = parse(
      "# comment\n"
      "[channel]\n"
      "loss_db_per_km = 0.25\n"
      "dark_count_prob = 1e-7   # trailing comment\n"
      "\n"
      "[sweep]\n"
      "stop_km = 40\n"
      "attacks = med, low\n"
      "[finite_size]\n"
      "enabled = true\n"
      "k = 20000\n"
      "[output]\n"
      "format = json\n");
  EXPECT_DOUBLE_EQ(c.channel.loss_db_per_km, 0.25);
  EXPECT_DOUBLE_EQ(c.channel.dark_count_prob, 1e-7);
  EXPECT_DOUBLE_EQ(c.channel.detector_efficiency, 0.10);
  EXPECT_DOUBLE_EQ(c.grid.stop_km, 40.0);
  EXPECT_EQ(c.attacks, (std::vector<std::string>{"med", "low"}));
  ASSERT_TRUE(c.finite_size.has_value());
  EXPECT_DOUBLE_EQ(c.finite_size->k_pe, 20000.0);
  EXPECT_EQ(c.format, OutputFormat::Json);
}

TEST(Config, StrictErrorsCarryLineNumbers) {
  EXPECT_NE(config_error("[channel]\nbogus = 1\n").find("test.conf:2:"), std::string::npos);
  EXPECT_NE(config_error("[nowhere]\n").find("test.conf:1:"), std::string::npos);
  EXPECT_NE(config_error("[channel]\nf_ec = 1.1\nf_ec = 1.2\n").find("test.conf:3:"), std::string::npos);
  EXPECT_NE(config_error("f_ec = 1.1\n").find("test.conf:1:"), std::string::npos);
  EXPECT_NE(config_error("[channel]\n\nf_ec = abc\n").find("test.conf:3:"), std::string::npos);
  EXPECT_NE(config_error("[sweep]\nattacks = med, nope\n").find("test.conf:2:"), std::string::npos);
  EXPECT_NE(config_error("[channel]\nno equals sign\n").find("test.conf:2:"), std::string::npos);
  // Ranges are checked on the assembled configuration, not per line.
  EXPECT_THROW(parse("[channel]\ndetector_efficiency = 2\n").validate(), ConfigError);
}

TEST(Config, TextRoundTrip) {
  RunConfig c;
  c.channel.loss_db_per_km = 0.21;
  c.grid = {5, 60, 2.5};
  c.attacks = {"ir", "unconditional"};
  c.finite_size = FiniteSizeParams{2e6, 3e4, 1e-10};
  c.wcs = WcsParams{0.3, 8};
  c.wcs_options.usd_model = UsdModel::LossExploiting;
  c.format = OutputFormat::Json;
  const auto back = parse(to_config_text(c));
  EXPECT_EQ(resolved_entries(back), resolved_entries(c));
  EXPECT_EQ(to_config_text(back), to_config_text(c));
}

TEST(Config, SettingsAndEnvironment) {
  RunConfig c;
  apply_setting(c, "channel", "n_pulses", "4", "--set");
  EXPECT_EQ(c.channel.n_pulses, 4);
  apply_setting_list(c, "wcs", "mu=0.5,slices=32", "--wcs");
  ASSERT_TRUE(c.wcs.has_value());
  EXPECT_EQ(c.wcs->slices, 32);
  EXPECT_THROW(apply_setting(c, "channel", "n_pulses", "x", "--set"), ConfigError);
  ::setenv("DPSQKD_CONFIG", "/tmp/some.conf", 1);
  EXPECT_EQ(config_path_from_env().value_or(""), "/tmp/some.conf");
  ::setenv("DPSQKD_CONFIG", "", 1);
  EXPECT_FALSE(config_path_from_env().has_value());
  ::unsetenv("DPSQKD_CONFIG");
  EXPECT_THROW(load_config_file("/nonexistent/dir/x.conf"), ConfigError);
}

TEST(Commands, ExitCodesInProcess) {
  std::ostringstream out, err;
  RunConfig c;
  EXPECT_EQ(cmd_med(3, c, {out, err}), kExitOk);
  EXPECT_EQ(cmd_med(9, c, {out, err}), kExitConfigError);
  c.channel.n_pulses = 4;
  EXPECT_EQ(cmd_keyrate(c, {out, err}), kExitConfigError);
  c.attacks = {"low", "unconditional"};
  EXPECT_EQ(cmd_keyrate(c, {out, err}), kExitOk);
  EXPECT_THROW(parse_clone_mode("fancy"), ConfigError);
}

TEST(Commands, CsvAndJsonCarryTheSameNumbers) {
  RunConfig c;
  c.grid = {0, 50, 10};
  const auto table = keyrate_table(c);
  const auto entries = resolved_entries(c);
  const auto j = nlohmann::json::parse(sweep_to_json(table, entries));
  const auto names = sweep_column_names(table);
  EXPECT_EQ(j["column_order"].get<std::vector<std::string>>(), names);

  std::istringstream csv(sweep_to_csv(table, entries));
  std::string line;
  int configs = 0;
  std::getline(csv, line);
  while (line.rfind("# ", 0) == 0) {
    ++configs;
    std::getline(csv, line);
  }
  EXPECT_EQ(configs, static_cast<int>(entries.size()));
  EXPECT_EQ(line.substr(0, 12), "distance_km,");
  for (size_t r = 0; std::getline(csv, line); ++r) {
    std::istringstream cells(line);
    std::string cell;
    for (size_t col = 0; std::getline(cells, cell, ','); ++col) {
      EXPECT_DOUBLE_EQ(std::stod(cell), j["columns"][names[col]][r].get<double>());
    }
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("med --n 3").status, 0);
  EXPECT_EQ(run_cli("med --n 9").status, 2);
  EXPECT_EQ(run_cli("keyrate --bogus").status, 2);
  EXPECT_EQ(run_cli("--config /nonexistent.conf keyrate").status, 2);
  EXPECT_EQ(run_cli("keyrate --set channel.f_ec=abc").status, 2);
  EXPECT_EQ(run_cli("--help").status, 0);
}

TEST(Cli, OutputsAreByteIdenticalAcrossRuns) {
  for (const char* args : {"keyrate --stop 60", "wcs --format json", "clone --mode unitary",
                           "finite-size --stop 30"}) {
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    EXPECT_EQ(a.status, 0) << args;
    EXPECT_FALSE(a.out.empty()) << args;
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(Cli, ConfigFileFromEnvironmentAndOutputPath) {
  const auto dir = std::filesystem::temp_directory_path() / "dpsqkd_cli_test";
  std::filesystem::create_directories(dir);
  const auto conf = dir / "run.conf";
  const auto out = dir / "out.json";
  {
    std::ofstream f(conf);
    f << "[sweep]\nstop_km = 20\nattacks = med\n[output]\nformat = json\npath = " << out.string()
      << "\n";
  }
  const auto r = run_cli("keyrate --config " + conf.string());
  EXPECT_EQ(r.status, 0);
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["columns"]["distance_km"].size(), 5u);
  EXPECT_TRUE(j["columns"].contains("r_med_bits_per_pulse"));

  std::filesystem::remove(out);
  const std::string cmd = "DPSQKD_CONFIG=" + conf.string() + " " + DPSQKD_CLI_PATH +
                          " keyrate > /dev/null 2>&1";
  EXPECT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
  EXPECT_TRUE(std::filesystem::exists(out));
  std::filesystem::remove_all(dir);
}
