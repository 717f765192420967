#include "dpsqkd/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dpsqkd/serialize.hpp"

namespace dpsqkd {

const char* to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ConfigError("unknown output format '" + s + "' (expected csv or json)");
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& v, const std::string& where) {
  double x = 0.0;
  const char* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, x);
  if (v.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  }
  return x;
}

int parse_int(const std::string& v, const std::string& where) {
  int x = 0;
  const char* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, x);
  if (v.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(where + ": expected an integer, got '" + v + "'");
  }
  return x;
}

bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(where + ": expected true or false, got '" + v + "'");
}

FiniteSizeParams& finite(RunConfig& c) {
  if (!c.finite_size) c.finite_size.emplace();
  return *c.finite_size;
}

WcsParams& wcs(RunConfig& c) {
  if (!c.wcs) c.wcs.emplace();
  return *c.wcs;
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& section, const std::string& key,
                   const std::string& value, const std::string& where) {
  const std::string at = where + ": " + section + "." + key;
  auto num = [&] { return parse_double(value, at); };
  if (section == "channel") {
    if (key == "loss_db_per_km") c.channel.loss_db_per_km = num();
    else if (key == "dark_count_prob") c.channel.dark_count_prob = num();
    else if (key == "detector_efficiency") c.channel.detector_efficiency = num();
    else if (key == "baseline_error") c.channel.baseline_error = num();
    else if (key == "f_ec") c.channel.f_ec = num();
    else if (key == "n_pulses") c.channel.n_pulses = parse_int(value, at);
    else throw ConfigError(where + ": unknown key '" + key + "' in [channel]");
  } else if (section == "sweep") {
    if (key == "start_km") c.grid.start_km = num();
    else if (key == "stop_km") c.grid.stop_km = num();
    else if (key == "step_km") c.grid.step_km = num();
    else if (key == "attacks") {
      c.attacks = split(value, ',');
      for (const auto& a : c.attacks) {
        if (std::find(kKeyrateAttacks.begin(), kKeyrateAttacks.end(), a) == kKeyrateAttacks.end()) {
          throw ConfigError(at + ": unknown attack '" + a + "'");
        }
      }
    } else throw ConfigError(where + ": unknown key '" + key + "' in [sweep]");
  } else if (section == "finite_size") {
    if (key == "enabled") {
      if (parse_bool(value, at)) finite(c);
      else c.finite_size.reset();
    } else if (key == "n" || key == "n_key") finite(c).n_key = num();
    else if (key == "k" || key == "k_pe") finite(c).k_pe = num();
    else if (key == "eps" || key == "eps_prime") finite(c).eps_prime = num();
    else throw ConfigError(where + ": unknown key '" + key + "' in [finite_size]");
  } else if (section == "wcs") {
    if (key == "enabled") {
      if (parse_bool(value, at)) wcs(c);
      else c.wcs.reset();
    } else if (key == "mu") wcs(c).mu = num();
    else if (key == "slices") wcs(c).slices = parse_int(value, at);
    else if (key == "attacks" || key == "attack") {
      c.wcs_attacks.clear();
      for (const auto& a : split(value, ',')) {
        try {
          c.wcs_attacks.push_back(parse_wcs_attack(a));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(at + ": " + e.what());
        }
      }
    } else if (key == "usd_model") {
      if (value == "error-budget") c.wcs_options.usd_model = UsdModel::ErrorBudget;
      else if (value == "loss-exploiting") c.wcs_options.usd_model = UsdModel::LossExploiting;
      else throw ConfigError(at + ": expected error-budget or loss-exploiting");
    } else if (key == "mismatch") {
      if (value == "half-angle") c.wcs_options.reading = MismatchReading::HalfAngle;
      else if (value == "strict-text") c.wcs_options.reading = MismatchReading::StrictText;
      else throw ConfigError(at + ": expected half-angle or strict-text");
    } else throw ConfigError(where + ": unknown key '" + key + "' in [wcs]");
  } else if (section == "output") {
    if (key == "format") {
      try {
        c.format = parse_output_format(value);
      } catch (const ConfigError& e) {
        throw ConfigError(at + ": " + e.what());
      }
    } else if (key == "path") c.output_path = value;
    else throw ConfigError(where + ": unknown key '" + key + "' in [output]");
  } else {
    throw ConfigError(where + ": unknown section [" + section + "]");
  }
}

void apply_setting_list(RunConfig& c, const std::string& section, const std::string& list,
                        const std::string& where) {
  if (section == "finite_size") finite(c);
  if (section == "wcs") wcs(c);
  for (const auto& item : split(list, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value, got '" + item + "'");
    apply_setting(c, section, trim(item.substr(0, eq)), trim(item.substr(eq + 1)), where);
  }
}

RunConfig parse_config(std::istream& in, const std::string& source, RunConfig base) {
  std::string line;
  std::string section;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known = {"channel", "sweep", "finite_size", "wcs", "output"};
      if (!known.count(section)) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(section + "." + key).second) {
      throw ConfigError(where + ": duplicate key '" + key + "' in [" + section + "]");
    }
    apply_setting(base, section, key, value, where);
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  return parse_config(in, path, std::move(base));
}

std::optional<std::string> config_path_from_env() {
  const char* v = std::getenv("DPSQKD_CONFIG");
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

void RunConfig::validate() const {
  try {
    channel.validate();
    if (finite_size) finite_size->validate();
    if (wcs) wcs->validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(grid.step_km > 0.0)) throw ConfigError("sweep: step_km must be > 0");
  if (grid.start_km < 0.0) throw ConfigError("sweep: start_km must be >= 0");
  if (grid.stop_km < grid.start_km) throw ConfigError("sweep: stop_km must be >= start_km");
  if (attacks.empty()) throw ConfigError("sweep: attack list is empty");
  if (wcs_attacks.empty()) throw ConfigError("wcs: attack list is empty");
}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("channel.loss_db_per_km", format_number(c.channel.loss_db_per_km));
  e.emplace_back("channel.dark_count_prob", format_number(c.channel.dark_count_prob));
  e.emplace_back("channel.detector_efficiency", format_number(c.channel.detector_efficiency));
  e.emplace_back("channel.baseline_error", format_number(c.channel.baseline_error));
  e.emplace_back("channel.f_ec", format_number(c.channel.f_ec));
  e.emplace_back("channel.n_pulses", std::to_string(c.channel.n_pulses));
  e.emplace_back("sweep.start_km", format_number(c.grid.start_km));
  e.emplace_back("sweep.stop_km", format_number(c.grid.stop_km));
  e.emplace_back("sweep.step_km", format_number(c.grid.step_km));
  e.emplace_back("sweep.attacks", join(c.attacks));
  e.emplace_back("finite_size.enabled", c.finite_size ? "true" : "false");
  if (c.finite_size) {
    e.emplace_back("finite_size.n", format_number(c.finite_size->n_key));
    e.emplace_back("finite_size.k", format_number(c.finite_size->k_pe));
    e.emplace_back("finite_size.eps", format_number(c.finite_size->eps_prime));
  }
  e.emplace_back("wcs.enabled", c.wcs ? "true" : "false");
  if (c.wcs) {
    e.emplace_back("wcs.mu", format_number(c.wcs->mu));
    e.emplace_back("wcs.slices", std::to_string(c.wcs->slices));
  }
  std::vector<std::string> wa;
  for (auto a : c.wcs_attacks) wa.emplace_back(to_string(a));
  e.emplace_back("wcs.attacks", join(wa));
  e.emplace_back("wcs.usd_model",
                 c.wcs_options.usd_model == UsdModel::ErrorBudget ? "error-budget" : "loss-exploiting");
  e.emplace_back("wcs.mismatch",
                 c.wcs_options.reading == MismatchReading::HalfAngle ? "half-angle" : "strict-text");
  e.emplace_back("output.format", to_string(c.format));
  e.emplace_back("output.path", c.output_path);
  return e;
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream out;
  std::string current;
  for (const auto& [name, value] : resolved_entries(c)) {
    const auto dot = name.find('.');
    const std::string section = name.substr(0, dot);
    if (section != current) {
      out << (current.empty() ? "" : "\n") << "[" << section << "]\n";
      current = section;
    }
    out << name.substr(dot + 1) << " = " << value << "\n";
  }
  return out.str();
}

}  // namespace dpsqkd
