#include "dpsqkd/commands.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>

#include "dpsqkd/attacks.hpp"
#include "dpsqkd/serialize.hpp"
#include "dpsqkd/wcs.hpp"

namespace dpsqkd {

CloneMode parse_clone_mode(const std::string& s) {
  if (s == "optimal") return CloneMode::Optimal;
  if (s == "unitary") return CloneMode::Unitary;
  throw ConfigError("unknown clone mode '" + s + "' (expected optimal or unitary)");
}

namespace {

nlohmann::json numbers(const std::vector<double>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (double x : v) out.push_back(json_number(x));
  return out;
}

nlohmann::json operators(const std::vector<HermitianOperator>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& op : v) out.push_back(to_json(op));
  return out;
}

bool selected(const RunConfig& c, const std::string& name) {
  return std::find(c.attacks.begin(), c.attacks.end(), name) != c.attacks.end();
}

std::vector<AttackProfile> selected_profiles(const RunConfig& c) {
  std::vector<std::string> explicit_names;
  for (const auto& a : c.attacks) {
    if (a != "low" && a != "unconditional") explicit_names.push_back(a);
  }
  if (explicit_names.empty()) return {};
  if (c.channel.n_pulses != 3) {
    throw ConfigError("channel.n_pulses: explicit attack profiles are defined for 3 pulses only");
  }
  const AttackSet set = standard_attack_set();
  std::vector<AttackProfile> out;
  for (const auto& name : explicit_names) {
    for (const auto& p : set.profiles) {
      if (p.name == name) out.push_back(p);
    }
  }
  return out;
}

void emit(const std::string& text, const RunConfig& config, CommandIo io) {
  if (config.output_path.empty()) {
    io.out << text;
    return;
  }
  std::ofstream f(config.output_path, std::ios::binary);
  if (!f) throw ConfigError("output.path: cannot write '" + config.output_path + "'");
  f << text;
}

void emit_report(const std::string& command, const nlohmann::json& result,
                 const ConfigEntries& entries, const RunConfig& config, CommandIo io) {
  if (config.format == OutputFormat::Json) {
    nlohmann::json doc = {{"command", command}, {"config", config_to_json(entries)}, {"result", result}};
    emit(doc.dump(2) + "\n", config, io);
  } else {
    emit(report_to_csv(result, entries), config, io);
  }
}

int guarded(CommandIo io, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const SolverError& e) {
    io.err << "error: solver failure (" << to_string(e.status()) << "): " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const ConfigError& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::out_of_range& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::domain_error& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace

nlohmann::json med_report(int n) {
  if (n < 3 || n > 6) throw ConfigError("med: n must lie in [3, 6]");
  const DpsEnsemble ens = dps_ensemble(n);
  const MedResult med = med_attack(ens);
  nlohmann::json r = to_json(med);
  r["n"] = n;
  r["per_intercept_error"] = json_number(1.0 - med.p_success);
  r["intercept_fraction_per_unit_e_b"] = json_number(1.0 / (1.0 - med.p_success));
  return r;
}

nlohmann::json clone_report(CloneMode mode) {
  const DpsEnsemble ens = dps_ensemble(3);
  nlohmann::json r;
  std::vector<HermitianOperator> bob;
  std::vector<HermitianOperator> eve;
  if (mode == CloneMode::Optimal) {
    const CloningResult c = optimal_cloner(ens);
    r = to_json(c);
    r["mode"] = "optimal";
    std::vector<double> p;
    std::vector<double> residual;
    for (int i = 0; i < ens.size(); ++i) {
      const auto fit = depolarizing_fit(ens.density(i), c.bob_states[i]);
      p.push_back(fit.p);
      residual.push_back(fit.residual);
    }
    r["depolarizing_p"] = numbers(p);
    r["depolarizing_residual"] = numbers(residual);
    bob = c.bob_states;
    eve = c.eve_states;
  } else {
    const auto basis = dps3_cloner_basis();
    const UnitaryOptimum opt = optimize_unitary_q(ens.states, ens.priors, basis);
    const auto params = UnitaryClonerParams::make(opt.q_opt, basis);
    std::vector<double> fid;
    for (const auto& psi : ens.states) {
      auto out = apply_unitary_cloner(params, psi);
      fid.push_back(fidelity_pure(psi, out.bob));
      bob.push_back(std::move(out.bob));
      eve.push_back(std::move(out.eve));
    }
    r["mode"] = "unitary";
    r["q_opt"] = json_number(opt.q_opt);
    r["p"] = json_number(params.p);
    r["unitarity_residual"] = json_number(params.unitarity_residual());
    r["avg_fidelity"] = json_number(opt.avg_fidelity);
    r["per_state_clone_fidelity"] = numbers(fid);
    r["bob_states"] = operators(bob);
    r["eve_states"] = operators(eve);
  }
  const auto ber = per_state_ber(bob, ens);
  const auto ber_cond = per_state_ber(bob, ens, BerAccounting::ConditionalOnKeySlot);
  const double mean = mean_ber(ber, ens.priors);
  r["ber"] = numbers(ber);
  r["ber_mean"] = json_number(mean);
  r["ber_conditional"] = numbers(ber_cond);
  r["ber_conditional_mean"] = json_number(mean_ber(ber_cond, ens.priors));
  r["intercept_fraction_per_unit_e_b"] = json_number(1.0 / mean);
  r["med_after_cloning"] = to_json(med_on_cloned(eve, ens.priors, &ens.bit_map));
  return r;
}

SweepTable keyrate_table(const RunConfig& config) {
  config.validate();
  const auto profiles = selected_profiles(config);
  SweepOptions opt;
  opt.lower_bound = selected(config, "low");
  opt.unconditional = selected(config, "unconditional");
  opt.finite_size = config.finite_size;
  const auto grid = distance_grid(config.grid.start_km, config.grid.stop_km, config.grid.step_km);
  return keyrate_sweep(config.channel, profiles, grid, opt);
}

FiniteSizeTable finite_size_table(const RunConfig& config) {
  RunConfig asym = config;
  asym.finite_size.reset();
  RunConfig fin = config;
  if (!fin.finite_size) fin.finite_size.emplace();
  const SweepTable a = keyrate_table(asym);
  const SweepTable f = keyrate_table(fin);

  FiniteSizeTable t;
  t.names = {"distance_km", "e_b", "t", "e_eff", "p_click"};
  t.columns.resize(t.names.size());
  for (const auto& name : a.rate_columns) {
    t.names.push_back("r_" + name + "_asymptotic_bits_per_pulse");
    t.names.push_back("r_" + name + "_finite_bits_per_pulse");
  }
  t.columns.resize(t.names.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    const auto& ra = a.rows[i];
    const auto& rf = f.rows[i];
    t.columns[0].push_back(ra.distance_km);
    t.columns[1].push_back(ra.e_b);
    t.columns[2].push_back(rf.e_eff - rf.e_b);
    t.columns[3].push_back(rf.e_eff);
    t.columns[4].push_back(ra.p_click);
    for (size_t c = 0; c < ra.rate.size(); ++c) {
      t.columns[5 + 2 * c].push_back(ra.rate[c]);
      t.columns[6 + 2 * c].push_back(rf.rate[c]);
    }
  }
  return t;
}

SweepTable wcs_table(const RunConfig& config) {
  config.validate();
  const WcsParams params = config.wcs.value_or(WcsParams{});
  const auto grid = distance_grid(config.grid.start_km, config.grid.stop_km, config.grid.step_km);
  return wcs_key_rates(params, config.channel, config.wcs_attacks, grid, config.wcs_options);
}

int cmd_med(int n, const RunConfig& config, CommandIo io) {
  return guarded(io, [&] {
    auto entries = resolved_entries(config);
    entries.emplace_back("med.n", std::to_string(n));
    emit_report("med", med_report(n), entries, config, io);
  });
}

int cmd_clone(CloneMode mode, const RunConfig& config, CommandIo io) {
  return guarded(io, [&] {
    auto entries = resolved_entries(config);
    entries.emplace_back("clone.mode", mode == CloneMode::Optimal ? "optimal" : "unitary");
    emit_report("clone", clone_report(mode), entries, config, io);
  });
}

int cmd_keyrate(const RunConfig& config, CommandIo io) {
  return guarded(io, [&] {
    const SweepTable t = keyrate_table(config);
    const auto entries = resolved_entries(config);
    emit(config.format == OutputFormat::Json ? sweep_to_json(t, entries) : sweep_to_csv(t, entries),
         config, io);
  });
}

int cmd_finite_size(const RunConfig& config, CommandIo io) {
  return guarded(io, [&] {
    RunConfig resolved = config;
    if (!resolved.finite_size) resolved.finite_size.emplace();
    const FiniteSizeTable t = finite_size_table(resolved);
    const auto entries = resolved_entries(resolved);
    emit(config.format == OutputFormat::Json ? columns_to_json(t.names, t.columns, entries)
                                             : columns_to_csv(t.names, t.columns, entries),
         config, io);
  });
}

int cmd_wcs(const RunConfig& config, CommandIo io) {
  return guarded(io, [&] {
    RunConfig resolved = config;
    if (!resolved.wcs) resolved.wcs.emplace();
    for (const auto& w : resolved.wcs->validate()) io.err << "warning: " << w << "\n";
    const SweepTable t = wcs_table(resolved);
    auto entries = resolved_entries(resolved);
    const WcsParams& p = *resolved.wcs;
    entries.emplace_back("derived.usd_success", format_number(usd_success(p.mu)));
    entries.emplace_back("derived.usd_block_success", format_number(usd_block_success(p.mu)));
    entries.emplace_back("derived.ir_fraction", format_number(wcs_ir_fraction(p.mu)));
    entries.emplace_back("derived.slice_averaged_qber",
                         format_number(slice_averaged_qber(p, resolved.wcs_options.reading)));
    emit(config.format == OutputFormat::Json ? sweep_to_json(t, entries) : sweep_to_csv(t, entries),
         config, io);
  });
}

}  // namespace dpsqkd
