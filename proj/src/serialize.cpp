#include "dpsqkd/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace dpsqkd {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

nlohmann::json json_number(double x) {
  if (!std::isfinite(x)) return format_number(x);
  return std::strtod(format_number(x).c_str(), nullptr);
}

nlohmann::json to_json(const HermitianOperator& op) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  bool complex = false;
  for (int i = 0; i < op.dim(); ++i) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ri = nlohmann::json::array();
    for (int j = 0; j < op.dim(); ++j) {
      rr.push_back(json_number(op(i, j).real()));
      ri.push_back(json_number(op(i, j).imag()));
      if (std::abs(op(i, j).imag()) > 1e-12) complex = true;
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  nlohmann::json out = {{"re", re}};
  if (complex) out["im"] = im;
  return out;
}

nlohmann::json to_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json_number(m(i, j)));
    out.push_back(row);
  }
  return out;
}

nlohmann::json to_json(const KktReport& k) {
  return {{"passed", k.passed()},
          {"primal_residual", json_number(k.primal_residual)},
          {"primal_min_eigenvalue", json_number(k.primal_min_eigenvalue)},
          {"dual_min_eigenvalue", json_number(k.dual_min_eigenvalue)},
          {"complementarity", json_number(k.complementarity)},
          {"duality_gap", json_number(k.duality_gap)}};
}

nlohmann::json to_json(const MedResult& med) {
  nlohmann::json povm = nlohmann::json::array();
  for (const auto& e : med.povm.elements) povm.push_back(to_json(e));
  nlohmann::json out = {{"p_success", json_number(med.p_success)},
                        {"confusion", to_json(med.confusion)},
                        {"povm", povm},
                        {"kkt", to_json(med.kkt)},
                        {"iterations", med.iterations}};
  if (med.collision_probability) {
    out["collision_probability"] = json_number(*med.collision_probability);
  }
  return out;
}

nlohmann::json to_json(const CloningResult& c) {
  nlohmann::json fid = nlohmann::json::array();
  for (double f : c.per_state_clone_fidelity) fid.push_back(json_number(f));
  nlohmann::json bob = nlohmann::json::array();
  nlohmann::json eve = nlohmann::json::array();
  for (const auto& b : c.bob_states) bob.push_back(to_json(b));
  for (const auto& e : c.eve_states) eve.push_back(to_json(e));
  return {{"avg_two_copy_fidelity", json_number(c.avg_two_copy_fidelity)},
          {"per_state_clone_fidelity", fid},
          {"bob_states", bob},
          {"eve_states", eve},
          {"tp_residual", json_number(c.tp_residual)},
          {"kkt", to_json(c.kkt)},
          {"iterations", c.iterations}};
}

nlohmann::json to_json(const AttackProfile& a) {
  return {{"name", a.name},
          {"per_intercept_error", json_number(a.per_intercept_error)},
          {"per_attacked_bit_collision", json_number(a.per_attacked_bit_collision)},
          {"sifting_factor", json_number(a.sifting_factor)}};
}

std::vector<std::string> sweep_column_names(const SweepTable& t) {
  std::vector<std::string> names = {"distance_km", "e_b", "e_eff", "p_click"};
  for (const auto& c : t.tau_columns) names.push_back("tau_" + c);
  for (const auto& c : t.rate_columns) names.push_back("r_" + c + "_bits_per_pulse");
  return names;
}

std::vector<std::vector<double>> sweep_columns(const SweepTable& t) {
  const size_t ncols = 4 + t.tau_columns.size() + t.rate_columns.size();
  std::vector<std::vector<double>> cols(ncols);
  for (const auto& r : t.rows) {
    size_t c = 0;
    cols[c++].push_back(r.distance_km);
    cols[c++].push_back(r.e_b);
    cols[c++].push_back(r.e_eff);
    cols[c++].push_back(r.p_click);
    for (double v : r.tau) cols[c++].push_back(v);
    for (double v : r.rate) cols[c++].push_back(v);
  }
  return cols;
}

namespace {

void config_header(std::ostringstream& out, const ConfigEntries& config) {
  for (const auto& [k, v] : config) out << "# " << k << " = " << v << "\n";
}

}  // namespace

std::string columns_to_csv(const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& columns,
                           const ConfigEntries& config) {
  std::ostringstream out;
  config_header(out, config);
  for (size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << "\n";
  const size_t rows = columns.empty() ? 0 : columns.front().size();
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_number(columns[c][r]);
    out << "\n";
  }
  return out.str();
}

nlohmann::json config_to_json(const ConfigEntries& config) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : config) out[k] = v;
  return out;
}

std::string sweep_to_csv(const SweepTable& table, const ConfigEntries& config) {
  return columns_to_csv(sweep_column_names(table), sweep_columns(table), config);
}

std::string columns_to_json(const std::vector<std::string>& names,
                            const std::vector<std::vector<double>>& columns,
                            const ConfigEntries& config) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  doc["config"] = cfg;
  doc["column_order"] = names;
  nlohmann::ordered_json cols;
  for (size_t c = 0; c < names.size(); ++c) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (double v : columns[c]) {
      if (std::isfinite(v)) arr.push_back(std::strtod(format_number(v).c_str(), nullptr));
      else arr.push_back(format_number(v));
    }
    cols[names[c]] = arr;
  }
  doc["columns"] = cols;
  return doc.dump(2) + "\n";
}

std::string sweep_to_json(const SweepTable& table, const ConfigEntries& config) {
  return columns_to_json(sweep_column_names(table), sweep_columns(table), config);
}

namespace {

void flatten(const nlohmann::json& j, const std::string& path, std::ostringstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
    }
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "." + std::to_string(i), out);
  } else if (j.is_number_float()) {
    out << path << "," << format_number(j.get<double>()) << "\n";
  } else if (j.is_string()) {
    out << path << "," << j.get<std::string>() << "\n";
  } else {
    out << path << "," << j.dump() << "\n";
  }
}

}  // namespace

std::string report_to_csv(const nlohmann::json& report, const ConfigEntries& config) {
  std::ostringstream out;
  config_header(out, config);
  out << "key,value\n";
  flatten(report, "", out);
  return out.str();
}

}  // namespace dpsqkd
