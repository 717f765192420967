#include "dpsqkd/wcs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dpsqkd/dps.hpp"

namespace dpsqkd {

std::vector<std::string> WcsParams::validate() const {
  if (!(mu > 0.0)) throw std::invalid_argument("wcs: mean photon number must be > 0");
  if (slices < 1) throw std::invalid_argument("wcs: slice count must be >= 1");
  std::vector<std::string> warnings;
  if (mu > 1.0) warnings.push_back("wcs: mean photon number above 1 leaves the weak-coherent regime");
  return warnings;
}

double usd_success(double mu) {
  if (!(mu >= 0.0)) throw std::invalid_argument("usd_success: mu must be >= 0");
  return -std::expm1(-2.0 * mu);
}

double usd_block_success(double mu) {
  const double p = usd_success(mu);
  return p * p * p;
}

double wcs_ir_fraction(double mu) {
  if (!(mu >= 0.0)) throw std::invalid_argument("wcs_ir_fraction: mu must be >= 0");
  return 2.0 / 9.0 * mu * std::exp(-mu);
}

double phase_mismatch_qber(double mu, double delta, MismatchReading reading) {
  if (!(mu >= 0.0)) throw std::invalid_argument("phase_mismatch_qber: mu must be >= 0");
  double x = 0.0;
  if (reading == MismatchReading::HalfAngle) {
    const double s = std::sin(delta / 2.0);
    x = mu * s * s;
  } else {
    const double s = std::sin(delta);
    x = mu * s * s / 2.0;
  }
  return -std::expm1(-x);
}

double slice_averaged_qber(const WcsParams& params, MismatchReading reading) {
  params.validate();
  const double w = 2.0 * std::numbers::pi / params.slices;
  // Symmetric triangular density (w - |delta|) / w^2 folded onto [0, w].
  auto integrand = [&](double delta) {
    return 2.0 * (w - delta) / (w * w) * phase_mismatch_qber(params.mu, delta, reading);
  };
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, w, 15, 1e-12,
                                                                    &error);
  return value;
}

const char* to_string(WcsAttack a) {
  switch (a) {
    case WcsAttack::InterceptResend: return "ir";
    case WcsAttack::Usd: return "usd";
    case WcsAttack::PhaseRandomized: return "phase-randomized";
  }
  return "unknown";
}

WcsAttack parse_wcs_attack(const std::string& s) {
  if (s == "ir") return WcsAttack::InterceptResend;
  if (s == "usd") return WcsAttack::Usd;
  if (s == "phase-randomized") return WcsAttack::PhaseRandomized;
  throw std::invalid_argument("unknown wcs attack '" + s + "' (expected ir, usd, phase-randomized)");
}

namespace {

double usd_tau(double mu, double e_b, double transmittance, UsdModel model) {
  const double p_block = usd_block_success(mu);
  if (model == UsdModel::LossExploiting) {
    if (transmittance <= 0.0) return 0.0;
    return 1.0 - std::min(1.0, p_block / transmittance);
  }
  const double per_intercept_error = 0.5 * (1.0 - p_block);
  const double attacked = per_intercept_error > 0.0 ? std::min(1.0, e_b / per_intercept_error) : 1.0;
  return 1.0 - attacked * p_block;
}

}  // namespace

SweepTable wcs_key_rates(const WcsParams& params, const ChannelModel& model,
                         std::span<const WcsAttack> attacks, std::span<const double> distances_km,
                         const WcsOptions& options) {
  params.validate();
  model.validate();
  if (!std::is_sorted(distances_km.begin(), distances_km.end())) {
    throw std::invalid_argument("wcs_key_rates: distances must be sorted ascending");
  }
  SweepTable table;
  for (auto a : attacks) {
    std::string name = to_string(a);
    std::replace(name.begin(), name.end(), '-', '_');
    table.tau_columns.push_back(name);
    table.rate_columns.push_back(name);
  }
  const double slice_qber = slice_averaged_qber(params, options.reading);
  const double tau_ir = shrinking_factor(wcs_ir_fraction(params.mu), 1.0);

  for (double d : distances_km) {
    ChannelModel m = model;
    m.distance_km = d;
    const double transmittance = m.transmittance();
    const QberBreakdown q =
        qber_from_signal(m, params.mu * m.detector_efficiency * transmittance);

    SweepRow row;
    row.distance_km = d;
    row.e_b = q.e_b;
    row.e_eff = q.e_b;
    row.p_click = q.p_click;
    for (auto a : attacks) {
      double tau = 0.0;
      double r = 0.0;
      switch (a) {
        case WcsAttack::InterceptResend:
          tau = tau_ir;
          r = secure_key_rate(q.p_click, m.n_pulses, tau, q.e_b, m.f_ec);
          break;
        case WcsAttack::Usd:
          tau = usd_tau(params.mu, q.e_b, transmittance, options.usd_model);
          r = secure_key_rate(q.p_click, m.n_pulses, tau, q.e_b, m.f_ec);
          break;
        case WcsAttack::PhaseRandomized: {
          const double e = std::min(0.5, q.e_b + slice_qber);
          tau = tau_ir;
          r = secure_key_rate(q.p_click, m.n_pulses, tau, e, m.f_ec) / params.slices;
          break;
        }
      }
      row.tau.push_back(tau);
      row.rate.push_back(r);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace dpsqkd
