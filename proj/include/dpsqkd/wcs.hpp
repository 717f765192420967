#pragma once

#include <span>
#include <string>
#include <vector>

#include "dpsqkd/keyrate.hpp"

namespace dpsqkd {

struct WcsParams {
  double mu = 0.4;  // mean photon number per pulse
  int slices = 16;  // phase slices M

  /// Throws std::invalid_argument for mu <= 0 or slices < 1. Returns
  /// warnings (mu above 1 leaves the weak-coherent regime).
  std::vector<std::string> validate() const;
};

/// Unambiguous discrimination of the two phase values of one coherent pulse
/// pair at the IDP limit: 1 - e^{-2 mu}.
double usd_success(double mu);

/// Probability that Eve identifies a whole 3-pulse block: usd_success^3.
double usd_block_success(double mu);

/// Share of bits Eve learns by intercept-resend on 3-pulse weak coherent
/// blocks: (2/9) mu e^{-mu}.
double wcs_ir_fraction(double mu);

enum class MismatchReading {
  /// 1 - exp(-mu sin^2(delta/2)), from the destructive amplitude alpha(1 - e^{i delta})/2.
  HalfAngle,
  /// 1 - exp(-mu sin^2(delta) / 2), the formula as literally typeset.
  StrictText,
};

double phase_mismatch_qber(double mu, double delta,
                           MismatchReading reading = MismatchReading::HalfAngle);

/// Expected mismatch QBER when both phases are uniform inside one slice of
/// width 2 pi / M, so delta is triangular on [-2 pi / M, 2 pi / M].
double slice_averaged_qber(const WcsParams& params,
                           MismatchReading reading = MismatchReading::HalfAngle);

enum class WcsAttack { InterceptResend, Usd, PhaseRandomized };

const char* to_string(WcsAttack a);
/// Accepts "ir", "usd", "phase-randomized". Throws std::invalid_argument.
WcsAttack parse_wcs_attack(const std::string& s);

enum class UsdModel {
  /// Inconclusive blocks are resent at random and cost 1/2 error each; the
  /// attacked share of blocks is fixed by the observed error rate.
  ErrorBudget,
  /// Inconclusive blocks are dropped and hidden in channel loss; conclusive
  /// blocks travel on a lossless line. Eve knows min(1, P_block / T) of the key.
  LossExploiting,
};

struct WcsOptions {
  UsdModel usd_model = UsdModel::ErrorBudget;
  MismatchReading reading = MismatchReading::HalfAngle;
};

/// Same table schema as keyrate_sweep: one tau and one rate column per attack.
/// p_signal = mu eta T. The phase-randomized column adds the slice-averaged
/// QBER to e_b and carries an extra 1/M sifting factor.
SweepTable wcs_key_rates(const WcsParams& params, const ChannelModel& model,
                         std::span<const WcsAttack> attacks, std::span<const double> distances_km,
                         const WcsOptions& options = {});

}  // namespace dpsqkd
