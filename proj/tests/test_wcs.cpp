#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dpsqkd/wcs.hpp"
#include "oracles.hpp"

using namespace dpsqkd;

TEST(Usd, ExamplesAndHighPrecision) {
  EXPECT_DOUBLE_EQ(usd_success(0.0), 0.0);
  EXPECT_NEAR(usd_success(0.4), 0.5507, 1e-4);
  for (double mu : {1e-6, 0.01, 0.1, 0.4, 1.0, 3.0}) {
    EXPECT_NEAR(usd_success(mu), oracle::usd_success_hp(mu), 1e-12);
  }
  EXPECT_NEAR(usd_block_success(0.4), std::pow(1.0 - std::exp(-0.8), 3), 1e-15);
  EXPECT_NEAR(usd_block_success(0.4), oracle::kUsdBlock04, 1e-12);
}

TEST(IrFraction, ExampleAndMaximum) {
  EXPECT_DOUBLE_EQ(wcs_ir_fraction(0.0), 0.0);
  EXPECT_NEAR(wcs_ir_fraction(0.4), 0.0596, 1e-4);
  for (double mu = 0.05; mu < 3.0; mu += 0.05) {
    EXPECT_LE(wcs_ir_fraction(mu), wcs_ir_fraction(1.0) + 1e-15);
  }
}

TEST(Mismatch, ExamplesAndOracle) {
  EXPECT_DOUBLE_EQ(phase_mismatch_qber(0.4, 0.0), 0.0);
  EXPECT_NEAR(phase_mismatch_qber(0.4, std::numbers::pi), 1.0 - std::exp(-0.4), 1e-15);
  EXPECT_NEAR(phase_mismatch_qber(0.4, std::numbers::pi), 0.3297, 1e-4);
  const double d = 1e-3;
  EXPECT_NEAR(phase_mismatch_qber(0.4, d) / (0.4 * d * d / 4.0), 1.0, 1e-5);
  for (double delta : {1e-4, 0.1, 0.5, 1.0, 2.5, 3.1}) {
    EXPECT_NEAR(phase_mismatch_qber(0.4, delta), oracle::mismatch_hp(0.4, delta), 1e-12);
  }
  EXPECT_NEAR(phase_mismatch_qber(0.4, std::numbers::pi / 2, MismatchReading::StrictText),
              1.0 - std::exp(-0.2), 1e-15);
}

TEST(SliceAverage, QuadratureMatchesSimpson) {
  for (int m : {1, 2, 4, 8, 16, 32}) {
    EXPECT_NEAR(slice_averaged_qber({0.4, m}), oracle::slice_qber_simpson(0.4, m, 20000), 1e-10) << m;
  }
}

TEST(SliceAverage, NonIncreasingAndBounded) {
  double prev = 1.0;
  for (int m = 1; m <= 256; ++m) {
    const double q = slice_averaged_qber({0.4, m});
    EXPECT_LE(q, prev + 1e-15);
    EXPECT_GE(q, 0.0);
    prev = q;
  }
  EXPECT_LT(slice_averaged_qber({0.4, 16}), phase_mismatch_qber(0.4, std::numbers::pi / 8));
  EXPECT_LT(slice_averaged_qber({0.4, 100000}), 1e-8);
}

TEST(Params, Validation) {
  EXPECT_THROW((WcsParams{0.0, 16}).validate(), std::invalid_argument);
  EXPECT_THROW((WcsParams{0.4, 0}).validate(), std::invalid_argument);
  EXPECT_TRUE((WcsParams{0.4, 16}).validate().empty());
  EXPECT_FALSE((WcsParams{1.5, 16}).validate().empty());
  EXPECT_EQ(parse_wcs_attack("phase-randomized"), WcsAttack::PhaseRandomized);
  EXPECT_THROW(parse_wcs_attack("bogus"), std::invalid_argument);
}

TEST(WcsRates, PhaseRandomizedBelowUsdAndSchema) {
  const ChannelModel m;
  const auto grid = distance_grid(0, 100, 1);
  const std::vector<WcsAttack> attacks = {WcsAttack::InterceptResend, WcsAttack::Usd,
                                          WcsAttack::PhaseRandomized};
  const auto t = wcs_key_rates({0.4, 16}, m, attacks, grid);
  ASSERT_EQ(t.rate_columns.size(), 3u);
  EXPECT_EQ(t.rate_columns[2], "phase_randomized");
  for (const auto& row : t.rows) {
    EXPECT_LE(row.rate[2], row.rate[1]) << row.distance_km;
    EXPECT_GE(row.e_b, 0.0);
    EXPECT_LE(row.e_b, 0.5);
    for (double tau : row.tau) {
      EXPECT_GE(tau, 0.0);
      EXPECT_LE(tau, 1.0);
    }
  }
}

TEST(WcsRates, LossExploitingUsdDiesWhereLossHidesTheBlocks) {
  ChannelModel m;
  const auto grid = distance_grid(0, 100, 1);
  const std::vector<WcsAttack> usd = {WcsAttack::Usd};
  WcsOptions opt;
  opt.usd_model = UsdModel::LossExploiting;
  const auto t = wcs_key_rates({0.4, 16}, m, usd, grid, opt);
  for (const auto& row : t.rows) {
    m.distance_km = row.distance_km;
    if (m.transmittance() <= usd_block_success(0.4)) EXPECT_DOUBLE_EQ(row.rate[0], 0.0);
    EXPECT_NEAR(row.tau[0], 1.0 - std::min(1.0, usd_block_success(0.4) / m.transmittance()), 1e-15);
  }
}

TEST(WcsRates, SingleSliceCarriesFullMismatch) {
  const ChannelModel m;
  const std::vector<double> grid = {0.0, 20.0};
  const std::vector<WcsAttack> pr = {WcsAttack::PhaseRandomized};
  const auto t = wcs_key_rates({0.4, 1}, m, pr, grid);
  for (const auto& row : t.rows) {
    const double e = std::min(0.5, row.e_b + slice_averaged_qber({0.4, 1}));
    EXPECT_GT(e, 0.18);
    EXPECT_NEAR(row.rate[0], secure_key_rate(row.p_click, 3, row.tau[0], e, m.f_ec), 1e-15);
  }
}
