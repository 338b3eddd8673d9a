// Copyright 2026 The qpa-readout Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qpa/analytic.hpp"
#include "qpa/gaussian.hpp"
#include "qpa/presets.hpp"
#include "test_support.hpp"

namespace {

using namespace qpa;
using namespace qpa::gaussian;
using qpa::testing::Draw;
using qpa::testing::flux_drive;
using qpa::testing::rel_err;
using qpa::testing::unit_device;

constexpr double kPi = std::numbers::pi;

TEST(Generator, VacuumIsStationaryForEmptyDynamics) {
  const DeviceParams p = unit_device(0.0, 20.0, 30.0);
  const GaussianBlockState s = evolve_block(p, PumpSpec{}, DriveSpec{}, 7.0, GaussianBlockState::vacuum());
  EXPECT_NEAR(std::abs(s.cov(0, 0) - 0.5), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s.cov(1, 1) - 0.5), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s.cov(0, 1)), 0.0, 1e-12);
  EXPECT_NEAR(s.log_norm(), -p.gamma2_star() * 7.0, 1e-12);
}

TEST(Generator, ConditionedSteadyStateMatchesLyapunov) {
  Draw draw(41);
  for (int i = 0; i < 30; ++i) {
    const DeviceParams p = unit_device(draw.uniform(0.0, 0.3));
    const PumpSpec pump = PumpSpec::from_lambda(draw.uniform(0.0, 0.45), 1.0, draw.uniform(-1.0, 1.0));
    const DriveSpec d = flux_drive(draw.uniform(0.0, 3.0), draw.uniform(-kPi, kPi));
    for (int sigma : {+1, -1}) {
      const SteadyBlock sb = steady_block(BlockGenerator::conditioned(p, pump, d, sigma));
      const IntracavityMoments m = intracavity_moments(p, pump, d, sigma);
      EXPECT_NEAR(std::abs(sb.rate), 0.0, 1e-10);
      for (int r = 0; r < 2; ++r) {
        EXPECT_NEAR(std::abs(sb.state.mean(r) - m.mean(r)), 0.0, 1e-9);
        for (int c = 0; c < 2; ++c) EXPECT_NEAR(std::abs(sb.state.cov(r, c) - m.cov(r, c)), 0.0, 1e-9);
      }
      EXPECT_NEAR(m.photons(), analytic::steady_state_nbar_conditioned(p, pump, d, sigma) +
                                   0.5 * (m.cov.trace() - 1.0), 1e-9);
    }
  }
}

TEST(Generator, DegenerateParampCovariance) {
  const DeviceParams p = unit_device(0.0);
  for (double lam : {0.1, 0.3, 0.45}) {
    const SteadyBlock sb = steady_block(BlockGenerator::conditioned(p, PumpSpec::from_lambda(lam, 1.0), DriveSpec{}, 1));
    EXPECT_NEAR(sb.state.cov(0, 0).real(), 1.0 / (4.0 * (0.5 + lam)), 1e-12);
    EXPECT_NEAR(sb.state.cov(1, 1).real(), 1.0 / (4.0 * (0.5 - lam)), 1e-12);
    EXPECT_NEAR(std::abs(sb.state.cov(0, 1)), 0.0, 1e-12);
  }
}

TEST(Generator, SteadyBlockRateIsTotalDephasing) {
  Draw draw(43);
  for (int i = 0; i < 50; ++i) {
    const DeviceParams p = unit_device(draw.uniform(0.0, 0.3));
    const PumpSpec pump = PumpSpec::from_lambda(draw.uniform(0.0, 0.48), 1.0, draw.uniform(-1.0, 1.0));
    const DriveSpec d = flux_drive(draw.uniform(0.0, 5.0), draw.uniform(-kPi, kPi));
    const SteadyBlock sb = steady_block(BlockGenerator::updown(p, pump, d));
    EXPECT_NEAR(-sb.rate.real() / analytic::total_dephasing(p, pump, d), 1.0, 1e-9);
  }
}

TEST(Decay, DriveOffZeroGainIsIntrinsic) {
  const DeviceParams p = presets::fig2();
  const DecayFit f = dephasing_from_decay(p, PumpSpec{}, DriveSpec{});
  EXPECT_NEAR(f.rate / p.gamma2_star(), 1.0, 1e-9);
  EXPECT_GE(f.window * p.kappa, 20.0);
}

TEST(Decay, MatchesTotalDephasingOnRandomSets) {
  Draw draw(47);
  for (int i = 0; i < 10; ++i) {
    const DeviceParams p = unit_device(draw.uniform(0.01, 0.3), draw.uniform(10.0, 100.0), draw.uniform(10.0, 100.0));
    const PumpSpec pump = PumpSpec::from_lambda(draw.uniform(0.0, 0.4), 1.0);
    const DriveSpec d = flux_drive(draw.uniform(0.0, 3.0), draw.uniform(-kPi, kPi));
    EXPECT_LT(rel_err(dephasing_from_decay(p, pump, d).rate, analytic::total_dephasing(p, pump, d)), 0.01);
  }
}

TEST(Decay, ParasiticCurveOverGain) {
  const DeviceParams p = presets::fig2();
  for (double db = 0.0; db <= 10.0; db += 1.0) {
    const PumpSpec pump = PumpSpec::from_gain_db(db, p.kappa);
    EXPECT_LT(rel_err(dephasing_from_decay(p, pump, DriveSpec{}).rate,
                      analytic::parasitic_dephasing(p, pump.lambda)), 0.01);
  }
}

TEST(Decay, ModeContrastAtThreeDb) {
  const DeviceParams p = presets::fig3();
  const PumpSpec pump = PumpSpec::from_gain_db(3.0, p.kappa);
  for (double phi : {0.0, kPi / 2}) {
    const DriveSpec d = DriveSpec::from_dbm(-142.0, phi);
    EXPECT_LT(rel_err(dephasing_from_decay(p, pump, d).rate, analytic::total_dephasing(p, pump, d)), 0.01);
  }
}

TEST(Decay, SteadyCovarianceForgetsInitialState) {
  Draw draw(53);
  const DeviceParams p = unit_device(0.15);
  const PumpSpec pump = PumpSpec::from_lambda(0.3, 1.0);
  const DriveSpec d = flux_drive(1.0, 0.4);
  const SteadyBlock sb = steady_block(BlockGenerator::updown(p, pump, d));
  for (int i = 0; i < 5; ++i) {
    GaussianBlockState init;
    const double a = draw.uniform(0.5, 3.0), b = draw.uniform(0.5, 3.0), c = draw.uniform(-0.4, 0.4);
    init.cov << a, c, c, b;
    init.mean << draw.uniform(-2, 2), draw.uniform(-2, 2);
    const GaussianBlockState s = evolve_block(p, pump, d, 200.0, init);
    for (int r = 0; r < 2; ++r)
      for (int k = 0; k < 2; ++k) EXPECT_NEAR(std::abs(s.cov(r, k) - sb.state.cov(r, k)), 0.0, 1e-7);
  }
}

TEST(Output, VacuumReflection) {
  const DeviceParams p = unit_device(0.0);
  const DriveSpec d = flux_drive(2.0, 0.7);
  const OutputMoments m = output_moments(p, PumpSpec{}, d, +1);
  EXPECT_NEAR(m.var_i, 0.5, 1e-14);
  EXPECT_NEAR(m.var_q, 0.5, 1e-14);
  EXPECT_NEAR(m.cov_iq, 0.0, 1e-14);
  // A resonant single-port cavity reflects with a sign flip.
  EXPECT_NEAR(m.mean_i, -std::sqrt(2.0) * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(m.mean_q, 0.0, 1e-12);
}

TEST(Output, QubitStateRotatesPhase) {
  const DeviceParams p = presets::fig3();
  const DriveSpec d = DriveSpec::from_dbm(-142.0);
  const OutputMoments up = output_moments(p, PumpSpec{}, d, +1);
  const OutputMoments down = output_moments(p, PumpSpec{}, d, -1);
  EXPECT_GT(std::abs(up.mean_q), 0.0);
  EXPECT_NEAR(up.mean_q, -down.mean_q, 1e-9 * std::abs(up.mean_q));
  EXPECT_NEAR(up.mean_i, down.mean_i, 1e-9 * std::abs(up.mean_i));
}

TEST(Output, AmplifierModeAtThreeDb) {
  const DeviceParams p = presets::fig3();
  const PumpSpec pump = PumpSpec::from_gain_db(3.0, p.kappa);
  const DriveSpec d = DriveSpec::from_dbm(-142.0, 0.0);
  const OutputMoments up = output_moments(p, pump, d, +1);
  const OutputMoments down = output_moments(p, pump, d, -1);
  EXPECT_GT(up.var_q, 0.5);
  EXPECT_LT(up.var_i, 0.5);
  const double sep = up.mean_q - down.mean_q;
  const double sep0 = output_moments(p, PumpSpec{}, d, +1).mean_q - output_moments(p, PumpSpec{}, d, -1).mean_q;
  // Slight amplification of the mean signal, identical in both modes.
  EXPECT_GT(sep / sep0, 1.0);
  EXPECT_LT(sep / sep0, 1.25);
  const DriveSpec s = DriveSpec::from_dbm(-142.0, kPi / 2);
  const double sep_sqz = output_moments(p, pump, s, +1).mean_q - output_moments(p, pump, s, -1).mean_q;
  const double sep0_sqz = output_moments(p, PumpSpec{}, s, +1).mean_q - output_moments(p, PumpSpec{}, s, -1).mean_q;
  EXPECT_NEAR(sep_sqz / sep0_sqz, sep / sep0, 1e-12);
}

TEST(Output, UncertaintyPrinciple) {
  Draw draw(59);
  for (int i = 0; i < 500; ++i) {
    const DeviceParams p = unit_device(draw.uniform(0.0, 0.5));
    const PumpSpec pump = PumpSpec::from_lambda(draw.uniform(0.0, 0.499), 1.0, draw.uniform(-kPi, kPi));
    const DriveSpec d = flux_drive(draw.uniform(0.0, 5.0), draw.uniform(-kPi, kPi));
    for (int sigma : {+1, -1}) {
      const OutputMoments m = output_moments(p, pump, d, sigma);
      EXPECT_GE(m.covariance().determinant(), 0.25 * (1.0 - 1e-9));
      EXPECT_GT(m.var_i, 0.0);
      EXPECT_GT(m.var_q, 0.0);
      EXPECT_LE(std::abs(m.cov_iq), std::sqrt(m.var_i * m.var_q));
      const Mat2 cav = intracavity_moments(p, pump, d, sigma).cov;
      EXPECT_GE(cav.determinant(), 0.25 * (1.0 - 1e-9));
    }
  }
}

TEST(Output, MeasurementRateMatchesClosedForms) {
  for (double chi : {0.02, 0.07, 0.2}) {
    const DeviceParams p = unit_device(chi);
    for (int i = 0; i < 50; ++i) {
      const PumpSpec pump = PumpSpec::from_lambda(0.49 * i / 49.0, 1.0);
      for (double n_add : {0.0, 1.5}) {
        const DriveSpec amp = flux_drive(0.8, 0.0, n_add);
        const double n = analytic::steady_state_nbar(p, pump, amp);
        EXPECT_NEAR(snr_and_meas_rate(p, pump, amp).gamma_meas_raw /
                        analytic::measurement_rate_amp(p, pump.lambda, n, n_add), 1.0, 1e-10);
        const DriveSpec sqz = flux_drive(0.8, kPi / 2, n_add);
        const double ns = analytic::steady_state_nbar(p, pump, sqz);
        EXPECT_NEAR(snr_and_meas_rate(p, pump, sqz).gamma_meas_raw /
                        analytic::measurement_rate_sqz(p, pump.lambda, ns, n_add), 1.0, 1e-10);
      }
    }
  }
}

TEST(Output, MeasurementRateMatchesGeneralForm) {
  Draw draw(61);
  for (int i = 0; i < 100; ++i) {
    const DeviceParams p = unit_device(draw.uniform(0.01, 0.3));
    const PumpSpec pump = PumpSpec::from_lambda(draw.uniform(0.0, 0.49), 1.0, draw.uniform(-1, 1));
    const DriveSpec d = flux_drive(draw.uniform(0.01, 4.0), draw.uniform(-kPi, kPi), draw.uniform(0, 2));
    EXPECT_NEAR(snr_and_meas_rate(p, pump, d).gamma_meas_raw /
                    analytic::measurement_rate_general(p, pump, d), 1.0, 1e-10);
  }
}

TEST(Output, ZeroGainReduction) {
  const DeviceParams p = presets::fig3();
  const DriveSpec d = DriveSpec::from_dbm(-142.0);
  const double n = analytic::steady_state_nbar(p, PumpSpec{}, d);
  EXPECT_NEAR(snr_and_meas_rate(p, PumpSpec{}, d).gamma_meas_raw /
                  analytic::measurement_rate_zero_gain(p, n, 0.0), 1.0, 1e-12);
}

TEST(Output, OverlapShrinksWithGainAtDriveOff) {
  const DeviceParams p = presets::fig2();
  double prev = -1.0;
  for (double db = 0.5; db <= 12.0; db += 0.5) {
    const double b = output_distinguishability(p, PumpSpec::from_gain_db(db, p.kappa), DriveSpec{});
    EXPECT_GT(b, prev);
    prev = b;
  }
}

}  // namespace
