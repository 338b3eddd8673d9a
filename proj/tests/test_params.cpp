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
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "qpa/params.hpp"

namespace {

using qpa::DeviceParams;
using qpa::DriveSpec;
using qpa::PumpSpec;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(Units, DbmRoundTrip) {
  EXPECT_NEAR(qpa::units::dbm_to_watt(30.0), 1.0, 1e-15);
  EXPECT_NEAR(qpa::units::dbm_to_watt(-142.0), 6.309573444801929e-18, 1e-30);
  for (double dbm : {-160.0, -142.0, -100.0, 0.0, 12.5}) {
    EXPECT_NEAR(qpa::units::watt_to_dbm(qpa::units::dbm_to_watt(dbm)), dbm, 1e-12);
  }
}

TEST(Units, PhotonFluxAtMinus142Dbm) {
  const DriveSpec d = DriveSpec::from_dbm(-142.0);
  const double omega = qpa::units::hz_to_rad(6.7e9);
  // P / (hbar omega) with omega/2pi = 6.7 GHz.
  EXPECT_NEAR(d.alpha_in_flux(omega) / 1.4212457e6, 1.0, 1e-4);
}

TEST(DeviceParams, T2StarFromT1AndT2) {
  DeviceParams p;
  p.kappa = 1.0;
  p.t1 = 4.2e-6;
  p.t2 = 5.0e-6;
  EXPECT_NEAR(p.t2_star(), 2.0 * p.t1 * p.t2 / (2.0 * p.t1 + p.t2), 1e-18);
  p.t1 = kInf;
  EXPECT_DOUBLE_EQ(p.t2_star(), 5.0e-6);
  p.t2 = kInf;
  EXPECT_EQ(p.gamma2_star(), 0.0);
}

TEST(DeviceParams, ValidationRejectsBadInput) {
  EXPECT_THROW(qpa::device_from_hz(0.0, 1e6, 6e9, 5e9, 1e-6, 1e-6), qpa::ValidationError);
  EXPECT_THROW(qpa::device_from_hz(-1.0, 1e6, 6e9, 5e9, 1e-6, 1e-6), qpa::ValidationError);
  EXPECT_THROW(qpa::device_from_hz(1e7, 1e6, 6e9, 5e9, 0.0, 1e-6), qpa::ValidationError);
  EXPECT_THROW(qpa::device_from_hz(1e7, 1e6, 6e9, 5e9, 1e-6, -1.0), qpa::ValidationError);
  EXPECT_THROW(qpa::device_from_hz(std::nan(""), 1e6, 6e9, 5e9, 1e-6, 1e-6),
               qpa::ValidationError);
  DeviceParams p = qpa::device_from_hz(1e7, 1e6, 6e9, 5e9, 1e-6, 1e-6);
  p.kappa_ext = 0.6 * p.kappa;
  p.kappa_int = 0.4 * p.kappa;
  EXPECT_NO_THROW(qpa::validate(p));
  p.kappa_int = 0.5 * p.kappa;
  EXPECT_THROW(qpa::validate(p), qpa::ValidationError);
}

TEST(DeviceParams, DetuningIsCarriedButUnused) {
  const DeviceParams p = qpa::device_from_hz(28.6e6, 2.0e6, 6.7e9, 5.4e9, kInf, kInf);
  EXPECT_NEAR(p.delta(), qpa::units::hz_to_rad(-1.3e9), 1.0);
}

TEST(Gain, KnownValues) {
  const double kappa = 2.0;
  EXPECT_EQ(qpa::lambda_from_gain(1.0, kappa), 0.0);
  EXPECT_DOUBLE_EQ(qpa::lambda_from_gain(kInf, kappa), 1.0);
  // G = 10 dB: lambda/kappa = 0.5 sqrt(9)/(sqrt(10)+1).
  EXPECT_NEAR(qpa::lambda_from_gain(10.0, kappa) / kappa, 1.5 / (std::sqrt(10.0) + 1.0), 1e-15);
  EXPECT_THROW(qpa::lambda_from_gain(0.99, kappa), qpa::DomainError);
  EXPECT_THROW(qpa::gain_from_lambda(1.0, kappa), qpa::DomainError);
  EXPECT_THROW(PumpSpec::from_gain_db(-1.0, kappa), qpa::DomainError);
}

TEST(Gain, RoundTripProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  for (int i = 0; i < 500; ++i) {
    const double db = u(rng);
    const double g = qpa::units::db_to_ratio(db);
    const double lam = qpa::lambda_from_gain(g, 1.0);
    EXPECT_LT(lam, 0.5);
    EXPECT_NEAR(qpa::gain_from_lambda(lam, 1.0) / g, 1.0, 1e-9);
  }
}

TEST(Gain, MonotoneInLambdaAndG0AboveGain) {
  double prev = 0.0;
  for (int i = 1; i < 200; ++i) {
    const double lam = 0.49 * i / 199.0;
    const double g = qpa::gain_from_lambda(lam, 1.0);
    EXPECT_GT(g, prev);
    prev = g;
    EXPECT_GE(qpa::g0_from_lambda(lam, 1.0), g);
  }
}

TEST(DriveSpec, EffectiveNoise) {
  DriveSpec d;
  EXPECT_EQ(d.effective_added_noise(), 0.0);
  d.eta_loss = 0.5;
  EXPECT_DOUBLE_EQ(d.effective_added_noise(), 0.5);
  d.n_add = 1.0;
  EXPECT_DOUBLE_EQ(d.effective_added_noise(), 2.5);
  d.eta_loss = 0.0;
  EXPECT_THROW(qpa::validate(d), qpa::ValidationError);
}

TEST(PumpSpec, ZetaFollowsPumpPhase) {
  const PumpSpec s = PumpSpec::from_lambda(0.2, 1.0, 0.25 * M_PI);
  EXPECT_NEAR(s.zeta().real(), 0.0, 1e-15);
  EXPECT_NEAR(s.zeta().imag(), -0.2, 1e-15);
  EXPECT_NEAR(PumpSpec::from_lambda(0.2, 1.0).zeta().real(), -0.2, 1e-15);
}

}  // namespace
