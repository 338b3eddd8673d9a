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

#pragma once

// Closed-form dephasing and measurement rates for a dispersively coupled
// qubit read out through a resonator with intra-cavity degenerate parametric
// gain. All rates are in 1/s; see params.hpp for the phase conventions.

#include <cmath>
#include <complex>
#include <numbers>

#include "qpa/error.hpp"
#include "qpa/params.hpp"

namespace qpa::analytic {

using cplx = std::complex<double>;

/// Global factor applied to the raw measurement rate
///     Gamma_raw = (1/4) (<Q>_up - <Q>_down)^2 / (S_QQ,up[0] + S_QQ,down[0])
/// so that a zero-gain, noiseless chain without intrinsic dephasing gives
/// eta_meas = Gamma_meas / (2 Gamma_phi) = 1. In that limit
/// Gamma_raw equals the measurement-induced dephasing exactly, hence 2.
inline constexpr double kMeasCalibration = 2.0;

enum class Mode { amplifier, squeezer, general };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::amplifier: return "amplifier";
    case Mode::squeezer: return "squeezer";
    default: return "general";
  }
}

/// Angle between the drive and the deamplified quadrature (0 = amplifier mode).
inline double mode_angle(const PumpSpec& pump, const DriveSpec& drive) {
  return drive.phi - pump.pump_phase;
}

inline Mode classify(const PumpSpec& pump, const DriveSpec& drive) {
  const double theta = mode_angle(pump, drive);
  if (std::abs(std::sin(theta)) < 1e-12) return Mode::amplifier;
  if (std::abs(std::cos(theta)) < 1e-12) return Mode::squeezer;
  return Mode::general;
}

inline void require_below_threshold(const DeviceParams& p, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be >= 0");
  if (!(lambda < 0.5 * p.kappa)) throw DomainError("lambda at or above parametric threshold");
}

/// D(lambda) = (kappa/2 + lambda + i chi)^2 - 2 i chi lambda, for signed lambda.
inline cplx d_of_lambda(const DeviceParams& p, double lambda_signed) {
  const cplx z(0.5 * p.kappa + lambda_signed, p.chi);
  return z * z - cplx(0.0, 2.0 * p.chi * lambda_signed);
}

/// Drive-independent dephasing from the intra-cavity squeezed vacuum, plus
/// the intrinsic 1/T2*. Principal square roots keep the result >= 1/T2*.
inline double parasitic_dephasing(const DeviceParams& p, double lambda) {
  require_below_threshold(p, lambda);
  const cplx roots = std::sqrt(d_of_lambda(p, -lambda)) + std::sqrt(d_of_lambda(p, lambda));
  return 0.5 * roots.real() - 0.5 * p.kappa + p.gamma2_star();
}

/// Measurement-induced part of the total dephasing (drive term only).
inline double drive_dephasing(const DeviceParams& p, const PumpSpec& pump, const DriveSpec& drive) {
  require_below_threshold(p, pump.lambda);
  const double flux = drive.alpha_in_flux(p.omega_qpa);
  const double theta = mode_angle(pump, drive);
  const double c = std::cos(theta), s = std::sin(theta);
  // Amplifier mode (theta = 0) sees D(lambda), squeezer mode D(-lambda).
  const double d_amp = std::norm(d_of_lambda(p, pump.lambda));
  const double d_sqz = std::norm(d_of_lambda(p, -pump.lambda));
  return 2.0 * p.chi * p.chi * p.kappa * p.kappa * flux * (c * c / d_amp + s * s / d_sqz);
}

/// Total dephasing: drive term plus the parasitic floor.
inline double total_dephasing(const DeviceParams& p, const PumpSpec& pump, const DriveSpec& drive) {
  return drive_dephasing(p, pump, drive) + parasitic_dephasing(p, pump.lambda);
}

/// Weak-coupling zero-gain estimate 8 chi^2 n / kappa (no intrinsic term).
inline double dephasing_smallchi_approx(const DeviceParams& p, double nbar) {
  return 8.0 * p.chi * p.chi * nbar / p.kappa;
}

// --- steady state ----------------------------------------------------------

/// Mean intra-cavity amplitude for the qubit frozen in sigma = +-1.
inline cplx steady_state_amplitude(const DeviceParams& p, const PumpSpec& pump,
                                   const DriveSpec& drive, int sigma) {
  require_below_threshold(p, pump.lambda);
  const cplx b(0.5 * p.kappa, p.chi * sigma);
  const cplx zeta = pump.zeta();
  const cplx alpha = drive.alpha_in(p.omega_qpa);
  const double det = std::norm(b) - std::norm(zeta);
  return -std::sqrt(p.kappa) * (std::conj(b) * alpha + zeta * std::conj(alpha)) / det;
}

inline double steady_state_nbar_conditioned(const DeviceParams& p, const PumpSpec& pump,
                                            const DriveSpec& drive, int sigma) {
  return std::norm(steady_state_amplitude(p, pump, drive, sigma));
}

/// Coherent intra-cavity photon number |alpha|^2. In amplifier and squeezer
/// modes it does not depend on the qubit state (checked here); for a general
/// drive angle the two conditioned values differ and their mean is returned.
inline double steady_state_nbar(const DeviceParams& p, const PumpSpec& pump,
                                const DriveSpec& drive) {
  const double up = steady_state_nbar_conditioned(p, pump, drive, +1);
  const double down = steady_state_nbar_conditioned(p, pump, drive, -1);
  if (classify(pump, drive) != Mode::general) {
    const double scale = std::max(std::abs(up), std::abs(down));
    if (std::abs(up - down) > 1e-10 * scale)
      throw ConvergenceError("conditioned photon numbers differ in a symmetric mode");
  }
  return 0.5 * (up + down);
}

// --- measurement rates (raw, uncalibrated) ---------------------------------

/// Amplifier mode at fixed intra-cavity photon number.
inline double measurement_rate_amp(const DeviceParams& p, double lambda, double nbar,
                                   double n_add) {
  require_below_threshold(p, lambda);
  const double k2 = 0.5 * p.kappa, x2 = p.chi * p.chi;
  const double num = x2 * p.kappa * nbar / ((k2 - lambda) * (k2 - lambda) + x2);
  const double a = (k2 + lambda) * (k2 + lambda) - x2;
  const double den = k2 * k2 - lambda * lambda + x2;
  const double noise = 0.5 * (a * a + x2 * p.kappa * p.kappa) / (den * den);
  return num / (noise + n_add);
}

/// Squeezer mode at fixed intra-cavity photon number.
inline double measurement_rate_sqz(const DeviceParams& p, double lambda, double nbar,
                                   double n_add) {
  require_below_threshold(p, lambda);
  const double k2 = 0.5 * p.kappa, x2 = p.chi * p.chi;
  const double num = x2 * p.kappa * nbar / ((k2 + lambda) * (k2 + lambda) + x2);
  const double a = (k2 - lambda) * (k2 - lambda) - x2;
  const double den = k2 * k2 - lambda * lambda + x2;
  const double noise = 0.5 * (a * a + x2 * p.kappa * p.kappa) / (den * den);
  return num / (noise + n_add);
}

/// Linear resonator (or zero gain).
inline double measurement_rate_zero_gain(const DeviceParams& p, double nbar, double n_add) {
  const double x2 = p.chi * p.chi;
  return 2.0 * x2 * p.kappa * nbar / ((0.25 * p.kappa * p.kappa + x2) * (1.0 + 2.0 * n_add));
}

/// Leading order in chi/kappa of measurement_rate_amp.
inline double measurement_rate_amp_leading(const DeviceParams& p, double lambda, double nbar,
                                           double n_add) {
  const double g0 = g0_from_lambda(lambda, p.kappa);
  const double s = 1.0 + std::sqrt(g0);
  return 2.0 * p.chi * p.chi * nbar * s * s / (p.kappa * (g0 + 2.0 * n_add));
}

/// Leading order in chi/kappa of measurement_rate_sqz.
inline double measurement_rate_sqz_leading(const DeviceParams& p, double lambda, double nbar,
                                           double n_add) {
  const double g0 = g0_from_lambda(lambda, p.kappa);
  const double s = 1.0 + 1.0 / std::sqrt(g0);
  return 2.0 * p.chi * p.chi * nbar * s * s / (p.kappa * (1.0 / g0 + 2.0 * n_add));
}

/// Raw measurement rate for an arbitrary drive angle, from the zero-frequency
/// input-output map a_out = mu a_in + nu a_in^dag of the linearized resonator.
/// The measured quadrature is orthogonal to the drive.
inline double measurement_rate_general(const DeviceParams& p, const PumpSpec& pump,
                                       const DriveSpec& drive) {
  require_below_threshold(p, pump.lambda);
  const cplx zeta = pump.zeta();
  const cplx alpha = drive.alpha_in(p.omega_qpa);
  const cplx rot = std::polar(1.0, -(drive.phi + 0.5 * std::numbers::pi));
  const double n_eff = drive.effective_added_noise();
  double q[2], s[2];
  for (int i = 0; i < 2; ++i) {
    const int sigma = i == 0 ? +1 : -1;
    const cplx b(0.5 * p.kappa, p.chi * sigma);
    const double det = std::norm(b) - std::norm(zeta);
    const cplx a_mean = -std::sqrt(p.kappa) * (std::conj(b) * alpha + zeta * std::conj(alpha)) / det;
    const cplx a_out = alpha + std::sqrt(p.kappa) * a_mean;
    const cplx mu = (det - p.kappa * std::conj(b)) / det;
    const cplx nu = -p.kappa * zeta / det;
    const cplx w = rot * mu + std::conj(rot) * std::conj(nu);
    q[i] = std::sqrt(2.0) * (rot * a_out).real();
    s[i] = 0.5 * std::norm(w) + n_eff;
  }
  return 0.25 * (q[0] - q[1]) * (q[0] - q[1]) / (s[0] + s[1]);
}

// --- efficiency ------------------------------------------------------------

struct RateResult {
  double gamma_phi = 0.0;        // total dephasing, 1/s
  double gamma_parasitic = 0.0;  // drive-independent part incl. 1/T2*, 1/s
  double gamma_meas = 0.0;       // calibrated measurement rate, 1/s
  double gamma_meas_raw = 0.0;   // uncalibrated rate, 1/s
  double eta_meas = 0.0;
  double eta_qpa = 0.0;
  double eta_rest = 0.0;
  double nbar = 0.0;             // coherent intra-cavity photon number
  double lambda = 0.0;           // rad/s
  Mode mode = Mode::amplifier;
};

/// Dephasing, measurement rate and the efficiency triple
///   eta_meas = Gamma_meas / (2 Gamma_phi),  eta_QPA = 1 - Gamma_par / Gamma_phi,
///   eta_rest = eta_meas / eta_QPA.
/// Downstream noise enters through DriveSpec::effective_added_noise().
inline RateResult efficiency(const DeviceParams& p, const PumpSpec& pump, const DriveSpec& drive) {
  RateResult r;
  r.lambda = pump.lambda;
  r.mode = classify(pump, drive);
  r.gamma_parasitic = parasitic_dephasing(p, pump.lambda);
  r.gamma_phi = drive_dephasing(p, pump, drive) + r.gamma_parasitic;
  r.nbar = steady_state_nbar(p, pump, drive);
  const double n_eff = drive.effective_added_noise();
  switch (r.mode) {
    case Mode::amplifier:
      r.gamma_meas_raw = measurement_rate_amp(p, pump.lambda, r.nbar, n_eff);
      break;
    case Mode::squeezer:
      r.gamma_meas_raw = measurement_rate_sqz(p, pump.lambda, r.nbar, n_eff);
      break;
    case Mode::general:
      r.gamma_meas_raw = measurement_rate_general(p, pump, drive);
      break;
  }
  r.gamma_meas = kMeasCalibration * r.gamma_meas_raw;
  if (!(r.gamma_phi > 0.0)) throw DomainError("efficiency undefined for zero dephasing");
  r.eta_meas = r.gamma_meas / (2.0 * r.gamma_phi);
  r.eta_qpa = 1.0 - r.gamma_parasitic / r.gamma_phi;
  r.eta_rest = r.eta_meas / r.eta_qpa;
  return r;
}

}  // namespace qpa::analytic
