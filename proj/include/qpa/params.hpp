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

// Device, pump and drive descriptions shared by every rate engine.
//
// Frame and phase conventions used throughout the library:
//  * rotating frame at the resonator frequency, qubit frame at its bare
//    frequency (the qubit-resonator detuning drops out of every rate);
//  * dispersive shift chi such that the Stark shift of the qubit is 2*chi*n;
//  * resonator Heisenberg-Langevin equation
//        da/dt = (-i chi sigma - kappa/2) a + zeta a^dag - sqrt(kappa) a_in,
//        zeta  = -lambda exp(2 i pump_phase),
//    with a coherent input <a_in> = |alpha_in| exp(i phi);
//  * consequently phi - pump_phase = 0 is amplifier mode (the drive lies
//    along the deamplified quadrature, the signal quadrature is amplified)
//    and phi - pump_phase = pi/2 is squeezer mode.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>

#include "qpa/error.hpp"
#include "qpa/units.hpp"

namespace qpa {

struct DeviceParams {
  double kappa = 0.0;      // total resonator linewidth, rad/s
  double chi = 0.0;        // dispersive shift, rad/s
  double omega_qpa = 0.0;  // resonator frequency, rad/s
  double omega_q = 0.0;    // qubit frequency, rad/s
  std::optional<double> kappa_ext;  // optional split of kappa, rad/s
  std::optional<double> kappa_int;
  double t1 = std::numeric_limits<double>::infinity();  // s
  double t2 = std::numeric_limits<double>::infinity();  // s

  /// Qubit-resonator detuning. Kept for completeness; no rate depends on it.
  double delta() const { return omega_q - omega_qpa; }

  /// 1/T2* = 1/T2 + 1/(2 T1). Well defined for infinite T1 and/or T2.
  double gamma2_star() const { return 1.0 / t2 + 0.5 / t1; }

  /// T2* = 2 T1 T2 / (2 T1 + T2), recomputed on every call.
  double t2_star() const { return 1.0 / gamma2_star(); }
};

/// Checks every DeviceParams invariant and returns the accepted copy.
inline DeviceParams validate(DeviceParams p) {
  auto finite_positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!finite_positive(p.kappa)) throw ValidationError("kappa must be finite and > 0");
  if (!std::isfinite(p.chi)) throw ValidationError("chi must be finite");
  if (!(p.omega_qpa >= 0.0) || !std::isfinite(p.omega_qpa))
    throw ValidationError("omega_qpa must be finite and >= 0");
  if (!std::isfinite(p.omega_q)) throw ValidationError("omega_q must be finite");
  if (!(p.t1 > 0.0)) throw ValidationError("T1 must be > 0");
  if (!(p.t2 > 0.0)) throw ValidationError("T2 must be > 0");
  if (p.kappa_ext.has_value() != p.kappa_int.has_value())
    throw ValidationError("kappa_ext and kappa_int must be given together");
  if (p.kappa_ext) {
    if (*p.kappa_ext < 0.0 || *p.kappa_int < 0.0)
      throw ValidationError("kappa_ext and kappa_int must be >= 0");
    const double sum = *p.kappa_ext + *p.kappa_int;
    if (std::abs(sum - p.kappa) > 1e-12 * p.kappa)
      throw ValidationError("kappa_ext + kappa_int does not match kappa");
  }
  return p;
}

/// Builds validated DeviceParams from the "f/2pi in Hz" values used in configs.
inline DeviceParams device_from_hz(double kappa_hz, double chi_hz, double omega_qpa_hz,
                                   double omega_q_hz, double t1, double t2) {
  DeviceParams p;
  p.kappa = units::hz_to_rad(kappa_hz);
  p.chi = units::hz_to_rad(chi_hz);
  p.omega_qpa = units::hz_to_rad(omega_qpa_hz);
  p.omega_q = units::hz_to_rad(omega_q_hz);
  p.t1 = t1;
  p.t2 = t2;
  return validate(p);
}

/// T2 that yields the requested 1/T2* for a given T1.
inline double t2_for_gamma2_star(double gamma2_star, double t1) {
  const double inv_t2 = gamma2_star - 0.5 / t1;
  if (!(inv_t2 > 0.0)) throw ValidationError("1/T2* must exceed 1/(2 T1)");
  return 1.0 / inv_t2;
}

// --- gain metrics ----------------------------------------------------------

/// lambda = (kappa/2) sqrt(G-1) / (sqrt(G)+1) for the measured gain G = G_QPA.
inline double lambda_from_gain(double gain, double kappa) {
  if (!(gain >= 1.0)) throw DomainError("G_QPA must be >= 1");
  if (std::isinf(gain)) return 0.5 * kappa;
  return 0.5 * kappa * std::sqrt(gain - 1.0) / (std::sqrt(gain) + 1.0);
}

/// Inverse of lambda_from_gain. With r = 2 lambda / kappa and s = sqrt(G):
/// r (s + 1) = sqrt(s^2 - 1)  =>  s = (1 + r^2) / (1 - r^2).
inline double gain_from_lambda(double lambda, double kappa) {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be >= 0");
  if (!(lambda < 0.5 * kappa)) throw DomainError("lambda at or above parametric threshold");
  const double r2 = std::pow(2.0 * lambda / kappa, 2);
  const double s = (1.0 + r2) / (1.0 - r2);
  return s * s;
}

/// Internal gain metric sqrt(G0) = (kappa/2 + lambda) / (kappa/2 - lambda).
inline double g0_from_lambda(double lambda, double kappa) {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be >= 0");
  if (!(lambda < 0.5 * kappa)) throw DomainError("lambda at or above parametric threshold");
  const double s = (0.5 * kappa + lambda) / (0.5 * kappa - lambda);
  return s * s;
}

// --- pump and drive --------------------------------------------------------

struct PumpSpec {
  double gain_qpa = 1.0;    // G_QPA, power ratio >= 1
  double lambda = 0.0;      // rad/s, derived from gain_qpa
  double pump_phase = 0.0;  // rad; see the convention note at the top

  double gain_db() const { return units::ratio_to_db(gain_qpa); }

  static PumpSpec from_gain_db(double gain_db, double kappa, double pump_phase = 0.0) {
    if (!std::isfinite(gain_db) || gain_db < 0.0)
      throw DomainError("gain in dB must be finite and >= 0");
    PumpSpec s;
    s.gain_qpa = units::db_to_ratio(gain_db);
    s.lambda = lambda_from_gain(s.gain_qpa, kappa);
    if (!(s.lambda < 0.5 * kappa)) throw DomainError("gain at or above parametric threshold");
    s.pump_phase = pump_phase;
    return s;
  }

  static PumpSpec from_lambda(double lambda, double kappa, double pump_phase = 0.0) {
    PumpSpec s;
    s.gain_qpa = gain_from_lambda(lambda, kappa);
    s.lambda = lambda;
    s.pump_phase = pump_phase;
    return s;
  }

  /// Complex pump coefficient zeta multiplying a^dag in da/dt.
  std::complex<double> zeta() const { return -lambda * std::polar(1.0, 2.0 * pump_phase); }
};

struct DriveSpec {
  double p_in = 0.0;     // W, incident on the resonator
  double phi = 0.0;      // rad, drive phase
  double n_add = 0.0;    // added noise quanta referred to the QPA output
  double eta_loss = 1.0; // lumped downstream transmission in (0, 1]

  static DriveSpec from_dbm(double dbm, double phi = 0.0) {
    DriveSpec d;
    d.p_in = units::dbm_to_watt(dbm);
    d.phi = phi;
    return d;
  }

  /// Builds a drive from a photon flux |alpha_in|^2 (photons/s).
  static DriveSpec from_flux(double photons_per_s, double omega_qpa, double phi = 0.0) {
    DriveSpec d;
    d.p_in = photons_per_s * units::kHbar * omega_qpa;
    d.phi = phi;
    return d;
  }

  /// |alpha_in|^2 = P_in / (hbar omega_QPA), photons per second.
  double alpha_in_flux(double omega_qpa) const {
    return p_in / (units::kHbar * omega_qpa);
  }

  /// Complex input amplitude alpha_in, sqrt(photons/s).
  std::complex<double> alpha_in(double omega_qpa) const {
    return std::polar(std::sqrt(alpha_in_flux(omega_qpa)), phi);
  }

  /// Effective added noise referred to the QPA output once the downstream
  /// transmission is lumped in: n_add/eta + (1-eta)/(2 eta).
  double effective_added_noise() const {
    return n_add / eta_loss + (1.0 - eta_loss) / (2.0 * eta_loss);
  }
};

inline DriveSpec validate(DriveSpec d) {
  if (!(d.p_in >= 0.0) || !std::isfinite(d.p_in)) throw ValidationError("P_in must be >= 0");
  if (!std::isfinite(d.phi)) throw ValidationError("phi must be finite");
  if (!(d.n_add >= 0.0) || !std::isfinite(d.n_add)) throw ValidationError("n_add must be >= 0");
  if (!(d.eta_loss > 0.0 && d.eta_loss <= 1.0))
    throw ValidationError("eta_loss must lie in (0, 1]");
  return d;
}

inline PumpSpec validate(PumpSpec s, const DeviceParams& p) {
  if (!(s.gain_qpa >= 1.0)) throw DomainError("G_QPA must be >= 1");
  if (!(s.lambda >= 0.0)) throw DomainError("lambda must be >= 0");
  if (!(s.lambda < 0.5 * p.kappa)) throw DomainError("lambda at or above parametric threshold");
  if (!std::isfinite(s.pump_phase)) throw ValidationError("pump phase must be finite");
  return s;
}

}  // namespace qpa
