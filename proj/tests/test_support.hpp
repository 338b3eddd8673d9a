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

#include <cmath>
#include <limits>
#include <random>

#include "qpa/params.hpp"

namespace qpa::testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dimensionless device: kappa = 1, omega_qpa = 1 so that a drive flux equals
/// |alpha_in|^2 in units of kappa.
inline DeviceParams unit_device(double chi, double t1 = kInf, double t2 = kInf) {
  DeviceParams p;
  p.kappa = 1.0;
  p.chi = chi;
  p.omega_qpa = 1.0;
  p.omega_q = 0.0;
  p.t1 = t1;
  p.t2 = t2;
  return validate(p);
}

inline DriveSpec flux_drive(double flux, double phi, double n_add = 0.0) {
  DriveSpec d = DriveSpec::from_flux(flux, 1.0, phi);
  d.n_add = n_add;
  return d;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// Uniform draw helper for property tests.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace qpa::testing
