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

// Device parameters of the three reference datasets. The bundled configs in
// configs/ carry the same numbers.

#include "qpa/params.hpp"

namespace qpa::presets {

inline constexpr double kT1 = 4.2e-6;               // s
inline constexpr double kGamma2StarPerS = 0.23e6;   // 1/T2*, 1/s

inline DeviceParams with_qubit(double kappa_hz, double chi_hz, double omega_qpa_hz,
                               double omega_q_hz) {
  return device_from_hz(kappa_hz, chi_hz, omega_qpa_hz, omega_q_hz, kT1,
                        t2_for_gamma2_star(kGamma2StarPerS, kT1));
}

inline DeviceParams fig2() { return with_qubit(25.4e6, 1.9e6, 6.740e9, 4.271e9); }
inline DeviceParams fig3() { return with_qubit(25.7e6, 1.7e6, 6.740e9, 4.274e9); }
inline DeviceParams fig4() { return with_qubit(28.6e6, 2.0e6, 6.700e9, 4.271e9); }

}  // namespace qpa::presets
