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

// Unit system: SI, with every frequency/rate stored as an angular quantity in
// rad/s. Human-facing inputs quote "f/2pi" in Hz; convert at the boundary.

#include <cmath>
#include <numbers>

namespace qpa::units {

inline constexpr double kHbar = 1.054571817e-34;  // J s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double hz_to_rad(double hz) { return kTwoPi * hz; }
inline constexpr double rad_to_hz(double rad_per_s) { return rad_per_s / kTwoPi; }

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

inline double db_to_ratio(double db) { return std::pow(10.0, db / 10.0); }
inline double ratio_to_db(double ratio) { return 10.0 * std::log10(ratio); }

inline constexpr double per_us(double rate_per_s) { return rate_per_s * 1e-6; }

}  // namespace qpa::units
