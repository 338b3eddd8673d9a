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

// Umbrella header for the header-only core. The io layer (qpa/io/*) lives in
// the qpa_io library and is included separately.

#include "qpa/analytic.hpp"
#include "qpa/error.hpp"
#include "qpa/fock.hpp"
#include "qpa/gaussian.hpp"
#include "qpa/params.hpp"
#include "qpa/presets.hpp"
#include "qpa/sweep.hpp"
#include "qpa/trajectory.hpp"
#include "qpa/units.hpp"
