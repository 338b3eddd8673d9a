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
#include <complex>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "qpa/error.hpp"

namespace qpa::ode {

struct Tolerance {
  double rel = 1e-9;
  double abs = 1e-12;
};

/// Adaptive Dormand-Prince 5(4) from t0 to t1. Any stepper failure or a
/// non-finite state is reported as ConvergenceError.
template <class State, class System>
void integrate(System&& system, State& x, double t0, double t1, double dt0, Tolerance tol = {}) {
  namespace odeint = boost::numeric::odeint;
  if (t1 <= t0) return;
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tol.abs, tol.rel);
  try {
    odeint::integrate_adaptive(stepper, system, x, t0, t1, std::min(dt0, t1 - t0));
  } catch (const std::exception& e) {
    throw ConvergenceError(std::string("ODE integration failed: ") + e.what());
  }
  for (const auto& v : x) {
    if (!std::isfinite(std::abs(v))) throw ConvergenceError("ODE state became non-finite");
  }
}

}  // namespace qpa::ode
