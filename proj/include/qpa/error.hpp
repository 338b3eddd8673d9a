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

#include <stdexcept>
#include <string>

namespace qpa {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid physical or configuration input (negative linewidth, bad grid, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Request at or above the parametric threshold (lambda >= kappa/2), or an
/// otherwise undefined physical quantity (e.g. efficiency with zero dephasing).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Integrator, fixed-point or fit failure. Never swallowed silently.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Fock-space cutoff too small for the requested state.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Estimator applied outside its validity regime (e.g. nonlinear SNR^2 growth).
class RegimeError : public Error {
 public:
  using Error::Error;
};

}  // namespace qpa
