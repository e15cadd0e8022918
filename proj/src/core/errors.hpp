// Copyright 2026 The chaoslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace chaoslab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, empty inputs, unsorted grids.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A physics precondition does not hold (insufficient truncation, Bloch-domain
/// violation, parameters past the parametric instability).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical method failed to reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Scenario configuration could not be parsed or validated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Output files could not be created or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace chaoslab
