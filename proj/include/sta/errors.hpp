// Copyright 2026 The STA Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace sta {

// Argument and range violations use std::invalid_argument / std::out_of_range.
// Everything below is a domain failure that callers may want to tell apart.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transport amplitude requested for a schedule without transport (f_F = 0).
class UndefinedAmplitude : public Error {
 public:
  using Error::Error;
};

class NotInCatalog : public Error {
 public:
  using Error::Error;
};

/// Motion at the requested energy is not bounded on one side.
class NoTurningPoint : public Error {
 public:
  using Error::Error;
};

/// Phase-space point outside the region where a closed form is valid.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A state does not fit on its spatial grid.
class ExtentError : public Error {
 public:
  using Error::Error;
};

/// Amplitude reached the grid boundary during propagation.
class LeakageError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace sta
