// Copyright 2026 The qtomo Authors
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

namespace qtomo {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A density matrix failed one of the state invariants.
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// The Fock cutoff is too small for the requested phase-space point.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Tomogram evaluated on the ray (mu, nu) = (0, 0).
class DegenerateRay : public Error {
 public:
  DegenerateRay() : Error("degenerate ray (mu, nu) = (0, 0)") {}
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Matrix is not Hermitian within tolerance.
class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

}  // namespace qtomo
