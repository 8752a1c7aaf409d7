// Copyright 2026 The SDMM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace sdmm {

// Caller violated a precondition: mismatched fields, bad shapes, out-of-range
// parameters. The CLI maps these to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mathematically undefined request, e.g. inverting zero.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A parameter set needs more than the 62-bit modulus budget or a configured
// memory cap.
class ParameterTooLargeError : public UsageError {
 public:
  using UsageError::UsageError;
};

// Construction of a code failed (invalid exponent table, point search
// exhausted). The CLI maps these to exit code 3.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PointSearchError : public ConstructionError {
 public:
  using ConstructionError::ConstructionError;
};

// Wire-level failures.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FramingError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

}  // namespace sdmm
