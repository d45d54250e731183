// Copyright 2026 The qthermo Authors.
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

#ifndef QTHERMO_ERROR_HPP_
#define QTHERMO_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace qthermo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input, e.g. mismatched operand lengths or a bad Pauli word.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment or model configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Floating point results that violate an expected invariant.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Precondition of an operation not met by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Input outside the mathematical domain of a map.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Requested size exceeds what dense storage supports.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace qthermo

#endif  // QTHERMO_ERROR_HPP_
