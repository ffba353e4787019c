// Copyright 2026 The vibcoh Authors
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

namespace vibcoh {

// Base for numerical guard violations (truncation too small, integrator
// failure, non-Hermitian generator). The CLI maps these to exit code 3.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TruncationError : public GuardError {
 public:
  using GuardError::GuardError;
};

class NumericalError : public GuardError {
 public:
  using GuardError::GuardError;
};

}  // namespace vibcoh
