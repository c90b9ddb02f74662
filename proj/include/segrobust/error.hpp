// Copyright 2026 The segrobust Authors.
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

namespace segrobust {

// Base of every error the library throws. The CLI maps each subclass to its
// own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a precondition: bad shape, out-of-range label, unknown key.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (files, manifests, checkpoints).
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite values appeared during a computation (e.g. diverged training).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace segrobust
