/*
 * Copyright 2026 The GRAF Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace graf {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a precondition (bad argument, bad configuration).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input data is malformed or inconsistent with what was asked of it.
class DataError : public Error {
 public:
  using Error::Error;
};

// A persisted document could not be decoded. `location` names where.
class FormatError : public DataError {
 public:
  FormatError(const std::string& location, const std::string& message)
      : DataError(location.empty() ? message : location + ": " + message),
        location_(location) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

// An internal invariant did not hold. Always a bug.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace graf
