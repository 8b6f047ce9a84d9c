/*
 * Copyright 2026 The monoaudit Authors.
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

#ifndef MONOAUDIT_ERRORS_H_
#define MONOAUDIT_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace monoaudit {

// Base class for every failure the toolkit reports to a caller. The CLI maps
// these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data. `line` is 1-based and 0 when not tied to a line.
class DataError : public Error {
 public:
  DataError(const std::string& message, std::size_t line = 0)
      : Error(line == 0 ? message
                        : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Invalid configuration, column mapping, or generator spec.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Not enough usable data for the requested computation (empty cohort, fewer
// than two bins, no eligible reference group, ...).
class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace monoaudit

#endif  // MONOAUDIT_ERRORS_H_
