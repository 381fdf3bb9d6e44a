// Copyright 2026 The OnlineIRL Authors
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

#ifndef OIRL_ERRORS_HPP_
#define OIRL_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oirl {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A requested time or window is off the sample grid or reaches before the
// first recorded sample.
class InsufficientHistory : public Error {
 public:
  using Error::Error;
};

// The simulated state became non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// The least-squares gain lost positive definiteness.
class GainDivergence : public Error {
 public:
  using Error::Error;
};

// The stacked IRL regressor does not have full column rank.
class RankConditionError : public Error {
 public:
  using Error::Error;
};

// The stacked right-hand side is too small to exclude the trivial solution.
class DegenerateRhsError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace oirl

#endif  // OIRL_ERRORS_HPP_
