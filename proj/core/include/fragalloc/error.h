// Copyright 2026 The Fragalloc Authors
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

#ifndef FRAGALLOC_ERROR_H_
#define FRAGALLOC_ERROR_H_

#include <stdexcept>
#include <string>

namespace fragalloc {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent user input: topology, scenario documents, rule
// text, ground-atom updates.
class InputError : public Error {
 public:
  using Error::Error;
};

// Syntax error in rule-language text. what() reads "line:column: message".
class ParseError : public InputError {
 public:
  ParseError(int line, int column, const std::string& message)
      : InputError(std::to_string(line) + ":" + std::to_string(column) + ": " +
                   message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Failure while evaluating a rule program (bad arithmetic, runaway
// derivation).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// A runtime invariant of the simulated cluster was breached.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace fragalloc

#endif  // FRAGALLOC_ERROR_H_
