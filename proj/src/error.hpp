// Copyright 2026 The CEIQ Authors. All Rights Reserved.
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

#ifndef CEIQ_ERROR_HPP_
#define CEIQ_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ceiq {

enum class ErrorKind {
  kInvalidArgument,
  kIo,
  kParse,
  kDegenerate,
  kConvergence,
};

// Base of every exception thrown by the library. The C API maps kind() onto
// its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::kInvalidArgument, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

// Malformed model/manifest/cache text. line is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(ErrorKind::kParse,
              line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// The requested quantity is mathematically undefined for this input
// (constant vector correlation, empty common histogram support, ...).
class DegenerateInput : public Error {
 public:
  explicit DegenerateInput(const std::string& what)
      : Error(ErrorKind::kDegenerate, what) {}
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, double objective)
      : Error(ErrorKind::kConvergence, what), objective_(objective) {}
  double objective() const { return objective_; }

 private:
  double objective_;
};

}  // namespace ceiq

#endif  // CEIQ_ERROR_HPP_
