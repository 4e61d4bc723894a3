// error.h
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
//
// Copyright 2026 The sdtr Authors.
//
// \file
// Exception types shared by all sdtr modules.

#ifndef SDTR_ERROR_H_
#define SDTR_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdtr {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input. Carries the byte offset of the offending construct and,
// where meaningful, the index of the record being parsed and the line number.
class ParseError : public Error {
 public:
  static constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

  ParseError(const std::string &message, std::size_t offset,
             std::size_t record = kNoIndex, std::size_t line = kNoIndex);

  std::size_t offset() const { return offset_; }
  std::size_t record() const { return record_; }
  std::size_t line() const { return line_; }

 private:
  std::size_t offset_;
  std::size_t record_;
  std::size_t line_;
};

// Invalid argument or configuration value.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Search failure inside the decoder.
class DecodeError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdtr

#endif  // SDTR_ERROR_H_
