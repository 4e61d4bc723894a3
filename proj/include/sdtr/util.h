// util.h
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
// Small helpers: file I/O, string handling, UTF-8 and seeded randomness.

#ifndef SDTR_UTIL_H_
#define SDTR_UTIL_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace sdtr {

std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, std::string_view contents);

std::string_view Trim(std::string_view s);
// Splits on runs of ASCII whitespace; no empty fields.
std::vector<std::string> SplitWhitespace(std::string_view s);
std::vector<std::string> Split(std::string_view s, char sep);
std::string Join(const std::vector<std::string> &parts, std::string_view sep);

// Shortest decimal that reads back to the same double.
std::string FormatDouble(double value);
double ParseDouble(std::string_view s);

// Throws ParseError at the first invalid byte.
void ValidateUtf8(std::string_view s);
// Decodes one code point starting at s[*pos] and advances *pos. The input
// must already be valid UTF-8.
char32_t NextCodePoint(std::string_view s, std::size_t *pos);
void AppendUtf8(char32_t cp, std::string *out);
std::size_t CountCodePoints(std::string_view s);

// Deterministic random source. Draws are defined bit-for-bit in terms of
// the mt19937_64 output so results do not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform in [0, n).
  std::size_t Below(std::size_t n) {
    return static_cast<std::size_t>(Uniform() * static_cast<double>(n));
  }
  std::uint64_t Next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Mixes a base seed with a string key (e.g. a topic id).
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view key);

}  // namespace sdtr

#endif  // SDTR_UTIL_H_
