// vocabulary.h
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
// Closed vocabulary for n-gram modeling.

#ifndef SDTR_VOCABULARY_H_
#define SDTR_VOCABULARY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sdtr {

using WordId = std::uint32_t;

// Ordinary words get ids 0..K-1; the reserved symbols follow in the order
// <s>, </s>, <unk>. <s> only ever appears as context.
class Vocabulary {
 public:
  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kEos = "</s>";
  static constexpr std::string_view kUnk = "<unk>";

  Vocabulary() : Vocabulary(std::vector<std::string>{}) {}
  // Throws InvalidArgument on duplicates or reserved symbols among `words`.
  explicit Vocabulary(std::vector<std::string> words);

  std::size_t num_words() const { return num_words_; }
  // All symbols, reserved ones included.
  std::size_t size() const { return symbols_.size(); }

  WordId bos() const { return static_cast<WordId>(num_words_); }
  WordId eos() const { return static_cast<WordId>(num_words_ + 1); }
  WordId unk() const { return static_cast<WordId>(num_words_ + 2); }

  // Maps out-of-vocabulary strings to unk.
  WordId Lookup(std::string_view symbol) const;
  std::optional<WordId> Find(std::string_view symbol) const;
  bool Contains(std::string_view word) const { return Find(word).has_value(); }
  const std::string &symbol(WordId id) const { return symbols_.at(id); }
  // The K ordinary words in id order.
  std::span<const std::string> words() const {
    return {symbols_.data(), num_words_};
  }
  // Returns `token` if it is a known symbol, else "<unk>".
  const std::string &Map(const std::string &token) const;

  bool operator==(const Vocabulary &other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, WordId> ids_;
  std::size_t num_words_ = 0;
};

// Fraction of tokens that are ordinary vocabulary words. Throws
// InvalidArgument for an empty token list.
double Coverage(const Vocabulary &vocab, std::span<const std::string> tokens);

}  // namespace sdtr

#endif  // SDTR_VOCABULARY_H_
