// lexicon.h
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
// Word pronunciations. Each word has exactly one phoneme sequence, taken
// from an explicit entry or, when enabled, spelled out letter by letter.

#ifndef SDTR_LEXICON_H_
#define SDTR_LEXICON_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sdtr {

using Pronunciation = std::vector<std::string>;

// One phoneme per code point of the word.
Pronunciation SpellGraphemes(std::string_view word);

class Lexicon {
 public:
  explicit Lexicon(bool grapheme_fallback = true)
      : grapheme_fallback_(grapheme_fallback) {}

  // Lines of "word<TAB>p1 p2 ...". Blank lines and lines starting with '#'
  // are skipped. Throws ParseError on malformed or duplicate entries.
  static Lexicon Read(std::istream &in, bool grapheme_fallback = true);
  void Write(std::ostream &out) const;

  // Throws InvalidArgument for an empty word, an empty pronunciation or a
  // duplicate entry.
  void Add(const std::string &word, Pronunciation pron);

  bool HasEntry(const std::string &word) const { return entries_.count(word) > 0; }
  // The entry, else the spelled-out word when the fallback is on.
  std::optional<Pronunciation> Find(const std::string &word) const;
  // As Find, but throws InvalidArgument naming an unresolvable word.
  Pronunciation Get(const std::string &word) const;

  bool grapheme_fallback() const { return grapheme_fallback_; }
  void set_grapheme_fallback(bool on) { grapheme_fallback_ = on; }
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, Pronunciation> &entries() const { return entries_; }

 private:
  std::map<std::string, Pronunciation> entries_;
  bool grapheme_fallback_;
};

// Concatenated pronunciations. Throws InvalidArgument naming the first
// unresolvable word.
Pronunciation Phonemize(std::span<const std::string> words, const Lexicon &lexicon);

}  // namespace sdtr

#endif  // SDTR_LEXICON_H_
