// tokenizer.cc
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

#include "sdtr/tokenizer.h"

#include <string>

#include "sdtr/util.h"

namespace sdtr {

namespace {

struct Range {
  char32_t lo, hi;
};

// Non-ASCII blocks treated as separators: punctuation, symbols, spaces and
// controls. Everything else above U+007F counts as a word character.
constexpr Range kSeparatorRanges[] = {
    {0x0080, 0x00A9}, {0x00AB, 0x00B1}, {0x00B4, 0x00B4}, {0x00B6, 0x00B8},
    {0x00BB, 0x00BF}, {0x00D7, 0x00D7}, {0x00F7, 0x00F7}, {0x2000, 0x206F},
    {0x20A0, 0x20CF}, {0x2100, 0x2BFF}, {0x3000, 0x303F}, {0xFE30, 0xFE4F},
    {0xFEFF, 0xFEFF}, {0xFF00, 0xFF0F}, {0xFF1A, 0xFF20}, {0xFF3B, 0xFF40},
    {0xFF5B, 0xFF65}, {0xFFF0, 0xFFFF}, {0x1F000, 0x1FAFF},
};

}  // namespace

bool IsWordCodePoint(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9');
  }
  for (const Range &r : kSeparatorRanges)
    if (cp >= r.lo && cp <= r.hi) return false;
  return true;
}

char32_t ToLower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp < 0xC0) return cp;
  if (cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1
  if (cp >= 0x0100 && cp <= 0x017F && cp != 0x0130 && cp != 0x0138 &&
      cp != 0x0149 && cp != 0x017F) {
    // Latin Extended-A alternates upper/lower, with a parity shift at U+0139
    // and again at U+014A.
    const bool odd_upper = (cp >= 0x0139 && cp <= 0x0148) ||
                           (cp >= 0x0179 && cp <= 0x017E);
    const bool is_upper = odd_upper ? (cp % 2 == 1) : (cp % 2 == 0);
    if (cp == 0x0178) return 0x00FF;
    return is_upper ? cp + 1 : cp;
  }
  if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return cp + 0x20;  // Greek
  if (cp >= 0x0410 && cp <= 0x042F) return cp + 0x20;                  // Cyrillic
  if (cp >= 0x0400 && cp <= 0x040F) return cp + 0x50;
  if (cp >= 0xFF21 && cp <= 0xFF3A) return cp + 0x20;  // fullwidth Latin
  return cp;
}

TokenStream DefaultTokenizer::Tokenize(std::string_view text) const {
  TokenStream tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = NextCodePoint(text, &pos);
    if (IsWordCodePoint(cp)) {
      AppendUtf8(ToLower(cp), &current);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TokenStream Tokenize(std::string_view text) {
  return DefaultTokenizer().Tokenize(text);
}

std::vector<std::string> ExtractTerms(std::span<const std::string> tokens,
                                      const Stoplist &stoplist) {
  std::vector<std::string> terms;
  terms.reserve(tokens.size());
  for (const std::string &t : tokens)
    if (!stoplist.count(t)) terms.push_back(t);
  return terms;
}

const Stoplist &DefaultStoplist() {
  static const Stoplist *const kStoplist = new Stoplist{
      "a",     "about", "after", "all",   "also",  "an",    "and",   "any",
      "are",   "as",    "at",    "be",    "been",  "but",   "by",    "can",
      "do",    "for",   "from",  "has",   "have",  "how",   "i",     "in",
      "into",  "is",    "it",    "its",   "may",   "more",  "not",   "of",
      "on",    "or",    "other", "such",  "that",  "the",   "their", "these",
      "this",  "those", "to",    "using", "want",  "was",   "we",    "were",
      "what",  "which", "will",  "with",  "would",
  };
  return *kStoplist;
}

Stoplist LoadStoplist(std::istream &in) {
  Stoplist stoplist;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    for (std::string &tok : Tokenize(t)) stoplist.insert(std::move(tok));
  }
  return stoplist;
}

SentenceList SplitSentences(std::string_view text, const Tokenizer &tokenizer) {
  SentenceList sentences;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    TokenStream tokens = tokenizer.Tokenize(text.substr(start, end - start));
    if (!tokens.empty()) sentences.push_back(std::move(tokens));
    start = end + 1;
  }
  return sentences;
}

}  // namespace sdtr
