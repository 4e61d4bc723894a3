// tokenizer.h
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
// Word segmentation and content-term extraction.

#ifndef SDTR_TOKENIZER_H_
#define SDTR_TOKENIZER_H_

#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace sdtr {

using TokenStream = std::vector<std::string>;
// One sentence per element; used for n-gram counting.
using SentenceList = std::vector<TokenStream>;
using Stoplist = std::unordered_set<std::string>;

// Segmenter interface; a morphological analyzer can be plugged in here.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  // Returns normalized, nonempty tokens. Must be deterministic.
  virtual TokenStream Tokenize(std::string_view text) const = 0;
};

// Lowercases and splits on every run of non-alphanumeric code points.
// Input is assumed to be valid UTF-8.
class DefaultTokenizer : public Tokenizer {
 public:
  TokenStream Tokenize(std::string_view text) const override;
};

TokenStream Tokenize(std::string_view text);

bool IsWordCodePoint(char32_t cp);
char32_t ToLower(char32_t cp);

// Tokens not in the stoplist, order and duplicates preserved.
std::vector<std::string> ExtractTerms(std::span<const std::string> tokens,
                                      const Stoplist &stoplist);

// English function words shipped with the library.
const Stoplist &DefaultStoplist();
// One token per line; blank lines and '#' comments skipped. Entries are
// normalized with the default tokenizer.
Stoplist LoadStoplist(std::istream &in);

// Splits text at newlines and tokenizes each line; empty lines are dropped.
SentenceList SplitSentences(std::string_view text, const Tokenizer &tokenizer);

}  // namespace sdtr

#endif  // SDTR_TOKENIZER_H_
