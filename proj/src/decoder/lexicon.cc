// lexicon.cc
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

#include "sdtr/lexicon.h"

#include <istream>
#include <ostream>

#include "sdtr/error.h"
#include "sdtr/util.h"

namespace sdtr {

Pronunciation SpellGraphemes(std::string_view word) {
  Pronunciation out;
  std::size_t pos = 0;
  while (pos < word.size()) {
    std::string sym;
    AppendUtf8(NextCodePoint(word, &pos), &sym);
    out.push_back(std::move(sym));
  }
  return out;
}

void Lexicon::Add(const std::string &word, Pronunciation pron) {
  if (word.empty()) throw InvalidArgument("lexicon entry with an empty word");
  if (pron.empty()) throw InvalidArgument("empty pronunciation for '" + word + "'");
  if (!entries_.emplace(word, std::move(pron)).second)
    throw InvalidArgument("duplicate lexicon entry for '" + word + "'");
}

std::optional<Pronunciation> Lexicon::Find(const std::string &word) const {
  auto it = entries_.find(word);
  if (it != entries_.end()) return it->second;
  if (grapheme_fallback_ && !word.empty()) return SpellGraphemes(word);
  return std::nullopt;
}

Pronunciation Lexicon::Get(const std::string &word) const {
  auto pron = Find(word);
  if (!pron) throw InvalidArgument("no pronunciation for word '" + word + "'");
  return *std::move(pron);
}

Lexicon Lexicon::Read(std::istream &in, bool grapheme_fallback) {
  Lexicon lex(grapheme_fallback);
  std::string line;
  std::size_t offset = 0, line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t here = offset;
    offset += line.size() + 1;
    const std::string_view body = Trim(line);
    if (body.empty() || body[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("lexicon line needs word<TAB>phonemes", here, ParseError::kNoIndex,
                       line_no);
    const std::string word(Trim(std::string_view(line).substr(0, tab)));
    Pronunciation pron = SplitWhitespace(std::string_view(line).substr(tab + 1));
    try {
      lex.Add(word, std::move(pron));
    } catch (const InvalidArgument &e) {
      throw ParseError(e.what(), here, ParseError::kNoIndex, line_no);
    }
  }
  return lex;
}

void Lexicon::Write(std::ostream &out) const {
  for (const auto &[word, pron] : entries_) out << word << '\t' << Join(pron, " ") << '\n';
}

Pronunciation Phonemize(std::span<const std::string> words, const Lexicon &lexicon) {
  Pronunciation out;
  for (const std::string &w : words) {
    const Pronunciation p = lexicon.Get(w);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

}  // namespace sdtr
