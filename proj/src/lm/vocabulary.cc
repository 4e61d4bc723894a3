// vocabulary.cc
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

#include "sdtr/vocabulary.h"

#include <algorithm>

#include "sdtr/error.h"
#include "sdtr/ngram_counts.h"
#include "sdtr/util.h"

namespace sdtr {

namespace {

bool IsReserved(std::string_view s) {
  return s == Vocabulary::kBos || s == Vocabulary::kEos || s == Vocabulary::kUnk;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> words)
    : symbols_(std::move(words)), num_words_(symbols_.size()) {
  for (std::size_t i = 0; i < num_words_; ++i) {
    const std::string &w = symbols_[i];
    if (w.empty() || IsReserved(w))
      throw InvalidArgument("invalid vocabulary word '" + w + "'");
    if (w.find_first_of(" \t\n\r") != std::string::npos)
      throw InvalidArgument("vocabulary word contains whitespace: '" + w + "'");
    if (!ids_.emplace(w, static_cast<WordId>(i)).second)
      throw InvalidArgument("duplicate vocabulary word '" + w + "'");
  }
  for (std::string_view r : {kBos, kEos, kUnk}) {
    ids_.emplace(std::string(r), static_cast<WordId>(symbols_.size()));
    symbols_.emplace_back(r);
  }
}

WordId Vocabulary::Lookup(std::string_view symbol) const {
  auto it = ids_.find(std::string(symbol));
  return it == ids_.end() ? unk() : it->second;
}

std::optional<WordId> Vocabulary::Find(std::string_view symbol) const {
  auto it = ids_.find(std::string(symbol));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string &Vocabulary::Map(const std::string &token) const {
  return ids_.count(token) ? token : symbols_[unk()];
}

double Coverage(const Vocabulary &vocab, std::span<const std::string> tokens) {
  if (tokens.empty()) throw InvalidArgument("coverage of an empty corpus");
  std::size_t covered = 0;
  for (const std::string &t : tokens) {
    const auto id = vocab.Find(t);
    if (id && *id < vocab.num_words()) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(tokens.size());
}

Vocabulary SelectVocab(const CountTable &counts, std::size_t k) {
  if (k == 0) throw InvalidArgument("vocabulary size must be at least 1");
  std::vector<std::pair<std::string, Count>> entries;
  for (const auto &[word, c] : counts.order(1))
    if (!IsReserved(word) && c > 0) entries.emplace_back(word, c);
  auto better = [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  const std::size_t keep = std::min(k, entries.size());
  std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(keep),
                    entries.end(), better);
  std::vector<std::string> words;
  words.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) words.push_back(std::move(entries[i].first));
  return Vocabulary(std::move(words));
}

void CountTable::Add(std::span<const std::string> ngram, Count count) {
  if (ngram.empty() || ngram.size() > kMaxOrder)
    throw InvalidArgument("n-gram order must be 1..3");
  std::string key = ngram[0];
  for (std::size_t i = 1; i < ngram.size(); ++i) {
    key += ' ';
    key += ngram[i];
  }
  orders_[ngram.size() - 1][key] += count;
}

Count CountTable::Get(std::span<const std::string> ngram) const {
  if (ngram.empty() || ngram.size() > kMaxOrder) return 0;
  std::string key = ngram[0];
  for (std::size_t i = 1; i < ngram.size(); ++i) {
    key += ' ';
    key += ngram[i];
  }
  const auto &m = orders_[ngram.size() - 1];
  auto it = m.find(key);
  return it == m.end() ? 0 : it->second;
}

bool CountTable::empty() const {
  return std::all_of(orders_.begin(), orders_.end(),
                     [](const auto &m) { return m.empty(); });
}

Count CountTable::TotalTokens() const {
  Count total = 0;
  for (const auto &[w, c] : orders_[0])
    if (w != Vocabulary::kBos) total += c;
  return total;
}

void CountTable::Merge(const CountTable &other) {
  for (int n = 0; n < kMaxOrder; ++n)
    for (const auto &[key, c] : other.orders_[n]) orders_[n][key] += c;
}

CountTable CountNgrams(std::span<const TokenStream> sentences, const Vocabulary *vocab) {
  CountTable table;
  std::vector<std::string> syms;
  for (const TokenStream &sentence : sentences) {
    if (sentence.empty()) continue;
    syms.clear();
    syms.emplace_back(Vocabulary::kBos);
    for (const std::string &t : sentence) syms.push_back(vocab ? vocab->Map(t) : t);
    syms.emplace_back(Vocabulary::kEos);
    const std::span<const std::string> all(syms);
    for (std::size_t i = 0; i < syms.size(); ++i)
      for (std::size_t n = 1; n <= CountTable::kMaxOrder && i + n <= syms.size(); ++n)
        table.Add(all.subspan(i, n));
  }
  return table;
}

}  // namespace sdtr
