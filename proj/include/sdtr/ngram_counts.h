// ngram_counts.h
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
// Unigram, bigram and trigram counts.

#ifndef SDTR_NGRAM_COUNTS_H_
#define SDTR_NGRAM_COUNTS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sdtr/tokenizer.h"
#include "sdtr/vocabulary.h"

namespace sdtr {

using Count = std::uint64_t;

// Counts for orders 1..3. Keys are the n-gram's symbols joined by single
// spaces (tokens never contain whitespace), so iteration order is
// lexicographic and deterministic.
class CountTable {
 public:
  static constexpr int kMaxOrder = 3;

  void Add(std::span<const std::string> ngram, Count count = 1);
  Count Get(std::span<const std::string> ngram) const;
  // Order n in 1..3.
  const std::map<std::string, Count> &order(int n) const { return orders_.at(n - 1); }
  bool empty() const;
  // Sum of counts of order 1, excluding <s>.
  Count TotalTokens() const;
  // Commutative: merging shards in any order gives the same table.
  void Merge(const CountTable &other);

  bool operator==(const CountTable &) const = default;

 private:
  std::vector<std::map<std::string, Count>> orders_ =
      std::vector<std::map<std::string, Count>>(kMaxOrder);
};

// Counts every sentence padded as "<s> w1 ... wn </s>" (one start symbol).
// With a vocabulary, out-of-vocabulary tokens are counted as <unk>.
CountTable CountNgrams(std::span<const TokenStream> sentences,
                       const Vocabulary *vocab = nullptr);

// The K most frequent ordinary words (ties broken lexicographically); the
// reserved symbols are appended by Vocabulary itself. Throws
// InvalidArgument for k == 0.
Vocabulary SelectVocab(const CountTable &counts, std::size_t k);

}  // namespace sdtr

#endif  // SDTR_NGRAM_COUNTS_H_
