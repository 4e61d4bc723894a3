// inverted_index.h
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
// Word-based inverted index and probabilistic ranking.
//
// The relevance of document i to a query is
//
//   sum_t  TF(t,i) / (DL(i)/avglen + TF(t,i)) * ln(N / DF(t))
//
// over the distinct query terms t that occur in i. DL is the character
// length of the indexed fields (or their token count, if configured).

#ifndef SDTR_INVERTED_INDEX_H_
#define SDTR_INVERTED_INDEX_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sdtr/corpus.h"
#include "sdtr/tokenizer.h"

namespace sdtr {

enum class LengthUnit { kCharacters, kTokens };

struct IndexOptions {
  FieldSelection fields;
  LengthUnit length_unit = LengthUnit::kCharacters;
};

struct Posting {
  std::uint32_t doc;  // ordinal
  std::uint32_t tf;

  bool operator==(const Posting &) const = default;
};

class InvertedIndex {
 public:
  // Throws InvalidArgument for an empty collection or duplicate ids.
  static InvertedIndex Build(std::span<const Document> docs,
                             const IndexOptions &options,
                             const Tokenizer &tokenizer,
                             const Stoplist &stoplist);

  std::size_t num_docs() const { return doc_ids_.size(); }
  double avglen() const { return avglen_; }
  std::uint64_t doc_length(std::size_t doc) const { return doc_len_.at(doc); }
  const std::string &doc_id(std::size_t doc) const { return doc_ids_.at(doc); }
  std::optional<std::size_t> FindDoc(std::string_view id) const;
  LengthUnit length_unit() const { return length_unit_; }

  // Sorted, distinct.
  const std::vector<std::string> &terms() const { return terms_; }
  // Empty span for unknown terms. Sorted by document ordinal.
  std::span<const Posting> postings(std::string_view term) const;
  std::size_t df(std::string_view term) const { return postings(term).size(); }
  std::uint32_t tf(std::string_view term, std::size_t doc) const;

  // Binary snapshot; see docs/formats.md.
  void Save(std::ostream &out) const;
  static InvertedIndex Load(std::istream &in);

  bool operator==(const InvertedIndex &other) const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::uint32_t> term_ids_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<std::string> doc_ids_;
  std::unordered_map<std::string, std::uint32_t> doc_ordinals_;
  std::vector<std::uint64_t> doc_len_;
  double avglen_ = 0;
  LengthUnit length_unit_ = LengthUnit::kCharacters;
};

struct RankedEntry {
  std::string doc_id;
  double score;

  bool operator==(const RankedEntry &) const = default;
};

// Descending score; ties by ascending doc id.
struct RankedList {
  std::string topic_id;
  std::vector<RankedEntry> entries;

  bool operator==(const RankedList &) const = default;
};

struct ScoreOptions {
  // When false, a term repeated in the query contributes once per occurrence.
  bool distinct_terms = true;
};

// One term's contribution; 0 when tf or df is 0.
double TermScore(double tf, double doc_length, double avglen, double num_docs,
                 double df);

// Throws InvalidArgument for an unknown ordinal.
double ScoreDocument(std::span<const std::string> query_terms, std::size_t doc,
                     const InvertedIndex &index, const ScoreOptions &options = {});

// Documents with positive score, best first, at most `cutoff` of them.
RankedList Retrieve(std::span<const std::string> query_terms,
                    const InvertedIndex &index, std::size_t cutoff = 1000,
                    const ScoreOptions &options = {});

// TREC run files: `topic_id Q0 doc_id rank score tag`, rank starting at 1.
std::string FormatRun(std::span<const RankedList> lists, std::string_view tag);
std::vector<RankedList> ParseRun(std::string_view input);

}  // namespace sdtr

#endif  // SDTR_INVERTED_INDEX_H_
