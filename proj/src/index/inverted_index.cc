// inverted_index.cc
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

#include "sdtr/inverted_index.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "sdtr/error.h"
#include "sdtr/util.h"

namespace sdtr {

namespace {

constexpr char kMagic[7] = {'S', 'D', 'T', 'R', 'I', 'D', 'X'};
constexpr std::uint8_t kVersion = 1;

void PutU64(std::ostream &out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

void PutU32(std::ostream &out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

void PutString(std::ostream &out, const std::string &s) {
  PutU32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class ByteReader {
 public:
  explicit ByteReader(std::istream &in) : in_(in) {}

  void Read(char *dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw ParseError("truncated index snapshot", offset_);
    offset_ += n;
  }
  std::uint64_t U64() {
    unsigned char b[8];
    Read(reinterpret_cast<char *>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  std::uint32_t U32() {
    unsigned char b[4];
    Read(reinterpret_cast<char *>(b), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  std::string String() {
    std::string s(U32(), '\0');
    Read(s.data(), s.size());
    return s;
  }
  std::size_t offset() const { return offset_; }

 private:
  std::istream &in_;
  std::size_t offset_ = 0;
};

}  // namespace

InvertedIndex InvertedIndex::Build(std::span<const Document> docs,
                                   const IndexOptions &options,
                                   const Tokenizer &tokenizer,
                                   const Stoplist &stoplist) {
  if (docs.empty())
    throw InvalidArgument("cannot index an empty collection (avglen undefined)");
  InvertedIndex index;
  index.length_unit_ = options.length_unit;
  std::map<std::string, std::vector<Posting>> postings;
  std::uint64_t total_len = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const Document &doc = docs[i];
    if (!index.doc_ordinals_.emplace(doc.id, static_cast<std::uint32_t>(i)).second)
      throw InvalidArgument("duplicate document id '" + doc.id + "'");
    index.doc_ids_.push_back(doc.id);
    std::map<std::string, std::uint32_t> tf;
    std::uint64_t chars = 0, tokens = 0;
    for (const std::string &text : SelectedFieldTexts(doc, options.fields)) {
      chars += CountCodePoints(text);
      const TokenStream stream = tokenizer.Tokenize(text);
      tokens += stream.size();
      for (const std::string &term : ExtractTerms(stream, stoplist)) ++tf[term];
    }
    const std::uint64_t len =
        options.length_unit == LengthUnit::kCharacters ? chars : tokens;
    index.doc_len_.push_back(len);
    total_len += len;
    for (const auto &[term, count] : tf)
      postings[term].push_back({static_cast<std::uint32_t>(i), count});
  }
  index.avglen_ = static_cast<double>(total_len) / static_cast<double>(docs.size());
  index.terms_.reserve(postings.size());
  index.postings_.reserve(postings.size());
  for (auto &[term, list] : postings) {
    index.term_ids_.emplace(term, static_cast<std::uint32_t>(index.terms_.size()));
    index.terms_.push_back(term);
    index.postings_.push_back(std::move(list));
  }
  return index;
}

std::optional<std::size_t> InvertedIndex::FindDoc(std::string_view id) const {
  auto it = doc_ordinals_.find(std::string(id));
  if (it == doc_ordinals_.end()) return std::nullopt;
  return it->second;
}

std::span<const Posting> InvertedIndex::postings(std::string_view term) const {
  auto it = term_ids_.find(std::string(term));
  if (it == term_ids_.end()) return {};
  return postings_[it->second];
}

std::uint32_t InvertedIndex::tf(std::string_view term, std::size_t doc) const {
  const std::span<const Posting> list = postings(term);
  auto it = std::lower_bound(
      list.begin(), list.end(), doc,
      [](const Posting &p, std::size_t d) { return p.doc < d; });
  return it != list.end() && it->doc == doc ? it->tf : 0;
}

bool InvertedIndex::operator==(const InvertedIndex &other) const {
  return terms_ == other.terms_ && postings_ == other.postings_ &&
         doc_ids_ == other.doc_ids_ && doc_len_ == other.doc_len_ &&
         avglen_ == other.avglen_ && length_unit_ == other.length_unit_;
}

void InvertedIndex::Save(std::ostream &out) const {
  out.write(kMagic, sizeof(kMagic));
  out.put(static_cast<char>(kVersion));
  out.put(static_cast<char>(length_unit_ == LengthUnit::kCharacters ? 0 : 1));
  PutU64(out, doc_ids_.size());
  for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
    PutString(out, doc_ids_[i]);
    PutU64(out, doc_len_[i]);
  }
  PutU64(out, terms_.size());
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    PutString(out, terms_[t]);
    PutU64(out, postings_[t].size());
    for (const Posting &p : postings_[t]) {
      PutU32(out, p.doc);
      PutU32(out, p.tf);
    }
  }
  if (!out) throw Error("failed to write index snapshot");
}

InvertedIndex InvertedIndex::Load(std::istream &in) {
  ByteReader r(in);
  char magic[sizeof(kMagic)];
  r.Read(magic, sizeof(magic));
  if (!std::equal(magic, magic + sizeof(magic), kMagic))
    throw ParseError("not an sdtr index snapshot (bad magic)", 0);
  char header[2];
  r.Read(header, 2);
  if (static_cast<std::uint8_t>(header[0]) != kVersion)
    throw ParseError("unsupported index snapshot version " +
                         std::to_string(static_cast<std::uint8_t>(header[0])),
                     sizeof(kMagic));
  InvertedIndex index;
  index.length_unit_ = header[1] == 0 ? LengthUnit::kCharacters : LengthUnit::kTokens;
  const std::uint64_t n = r.U64();
  if (n == 0) throw ParseError("index snapshot has no documents", r.offset());
  std::uint64_t total = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string id = r.String();
    if (!index.doc_ordinals_.emplace(id, static_cast<std::uint32_t>(i)).second)
      throw ParseError("duplicate document id '" + id + "' in snapshot", r.offset());
    index.doc_ids_.push_back(std::move(id));
    index.doc_len_.push_back(r.U64());
    total += index.doc_len_.back();
  }
  index.avglen_ = static_cast<double>(total) / static_cast<double>(n);
  const std::uint64_t num_terms = r.U64();
  for (std::uint64_t t = 0; t < num_terms; ++t) {
    std::string term = r.String();
    if (!index.terms_.empty() && term <= index.terms_.back())
      throw ParseError("terms not sorted in snapshot", r.offset());
    const std::uint64_t count = r.U64();
    std::vector<Posting> list;
    list.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
      Posting p{r.U32(), r.U32()};
      if (p.doc >= n || p.tf == 0 || (!list.empty() && p.doc <= list.back().doc))
        throw ParseError("corrupt posting list for '" + term + "'", r.offset());
      list.push_back(p);
    }
    index.term_ids_.emplace(term, static_cast<std::uint32_t>(t));
    index.terms_.push_back(std::move(term));
    index.postings_.push_back(std::move(list));
  }
  return index;
}

double TermScore(double tf, double doc_length, double avglen, double num_docs,
                 double df) {
  if (tf <= 0 || df <= 0) return 0.0;
  const double norm = avglen > 0 ? doc_length / avglen : 0.0;
  return tf / (norm + tf) * std::log(num_docs / df);
}

namespace {

// Distinct query terms in sorted order with their query frequency.
std::map<std::string, int> QueryWeights(std::span<const std::string> terms,
                                        const ScoreOptions &options) {
  std::map<std::string, int> weights;
  for (const std::string &t : terms) {
    int &w = weights[t];
    w = options.distinct_terms ? 1 : w + 1;
  }
  return weights;
}

}  // namespace

double ScoreDocument(std::span<const std::string> query_terms, std::size_t doc,
                     const InvertedIndex &index, const ScoreOptions &options) {
  if (doc >= index.num_docs())
    throw InvalidArgument("unknown document ordinal " + std::to_string(doc));
  const double n = static_cast<double>(index.num_docs());
  const double dl = static_cast<double>(index.doc_length(doc));
  double score = 0.0;
  for (const auto &[term, weight] : QueryWeights(query_terms, options)) {
    const std::uint32_t tf = index.tf(term, doc);
    if (tf == 0) continue;
    score += weight * TermScore(tf, dl, index.avglen(), n,
                                static_cast<double>(index.df(term)));
  }
  return score;
}

RankedList Retrieve(std::span<const std::string> query_terms,
                    const InvertedIndex &index, std::size_t cutoff,
                    const ScoreOptions &options) {
  RankedList ranked;
  const double n = static_cast<double>(index.num_docs());
  std::vector<double> acc(index.num_docs(), 0.0);
  std::vector<std::uint32_t> touched;
  // Term-at-a-time in the same term order as ScoreDocument, so both give
  // bit-identical scores.
  for (const auto &[term, weight] : QueryWeights(query_terms, options)) {
    const std::span<const Posting> list = index.postings(term);
    const double df = static_cast<double>(list.size());
    for (const Posting &p : list) {
      if (acc[p.doc] == 0.0) touched.push_back(p.doc);
      acc[p.doc] += weight * TermScore(p.tf, static_cast<double>(index.doc_length(p.doc)),
                                       index.avglen(), n, df);
    }
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (std::uint32_t d : touched)
    if (acc[d] > 0.0) ranked.entries.push_back({index.doc_id(d), acc[d]});
  auto better = [](const RankedEntry &a, const RankedEntry &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  };
  if (ranked.entries.size() > cutoff) {
    std::partial_sort(ranked.entries.begin(),
                      ranked.entries.begin() + static_cast<std::ptrdiff_t>(cutoff),
                      ranked.entries.end(), better);
    ranked.entries.resize(cutoff);
  } else {
    std::sort(ranked.entries.begin(), ranked.entries.end(), better);
  }
  return ranked;
}

std::string FormatRun(std::span<const RankedList> lists, std::string_view tag) {
  std::string out;
  for (const RankedList &list : lists) {
    for (std::size_t r = 0; r < list.entries.size(); ++r) {
      const RankedEntry &e = list.entries[r];
      out += list.topic_id;
      out += " Q0 ";
      out += e.doc_id;
      out += ' ';
      out += std::to_string(r + 1);
      out += ' ';
      out += FormatDouble(e.score);
      out += ' ';
      out += tag;
      out += '\n';
    }
  }
  return out;
}

std::vector<RankedList> ParseRun(std::string_view input) {
  std::vector<RankedList> lists;
  std::map<std::string, std::size_t> by_topic;
  std::size_t start = 0, line_no = 0;
  while (start < input.size()) {
    std::size_t end = input.find('\n', start);
    if (end == std::string_view::npos) end = input.size();
    const std::string_view line = input.substr(start, end - start);
    const std::size_t offset = start;
    start = end + 1;
    ++line_no;
    if (Trim(line).empty() || Trim(line).front() == '#') continue;
    const std::vector<std::string> f = SplitWhitespace(line);
    if (f.size() < 5)
      throw ParseError("expected 'topic Q0 doc rank score [tag]'", offset,
                       ParseError::kNoIndex, line_no);
    double score;
    try {
      score = ParseDouble(f[4]);
    } catch (const InvalidArgument &) {
      throw ParseError("bad score '" + f[4] + "'", offset, ParseError::kNoIndex, line_no);
    }
    auto [it, inserted] = by_topic.emplace(f[0], lists.size());
    if (inserted) lists.push_back(RankedList{f[0], {}});
    lists[it->second].entries.push_back({f[2], score});
  }
  // Run files are ordered by rank already, but trec_eval re-sorts by score.
  for (RankedList &l : lists)
    std::stable_sort(l.entries.begin(), l.entries.end(),
                     [](const RankedEntry &a, const RankedEntry &b) {
                       if (a.score != b.score) return a.score > b.score;
                       return a.doc_id < b.doc_id;
                     });
  return lists;
}

}  // namespace sdtr
