// score_oracle.h
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
// Direct evaluation of the ranking formula from raw document text, with no
// index, over small random collections of space-separated words.

#ifndef SDTR_TESTS_SCORE_ORACLE_H_
#define SDTR_TESTS_SCORE_ORACLE_H_

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "sdtr/corpus.h"
#include "sdtr/util.h"

namespace sdtr::testing {

struct RandomCollection {
  std::vector<Document> docs;
  std::vector<std::string> terms;  // the term types words are drawn from
};

// Up to max_docs documents over up to max_terms lowercase term types; titles
// and abstracts may be empty.
inline RandomCollection MakeRandomCollection(Rng &rng, std::size_t max_docs,
                                             std::size_t max_terms) {
  RandomCollection c;
  const std::size_t v = 1 + rng.Below(max_terms);
  for (std::size_t t = 0; t < v; ++t) c.terms.push_back("t" + std::to_string(t));
  auto text = [&](std::size_t max_len) {
    std::string s;
    for (std::size_t i = rng.Below(max_len + 1); i > 0; --i) {
      if (!s.empty()) s += ' ';
      // Skewed draw so that some terms are common.
      const std::size_t a = rng.Below(v), b = rng.Below(v);
      s += c.terms[std::min(a, b)];
    }
    return s;
  };
  const std::size_t n = 1 + rng.Below(max_docs);
  for (std::size_t i = 0; i < n; ++i) {
    Document d;
    d.id = "doc" + std::to_string(i);
    d.title = text(4);
    d.abstract = text(30);
    c.docs.push_back(std::move(d));
  }
  return c;
}

// Query terms from the collection's types, sometimes repeated, plus an
// occasional unseen term.
inline std::vector<std::string> RandomQuery(Rng &rng, const RandomCollection &c) {
  std::vector<std::string> q;
  for (std::size_t i = 1 + rng.Below(5); i > 0; --i) q.push_back(c.terms[rng.Below(c.terms.size())]);
  if (rng.Below(4) == 0) q.push_back("unseen");
  if (rng.Below(3) == 0) q.push_back(q.front());
  return q;
}

inline std::vector<std::string> Words(const Document &d) {
  std::vector<std::string> w = SplitWhitespace(d.title);
  for (std::string &x : SplitWhitespace(d.abstract)) w.push_back(std::move(x));
  return w;
}

// Sum over distinct query terms t of TF/(DL/avglen + TF) * ln(N/DF), where
// DL is the character count of title plus abstract.
inline double DirectScore(const std::vector<std::string> &query, std::size_t doc,
                          const std::vector<Document> &docs) {
  const double n = static_cast<double>(docs.size());
  double total_len = 0;
  for (const Document &d : docs) total_len += static_cast<double>(d.title.size() + d.abstract.size());
  const double avglen = total_len / n;
  const Document &target = docs[doc];
  const double dl = static_cast<double>(target.title.size() + target.abstract.size());
  const std::vector<std::string> words = Words(target);
  double score = 0;
  for (const std::string &t : std::set<std::string>(query.begin(), query.end())) {
    double tf = 0, df = 0;
    for (const std::string &w : words) tf += w == t;
    for (const Document &d : docs) {
      const std::vector<std::string> dw = Words(d);
      bool hit = false;
      for (const std::string &w : dw) hit |= w == t;
      df += hit;
    }
    if (tf == 0 || df == 0) continue;
    const double norm = avglen > 0 ? dl / avglen : 0.0;
    score += tf / (norm + tf) * std::log(n / df);
  }
  return score;
}

}  // namespace sdtr::testing

#endif  // SDTR_TESTS_SCORE_ORACLE_H_
