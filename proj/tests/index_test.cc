// index_test.cc
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
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "score_oracle.h"
#include "sdtr/error.h"
#include "sdtr/util.h"

namespace sdtr {
namespace {

using Words = std::vector<std::string>;

Document Doc(const std::string &id, const std::string &title, const std::string &abstract = "") {
  Document d;
  d.id = id;
  d.title = title;
  d.abstract = abstract;
  return d;
}

InvertedIndex Build(const std::vector<Document> &docs, const Stoplist &stop = {},
                    LengthUnit unit = LengthUnit::kCharacters) {
  IndexOptions options;
  options.length_unit = unit;
  return InvertedIndex::Build(docs, options, DefaultTokenizer(), stop);
}

TEST(BuildIndexTest, CountsByHand) {
  const InvertedIndex idx = Build({Doc("doc1", "a b a"), Doc("doc2", "b")});
  EXPECT_EQ(idx.num_docs(), 2u);
  EXPECT_EQ(idx.df("a"), 1u);
  EXPECT_EQ(idx.df("b"), 2u);
  EXPECT_EQ(idx.tf("a", 0), 2u);
  EXPECT_EQ(idx.tf("a", 1), 0u);
  EXPECT_EQ(idx.terms(), (Words{"a", "b"}));
  EXPECT_EQ(idx.doc_length(0), 5u);
  EXPECT_EQ(idx.doc_length(1), 1u);
  EXPECT_EQ(idx.avglen(), 3.0);
  EXPECT_EQ(idx.postings("b")[1], (Posting{1, 1}));
  EXPECT_TRUE(idx.postings("zzz").empty());
}

TEST(BuildIndexTest, EmptyFieldsAndSingleDoc) {
  const InvertedIndex idx = Build({Doc("x", ""), Doc("y", "w")});
  EXPECT_EQ(idx.num_docs(), 2u);
  EXPECT_EQ(idx.doc_length(0), 0u);
  EXPECT_EQ(idx.avglen(), 0.5);
  const InvertedIndex one = Build({Doc("only", "hello", "world wide")});
  EXPECT_EQ(one.avglen(), static_cast<double>(one.doc_length(0)));
  // Characters of the raw selected fields, concatenated.
  EXPECT_EQ(one.doc_length(0), 15u);
  EXPECT_EQ(Build({Doc("only", "hello", "world wide")}, {}, LengthUnit::kTokens).doc_length(0),
            3u);
}

TEST(BuildIndexTest, CharacterLengthCountsCodePoints) {
  EXPECT_EQ(Build({Doc("d", "caf\xc3\xa9")}).doc_length(0), 4u);
}

TEST(BuildIndexTest, StoplistedTermsHaveNoPostings) {
  const InvertedIndex idx = Build({Doc("d", "the cat")}, Stoplist{"the"});
  EXPECT_EQ(idx.df("the"), 0u);
  EXPECT_EQ(idx.df("cat"), 1u);
  EXPECT_EQ(idx.doc_length(0), 7u);
}

TEST(BuildIndexTest, Errors) {
  EXPECT_THROW(Build({}), InvalidArgument);
  EXPECT_THROW(Build({Doc("d", "a"), Doc("d", "b")}), InvalidArgument);
}

TEST(BuildIndexTest, FieldSelection) {
  Document d = Doc("d", "alpha", "beta");
  d.keywords = {"gamma"};
  d.extra["AUTHORS"] = "delta";
  IndexOptions options;
  options.fields = ParseFieldSelection("abstract,AUTHORS");
  const InvertedIndex idx = InvertedIndex::Build(std::vector<Document>{d}, options,
                                                 DefaultTokenizer(), Stoplist{});
  EXPECT_EQ(idx.terms(), (Words{"beta", "delta"}));
  EXPECT_EQ(idx.doc_length(0), 9u);
}

TEST(TermScoreTest, GoldenValue) {
  EXPECT_NEAR(TermScore(3, 100, 100, 1000, 10), 3.453877639491069, 1e-12);
  EXPECT_EQ(TermScore(0, 100, 100, 1000, 10), 0.0);
  EXPECT_EQ(TermScore(3, 100, 100, 1000, 0), 0.0);
  EXPECT_EQ(TermScore(3, 100, 100, 1000, 1000), 0.0);
}

TEST(TermScoreTest, MonotoneInTfAndDf) {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const double n = 2 + static_cast<double>(rng.Below(1000));
    const double df = 1 + static_cast<double>(rng.Below(static_cast<std::size_t>(n) - 1));
    const double tf = 1 + static_cast<double>(rng.Below(20));
    // A document containing a term has positive length.
    const double dl = 1 + static_cast<double>(rng.Below(500));
    const double avg = 1 + rng.Uniform() * 300;
    EXPECT_GT(TermScore(tf + 1, dl, avg, n, df), TermScore(tf, dl, avg, n, df));
    if (df + 1 <= n) {
      EXPECT_LT(TermScore(tf, dl, avg, n, df + 1), TermScore(tf, dl, avg, n, df));
    }
  }
}

TEST(TermScoreTest, ScalingLengthsLeavesScoreUnchanged) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double dl = static_cast<double>(rng.Below(400));
    const double avg = 1 + rng.Uniform() * 200;
    const double c = 0.1 + rng.Uniform() * 10;
    EXPECT_NEAR(TermScore(2, dl * c, avg * c, 50, 3), TermScore(2, dl, avg, 50, 3), 1e-12);
  }
}

TEST(ScoreDocumentTest, MatchesDirectFormula) {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const testing::RandomCollection c = testing::MakeRandomCollection(rng, 20, 50);
    const InvertedIndex idx = Build(c.docs);
    for (int q = 0; q < 5; ++q) {
      const Words query = testing::RandomQuery(rng, c);
      for (std::size_t i = 0; i < c.docs.size(); ++i)
        EXPECT_NEAR(ScoreDocument(query, i, idx), testing::DirectScore(query, i, c.docs), 1e-9);
    }
  }
}

TEST(ScoreDocumentTest, EdgeCases) {
  const InvertedIndex idx = Build({Doc("d1", "a b"), Doc("d2", "b c")});
  EXPECT_EQ(ScoreDocument(Words{"zzz"}, 0, idx), 0.0);
  EXPECT_EQ(ScoreDocument(Words{"b"}, 0, idx), 0.0);  // df == N
  EXPECT_EQ(ScoreDocument(Words{}, 0, idx), 0.0);
  EXPECT_THROW(ScoreDocument(Words{"a"}, 2, idx), InvalidArgument);
}

TEST(ScoreDocumentTest, RepeatedQueryTerms) {
  const InvertedIndex idx = Build({Doc("d1", "a b"), Doc("d2", "b c")});
  const double once = ScoreDocument(Words{"a"}, 0, idx);
  EXPECT_GT(once, 0.0);
  EXPECT_EQ(ScoreDocument(Words{"a", "a"}, 0, idx), once);
  ScoreOptions counted;
  counted.distinct_terms = false;
  EXPECT_NEAR(ScoreDocument(Words{"a", "a"}, 0, idx, counted), 2 * once, 1e-12);
}

TEST(RetrieveTest, Examples) {
  const InvertedIndex idx = Build({Doc("d1", "apple pie"), Doc("d2", "banana"),
                                   Doc("d3", "apple apple tart long text here")},
                                  Stoplist{"the"});
  EXPECT_EQ(Retrieve(Words{"pie"}, idx).entries.size(), 1u);
  EXPECT_TRUE(Retrieve(Words{}, idx).entries.empty());
  EXPECT_TRUE(Retrieve(Words{"the"}, idx).entries.empty());

  const RankedList r = Retrieve(Words{"apple", "pie"}, idx);
  ASSERT_EQ(r.entries.size(), 2u);
  EXPECT_EQ(r.entries[0].doc_id, "d1");
  EXPECT_EQ(r.entries[1].doc_id, "d3");
  EXPECT_GT(r.entries[0].score, r.entries[1].score);
  EXPECT_EQ(r.entries[0].score, ScoreDocument(Words{"apple", "pie"}, 0, idx));
}

TEST(RetrieveTest, TiesByDocIdAndCutoff) {
  const InvertedIndex idx =
      Build({Doc("c", "x"), Doc("a", "x"), Doc("b", "x"), Doc("z", "y")});
  const RankedList r = Retrieve(Words{"x"}, idx);
  ASSERT_EQ(r.entries.size(), 3u);
  EXPECT_EQ(r.entries[0].doc_id, "a");
  EXPECT_EQ(r.entries[1].doc_id, "b");
  EXPECT_EQ(r.entries[2].doc_id, "c");
  EXPECT_EQ(Retrieve(Words{"x"}, idx, 2).entries.size(), 2u);
}

TEST(RetrieveTest, PrefixOfFullSortAndShuffleInvariant) {
  Rng rng(123);
  for (int trial = 0; trial < 60; ++trial) {
    testing::RandomCollection c = testing::MakeRandomCollection(rng, 20, 50);
    const InvertedIndex idx = Build(c.docs);
    const Words query = testing::RandomQuery(rng, c);

    std::vector<RankedEntry> full;
    for (std::size_t i = 0; i < c.docs.size(); ++i) {
      const double s = testing::DirectScore(query, i, c.docs);
      if (s > 0) full.push_back({c.docs[i].id, s});
    }
    std::sort(full.begin(), full.end(), [](const RankedEntry &a, const RankedEntry &b) {
      if (a.score != b.score) return a.score > b.score;
      return a.doc_id < b.doc_id;
    });
    const std::size_t cutoff = 1 + rng.Below(c.docs.size() + 1);
    const RankedList r = Retrieve(query, idx, cutoff);
    ASSERT_EQ(r.entries.size(), std::min(cutoff, full.size()));
    for (std::size_t k = 0; k < r.entries.size(); ++k) {
      EXPECT_NEAR(r.entries[k].score, full[k].score, 1e-9);
      if (k > 0) {
        EXPECT_GE(r.entries[k - 1].score, r.entries[k].score);
      }
    }

    std::vector<Document> shuffled = c.docs;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.Below(i)]);
    EXPECT_EQ(Retrieve(query, Build(shuffled), cutoff), r);
  }
}

TEST(IndexSnapshotTest, RoundTrip) {
  Rng rng(7);
  const testing::RandomCollection c = testing::MakeRandomCollection(rng, 15, 30);
  const InvertedIndex idx = Build(c.docs);
  std::stringstream buf;
  idx.Save(buf);
  const std::string bytes = buf.str();
  std::istringstream in(bytes);
  const InvertedIndex back = InvertedIndex::Load(in);
  EXPECT_TRUE(back == idx);
  std::stringstream again;
  back.Save(again);
  EXPECT_EQ(again.str(), bytes);
}

TEST(IndexSnapshotTest, RejectsBadInput) {
  std::istringstream bad("not an index");
  EXPECT_THROW(InvertedIndex::Load(bad), ParseError);
  std::stringstream buf;
  Build({Doc("d", "a b")}).Save(buf);
  std::istringstream truncated(buf.str().substr(0, buf.str().size() - 3));
  EXPECT_THROW(InvertedIndex::Load(truncated), ParseError);
}

TEST(RunFileTest, FormatAndParse) {
  RankedList a{"t1", {{"d1", 2.5}, {"d2", 1.0}}};
  RankedList b{"t2", {}};
  RankedList c{"t3", {{"d9", 0.125}}};
  const std::string text = FormatRun(std::vector<RankedList>{a, b, c}, "tag");
  EXPECT_EQ(text, "t1 Q0 d1 1 2.5 tag\nt1 Q0 d2 2 1 tag\nt3 Q0 d9 1 0.125 tag\n");
  const std::vector<RankedList> back = ParseRun(text);
  EXPECT_EQ(back, (std::vector<RankedList>{a, c}));
  EXPECT_THROW(ParseRun("t1 Q0 d1\n"), ParseError);
  EXPECT_THROW(ParseRun("t1 Q0 d1 1 x tag\n"), ParseError);
}

}  // namespace
}  // namespace sdtr
