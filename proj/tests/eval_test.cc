// eval_test.cc
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

#include "sdtr/eval.h"

#include <algorithm>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sdtr/error.h"
#include "sdtr/util.h"

namespace sdtr {
namespace {

using Words = std::vector<std::string>;

RankedList Ranking(const Words &ids) {
  RankedList r;
  r.topic_id = "t";
  double score = static_cast<double>(ids.size());
  for (const auto &id : ids) r.entries.push_back({id, score--});
  return r;
}

// Plain recursive edit distance.
std::size_t NaiveDistance(const Words &a, std::size_t i, const Words &b, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  return std::min({NaiveDistance(a, i + 1, b, j + 1) + (a[i] == b[j] ? 0 : 1),
                   NaiveDistance(a, i + 1, b, j) + 1, NaiveDistance(a, i, b, j + 1) + 1});
}

Words RandomWords(Rng &rng, std::size_t max_len, std::size_t alphabet) {
  Words w;
  for (std::size_t i = 0, n = rng.Below(max_len + 1); i < n; ++i)
    w.push_back(std::string(1, static_cast<char>('a' + rng.Below(alphabet))));
  return w;
}

TEST(AlignTest, IdenticalSequencesMatch) {
  const Alignment a = Align(Words{"a", "b", "c"}, Words{"a", "b", "c"});
  EXPECT_EQ(a.matches, 3u);
  EXPECT_EQ(a.cost(), 0u);
}

TEST(AlignTest, OneSubstitution) {
  const Alignment a = Align(Words{"a", "b", "c"}, Words{"a", "x", "c"});
  EXPECT_EQ(a.substitutions, 1u);
  EXPECT_EQ(a.cost(), 1u);
  EXPECT_EQ(a.steps[1], (AlignmentStep{EditOp::kSubstitution, 1, 1}));
}

TEST(AlignTest, OneDeletion) {
  const Alignment a = Align(Words{"a"}, Words{});
  EXPECT_EQ(a.deletions, 1u);
  ASSERT_EQ(a.steps.size(), 1u);
  EXPECT_EQ(a.steps[0], (AlignmentStep{EditOp::kDeletion, 0, AlignmentStep::kNone}));
}

TEST(AlignTest, TieBreakingIsFixed) {
  // Substitution is preferred over a deletion/insertion pair of equal cost,
  // and deletion over insertion.
  const Alignment swap = Align(Words{"a", "b"}, Words{"b", "a"});
  EXPECT_EQ(swap.substitutions, 2u);
  const Alignment shrink = Align(Words{"a", "b"}, Words{"c"});
  ASSERT_EQ(shrink.steps.size(), 2u);
  EXPECT_EQ(shrink.steps[0], (AlignmentStep{EditOp::kDeletion, 0, AlignmentStep::kNone}));
  EXPECT_EQ(shrink.steps[1], (AlignmentStep{EditOp::kSubstitution, 1, 0}));
}

TEST(AlignTest, MatchesRecursiveOracleAndCountInvariants) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const Words ref = RandomWords(rng, 6, 3), hyp = RandomWords(rng, 6, 3);
    const Alignment a = Align(ref, hyp);
    EXPECT_EQ(a.cost(), NaiveDistance(ref, 0, hyp, 0));
    EXPECT_EQ(a.matches + a.substitutions + a.deletions, ref.size());
    EXPECT_EQ(a.matches + a.substitutions + a.insertions, hyp.size());
    // Steps walk both sequences in order and agree with the labels.
    std::size_t i = 0, j = 0;
    for (const AlignmentStep &s : a.steps) {
      if (s.op != EditOp::kInsertion) {
        EXPECT_EQ(s.ref, i++);
      }
      if (s.op != EditOp::kDeletion) {
        EXPECT_EQ(s.hyp, j++);
      }
      if (s.op == EditOp::kMatch) {
        EXPECT_EQ(ref[s.ref], hyp[s.hyp]);
      }
      if (s.op == EditOp::kSubstitution) {
        EXPECT_NE(ref[s.ref], hyp[s.hyp]);
      }
    }
    EXPECT_EQ(i, ref.size());
    EXPECT_EQ(j, hyp.size());
  }
}

TEST(WerTest, GoldenValues) {
  EXPECT_EQ(Wer(Words{"w1", "w2", "w3"}, Words{"w1", "w2", "w3"}), 0.0);
  EXPECT_EQ(Wer(Words{"w1", "w2", "w3"}, Words{"w1", "w4", "w3"}), 1.0 / 3.0);
  EXPECT_EQ(Wer(Words{"a"}, Words{"b", "c"}), 2.0);
}

TEST(WerTest, EmptyReferenceIsAnError) {
  EXPECT_THROW(Wer(Words{}, Words{"a"}), InvalidArgument);
}

TEST(WerTest, SelfAndEmptyHypothesis) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Words x = RandomWords(rng, 8, 5);
    if (x.empty()) x.push_back("z");
    EXPECT_EQ(Wer(x, x), 0.0);
    EXPECT_EQ(Wer(x, Words{}), 1.0);
  }
}

TEST(TerTest, FunctionWordErrorsDoNotCount) {
  const Stoplist stop{"i", "want", "about", "the", "a"};
  const Words ref{"i", "want", "papers", "about", "tv", "conferencing"};
  const Words hyp{"a", "want", "papers", "the", "tv", "conferencing"};
  EXPECT_GT(Wer(ref, hyp), 0.0);
  EXPECT_EQ(Ter(ref, hyp, stop), 0.0);
  EXPECT_EQ(Ter(ref, ref, stop), 0.0);
}

TEST(TerTest, OneTermWrongAmongFour) {
  const Stoplist stop{"of", "for"};
  const Words ref{"support", "of", "distance", "education", "for", "systems"};
  const Words hyp{"support", "of", "distant", "education", "for", "systems"};
  EXPECT_EQ(Ter(ref, hyp, stop), 0.25);
}

TEST(TerTest, ReferenceWithoutTermsIsAnError) {
  EXPECT_THROW(Ter(Words{"the"}, Words{"x"}, Stoplist{"the"}), InvalidArgument);
}

TEST(CollapseGradesTest, KeepsRelevantAndHighlyRelevant) {
  const std::vector<Judgment> js{{"q", "d1", Grade::kHighlyRelevant},
                                 {"q", "d2", Grade::kPartiallyRelevant},
                                 {"q", "d3", Grade::kIrrelevant},
                                 {"r", "d4", Grade::kRelevant},
                                 {"r", "d5", Grade::kHighlyRelevant}};
  const RelevantSets sets = CollapseGrades(js);
  EXPECT_EQ(sets.at("q"), (std::set<std::string>{"d1"}));
  EXPECT_EQ(sets.at("r"), (std::set<std::string>{"d4", "d5"}));
  EXPECT_EQ(sets.count("s"), 0u);
  EXPECT_TRUE(CollapseGrades({}).empty());
}

TEST(AveragePrecisionTest, GoldenValues) {
  EXPECT_NEAR(*AveragePrecision(Ranking({"d1", "d2", "d3"}), {"d1", "d3"}), 5.0 / 6.0, 1e-12);
  EXPECT_EQ(*AveragePrecision(Ranking({"d1", "d3", "d2"}), {"d1", "d3"}), 1.0);
  EXPECT_EQ(*AveragePrecision(Ranking({"d2", "d4"}), {"d1", "d3"}), 0.0);
  EXPECT_EQ(*AveragePrecision(Ranking({}), {"d1"}), 0.0);
  EXPECT_FALSE(AveragePrecision(Ranking({"d1"}), {}).has_value());
}

TEST(AveragePrecisionTest, UnretrievedRelevantDocumentsCount) {
  EXPECT_EQ(*AveragePrecision(Ranking({"d1"}), {"d1", "d9"}), 0.5);
}

TEST(AveragePrecisionTest, InvariantToRelabelingIrrelevantTail) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Words ids;
    std::set<std::string> relevant;
    for (int i = 0; i < 20; ++i) {
      ids.push_back("d" + std::to_string(i));
      if (rng.Below(3) == 0) relevant.insert(ids.back());
    }
    if (relevant.empty()) relevant.insert("d0");
    std::size_t last = 0;
    for (std::size_t k = 0; k < ids.size(); ++k)
      if (relevant.count(ids[k])) last = k;
    Words relabeled = ids;
    for (std::size_t k = last + 1; k < ids.size(); ++k) relabeled[k] = "x" + std::to_string(k);
    EXPECT_EQ(*AveragePrecision(Ranking(ids), relevant),
              *AveragePrecision(Ranking(relabeled), relevant));
  }
}

TEST(RpCurveTest, GoldenValues) {
  const RpCurve perfect = *InterpolatedRpCurve(Ranking({"d1", "d2"}), {"d1", "d2"});
  for (double p : perfect) EXPECT_EQ(p, 1.0);
  const RpCurve none = *InterpolatedRpCurve(Ranking({"d5", "d6"}), {"d1", "d2"});
  for (double p : none) EXPECT_EQ(p, 0.0);
  const RpCurve mixed = *InterpolatedRpCurve(Ranking({"d1", "d2", "d3"}), {"d1", "d3"});
  for (std::size_t i = 0; i < kRecallLevels; ++i)
    EXPECT_DOUBLE_EQ(mixed[i], i <= 5 ? 1.0 : 2.0 / 3.0) << "level " << i;
  EXPECT_FALSE(InterpolatedRpCurve(Ranking({"d1"}), {}).has_value());
}

TEST(RpCurveTest, NonIncreasingInRecall) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    Words ids;
    std::set<std::string> relevant;
    for (std::size_t i = 0, n = rng.Below(30); i < n; ++i) ids.push_back("d" + std::to_string(i));
    for (int i = 0; i < 40; ++i)
      if (rng.Below(4) == 0) relevant.insert("d" + std::to_string(i));
    if (relevant.empty()) relevant.insert("d1");
    const RpCurve c = *InterpolatedRpCurve(Ranking(ids), relevant);
    for (std::size_t i = 1; i < kRecallLevels; ++i) EXPECT_LE(c[i], c[i - 1]);
  }
}

TEST(RpCurveTest, RawPoints) {
  const auto pts = RawRpPoints(Ranking({"d1", "d2", "d3"}), {"d1", "d3"});
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].recall, 0.5);
  EXPECT_EQ(pts[0].precision, 1.0);
  EXPECT_EQ(pts[1].recall, 1.0);
  EXPECT_DOUBLE_EQ(pts[1].precision, 2.0 / 3.0);
}

TEST(EvaluateTest, MeansOverDefinedTopicsOnly) {
  RelevantSets qrels{{"t1", {"d1", "d3"}}, {"t2", {"d2"}}, {"t3", {}}};
  std::vector<TopicEvalInput> in(4);
  in[0] = {"t1", Ranking({"d1", "d2", "d3"}), Words{"a", "b", "c"}, Words{"a", "x", "c"}};
  in[1] = {"t2", Ranking({"d1", "d2"}), Words{"a"}, Words{"b", "c"}};
  in[2] = {"t3", Ranking({"d1"}), Words{"the"}, Words{"the"}};
  in[3] = {"t4", Ranking({}), std::nullopt, std::nullopt};
  const EvalReport r = Evaluate("m", in, &qrels, Stoplist{"the"});
  ASSERT_EQ(r.topics.size(), 4u);
  EXPECT_EQ(r.ap_topics, 2u);
  EXPECT_NEAR(*r.mean_ap, (5.0 / 6.0 + 0.5) / 2.0, 1e-12);
  EXPECT_EQ(r.undefined_ap_topics, (Words{"t3", "t4"}));
  EXPECT_NEAR(*r.mean_wer, (1.0 / 3.0 + 2.0 + 0.0) / 3.0, 1e-12);
  EXPECT_NEAR(*r.mean_ter, (1.0 / 3.0 + 2.0) / 2.0, 1e-12);
  EXPECT_EQ(r.undefined_ter_topics, (Words{"t3"}));
  EXPECT_FALSE(r.topics[3].wer.has_value());
  ASSERT_TRUE(r.mean_rp.has_value());
  for (std::size_t i = 0; i < kRecallLevels; ++i) {
    const double expected = ((*r.topics[0].rp)[i] + (*r.topics[1].rp)[i]) / 2.0;
    EXPECT_DOUBLE_EQ((*r.mean_rp)[i], expected);
  }
}

TEST(EvaluateTest, WithoutJudgmentsOmitsAp) {
  std::vector<TopicEvalInput> in{{"t1", Ranking({"d1"}), Words{"a"}, Words{"a"}}};
  const EvalReport r = Evaluate("m", in, nullptr, Stoplist{});
  EXPECT_FALSE(r.mean_ap.has_value());
  EXPECT_EQ(*r.mean_wer, 0.0);
  const std::string table = FormatSummaryTable(std::span(&r, 1));
  EXPECT_NE(table.find("AP omitted"), std::string::npos);
}

TEST(EvaluateTest, ReportFormats) {
  RelevantSets qrels{{"t1", {"d1"}}};
  std::vector<TopicEvalInput> in{{"t1", Ranking({"d1"}), Words{"a", "b"}, Words{"a"}}};
  const std::vector<EvalReport> reports{Evaluate("Text", in, &qrels, Stoplist{})};
  EXPECT_EQ(FormatReportTsv(reports),
            "method\ttopic\tap\twer\tter\n"
            "Text\tt1\t1.000000\t0.500000\t0.500000\n"
            "Text\tmean\t1.000000\t0.500000\t0.500000\n");
  EXPECT_EQ(FormatSummaryTable(reports),
            "Method  AP      WER     TER\n"
            "Text    1.0000  0.5000  0.5000\n");
  const std::string rp = FormatRpTsv(reports);
  EXPECT_EQ(std::count(rp.begin(), rp.end(), '\n'), 12);
  EXPECT_NE(rp.find("Text\t1.0\t1.000000\n"), std::string::npos);
}

}  // namespace
}  // namespace sdtr
