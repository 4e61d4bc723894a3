// eval.cc
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
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "sdtr/error.h"

namespace sdtr {

namespace {

std::string Fixed(std::optional<double> v, int digits) {
  if (!v) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, *v);
  return buf;
}

template <typename T>
std::optional<double> Mean(const std::vector<T> &xs) {
  if (xs.empty()) return std::nullopt;
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

// Relevant-hit flags per rank; repeated documents count once.
std::vector<bool> Hits(const RankedList &ranked, const std::set<std::string> &relevant) {
  std::vector<bool> hits;
  hits.reserve(ranked.entries.size());
  std::unordered_set<std::string> seen;
  for (const RankedEntry &e : ranked.entries)
    hits.push_back(seen.insert(e.doc_id).second && relevant.count(e.doc_id) > 0);
  return hits;
}

}  // namespace

Alignment Align(std::span<const std::string> reference,
                std::span<const std::string> hypothesis) {
  const std::size_t n = reference.size(), m = hypothesis.size();
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = d[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      d[i][j] = std::min({diag, d[i - 1][j] + 1, d[i][j - 1] + 1});
    }

  Alignment a;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && reference[i - 1] == hypothesis[j - 1] && d[i][j] == d[i - 1][j - 1]) {
      a.steps.push_back({EditOp::kMatch, --i, --j});
      ++a.matches;
    } else if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1) {
      a.steps.push_back({EditOp::kSubstitution, --i, --j});
      ++a.substitutions;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      a.steps.push_back({EditOp::kDeletion, --i, AlignmentStep::kNone});
      ++a.deletions;
    } else {
      a.steps.push_back({EditOp::kInsertion, AlignmentStep::kNone, --j});
      ++a.insertions;
    }
  }
  std::reverse(a.steps.begin(), a.steps.end());
  return a;
}

double Wer(std::span<const std::string> reference,
           std::span<const std::string> hypothesis) {
  if (reference.empty()) throw InvalidArgument("error rate of an empty reference");
  return static_cast<double>(Align(reference, hypothesis).cost()) /
         static_cast<double>(reference.size());
}

double Ter(std::span<const std::string> reference,
           std::span<const std::string> hypothesis, const Stoplist &stoplist) {
  const auto ref_terms = ExtractTerms(reference, stoplist);
  if (ref_terms.empty()) throw InvalidArgument("reference has no content terms");
  return Wer(ref_terms, ExtractTerms(hypothesis, stoplist));
}

RelevantSets CollapseGrades(std::span<const Judgment> judgments) {
  RelevantSets out;
  for (const Judgment &j : judgments) {
    auto &set = out[j.topic_id];
    if (j.grade == Grade::kHighlyRelevant || j.grade == Grade::kRelevant) set.insert(j.doc_id);
  }
  return out;
}

std::optional<double> AveragePrecision(const RankedList &ranked,
                                       const std::set<std::string> &relevant) {
  if (relevant.empty()) return std::nullopt;
  const std::vector<bool> hits = Hits(ranked, relevant);
  double sum = 0;
  std::size_t found = 0;
  for (std::size_t k = 0; k < hits.size(); ++k)
    if (hits[k]) sum += static_cast<double>(++found) / static_cast<double>(k + 1);
  return sum / static_cast<double>(relevant.size());
}

std::optional<RpCurve> InterpolatedRpCurve(const RankedList &ranked,
                                           const std::set<std::string> &relevant) {
  if (relevant.empty()) return std::nullopt;
  const std::vector<bool> hits = Hits(ranked, relevant);
  const std::size_t total = relevant.size();
  RpCurve curve{};
  std::size_t found = 0;
  for (std::size_t k = 0; k < hits.size(); ++k) {
    if (hits[k]) ++found;
    const double precision = static_cast<double>(found) / static_cast<double>(k + 1);
    // Recall level i/10 is reached when found/total >= i/10.
    for (std::size_t i = 0; i < kRecallLevels; ++i)
      if (found * (kRecallLevels - 1) >= i * total) curve[i] = std::max(curve[i], precision);
  }
  return curve;
}

std::vector<RpPoint> RawRpPoints(const RankedList &ranked,
                                 const std::set<std::string> &relevant) {
  std::vector<RpPoint> out;
  if (relevant.empty()) return out;
  const std::vector<bool> hits = Hits(ranked, relevant);
  std::size_t found = 0;
  for (std::size_t k = 0; k < hits.size(); ++k)
    if (hits[k]) {
      ++found;
      out.push_back({static_cast<double>(found) / static_cast<double>(relevant.size()),
                     static_cast<double>(found) / static_cast<double>(k + 1)});
    }
  return out;
}

EvalReport Evaluate(const std::string &method, std::span<const TopicEvalInput> topics,
                    const RelevantSets *qrels, const Stoplist &stoplist) {
  EvalReport r;
  r.method = method;
  r.has_qrels = qrels != nullptr;
  std::vector<double> aps, wers, ters;
  std::vector<RpCurve> curves;
  static const std::set<std::string> kNoRelevant;
  for (const TopicEvalInput &in : topics) {
    TopicEval t;
    t.topic_id = in.topic_id;
    if (qrels) {
      const auto it = qrels->find(in.topic_id);
      const auto &relevant = it == qrels->end() ? kNoRelevant : it->second;
      t.ap = AveragePrecision(in.ranked, relevant);
      t.rp = InterpolatedRpCurve(in.ranked, relevant);
      if (t.ap) {
        aps.push_back(*t.ap);
        curves.push_back(*t.rp);
      } else {
        r.undefined_ap_topics.push_back(in.topic_id);
      }
    }
    if (in.reference && in.hypothesis && !in.reference->empty()) {
      t.wer = Wer(*in.reference, *in.hypothesis);
      wers.push_back(*t.wer);
      if (ExtractTerms(*in.reference, stoplist).empty()) {
        r.undefined_ter_topics.push_back(in.topic_id);
      } else {
        t.ter = Ter(*in.reference, *in.hypothesis, stoplist);
        ters.push_back(*t.ter);
      }
    }
    r.topics.push_back(std::move(t));
  }
  r.ap_topics = aps.size();
  r.mean_ap = Mean(aps);
  r.mean_wer = Mean(wers);
  r.mean_ter = Mean(ters);
  if (!curves.empty()) {
    RpCurve mean{};
    for (const RpCurve &c : curves)
      for (std::size_t i = 0; i < kRecallLevels; ++i) mean[i] += c[i];
    for (double &v : mean) v /= static_cast<double>(curves.size());
    r.mean_rp = mean;
  }
  return r;
}

std::string FormatReportTsv(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << "method\ttopic\tap\twer\tter\n";
  for (const EvalReport &r : reports) {
    for (const TopicEval &t : r.topics)
      out << r.method << '\t' << t.topic_id << '\t' << Fixed(t.ap, 6) << '\t'
          << Fixed(t.wer, 6) << '\t' << Fixed(t.ter, 6) << '\n';
    out << r.method << "\tmean\t" << Fixed(r.mean_ap, 6) << '\t' << Fixed(r.mean_wer, 6)
        << '\t' << Fixed(r.mean_ter, 6) << '\n';
  }
  return out.str();
}

std::string FormatSummaryTable(std::span<const EvalReport> reports) {
  std::size_t width = 6;
  for (const EvalReport &r : reports) width = std::max(width, r.method.size());
  auto pad = [&](const std::string &s) { return s + std::string(width - s.size(), ' '); };
  std::ostringstream out;
  out << pad("Method") << "  AP      WER     TER\n";
  for (const EvalReport &r : reports) {
    out << pad(r.method);
    for (const auto &v : {r.mean_ap, r.mean_wer, r.mean_ter}) {
      const std::string s = Fixed(v, 4);
      out << "  " << s << std::string(6 - std::min<std::size_t>(6, s.size()), ' ');
    }
    out << '\n';
  }
  for (const EvalReport &r : reports) {
    if (!r.has_qrels) out << r.method << ": no judgments, AP omitted\n";
    if (!r.undefined_ap_topics.empty())
      out << r.method << ": " << r.undefined_ap_topics.size()
          << " topic(s) without relevant documents excluded from AP\n";
    if (!r.undefined_ter_topics.empty())
      out << r.method << ": " << r.undefined_ter_topics.size()
          << " topic(s) without reference terms excluded from TER\n";
  }
  return out.str();
}

std::string FormatRpTsv(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << "method\trecall\tprecision\n";
  for (const EvalReport &r : reports) {
    if (!r.mean_rp) continue;
    for (std::size_t i = 0; i < kRecallLevels; ++i)
      out << r.method << '\t' << Fixed(static_cast<double>(i) / 10.0, 1) << '\t'
          << Fixed((*r.mean_rp)[i], 6) << '\n';
  }
  return out.str();
}

}  // namespace sdtr
