// eval.h
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
// Transcription error rates, ranked-retrieval metrics and report output.

#ifndef SDTR_EVAL_H_
#define SDTR_EVAL_H_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sdtr/corpus.h"
#include "sdtr/inverted_index.h"
#include "sdtr/tokenizer.h"

namespace sdtr {

enum class EditOp { kMatch, kSubstitution, kDeletion, kInsertion };

struct AlignmentStep {
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  EditOp op;
  std::size_t ref;  // kNone for insertions
  std::size_t hyp;  // kNone for deletions

  bool operator==(const AlignmentStep &) const = default;
};

struct Alignment {
  std::vector<AlignmentStep> steps;  // in reference/hypothesis order
  std::size_t matches = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;

  std::size_t cost() const { return substitutions + deletions + insertions; }
};

// Minimal unit-cost edit alignment. Among equal-cost alignments the
// backtrace prefers match, then substitution, deletion, insertion.
Alignment Align(std::span<const std::string> reference,
                std::span<const std::string> hypothesis);

// (S + D + I) / |reference|. Throws InvalidArgument for an empty reference.
double Wer(std::span<const std::string> reference,
           std::span<const std::string> hypothesis);

// Wer over the extracted term sequences. Throws InvalidArgument when the
// reference has no terms.
double Ter(std::span<const std::string> reference,
           std::span<const std::string> hypothesis, const Stoplist &stoplist);

// Topic id -> documents graded highly relevant or relevant. Topics whose
// judgments are all below that still get an (empty) entry.
using RelevantSets = std::map<std::string, std::set<std::string>>;
RelevantSets CollapseGrades(std::span<const Judgment> judgments);

// Non-interpolated average precision over the list as given, divided by
// the total number of relevant documents. nullopt when `relevant` is empty.
std::optional<double> AveragePrecision(const RankedList &ranked,
                                       const std::set<std::string> &relevant);

constexpr std::size_t kRecallLevels = 11;
using RpCurve = std::array<double, kRecallLevels>;

// Interpolated precision at recall 0.0, 0.1, ..., 1.0; 0 where unreachable.
std::optional<RpCurve> InterpolatedRpCurve(const RankedList &ranked,
                                           const std::set<std::string> &relevant);

struct RpPoint {
  double recall;
  double precision;
};

// (recall, precision) at every rank holding a relevant document.
std::vector<RpPoint> RawRpPoints(const RankedList &ranked,
                                 const std::set<std::string> &relevant);

struct TopicEvalInput {
  std::string topic_id;
  RankedList ranked;
  // Both present for WER/TER.
  std::optional<TokenStream> reference;
  std::optional<TokenStream> hypothesis;
};

struct TopicEval {
  std::string topic_id;
  std::optional<double> ap;
  std::optional<RpCurve> rp;
  std::optional<double> wer;
  std::optional<double> ter;
};

struct EvalReport {
  std::string method;
  std::vector<TopicEval> topics;
  // Arithmetic means over topics where the metric is defined.
  std::optional<double> mean_ap;
  std::optional<double> mean_wer;
  std::optional<double> mean_ter;
  std::optional<RpCurve> mean_rp;
  std::size_t ap_topics = 0;
  // Topics left out of the AP mean (no relevant documents) or evaluated
  // without judgments at all; reported, never silently dropped.
  std::vector<std::string> undefined_ap_topics;
  std::vector<std::string> undefined_ter_topics;
  bool has_qrels = true;
};

// `qrels` may be null, in which case AP is omitted.
EvalReport Evaluate(const std::string &method, std::span<const TopicEvalInput> topics,
                    const RelevantSets *qrels, const Stoplist &stoplist);

// One row per (method, topic) plus a "mean" row per method.
std::string FormatReportTsv(std::span<const EvalReport> reports);
// Fixed-width table with AP, WER and TER columns.
std::string FormatSummaryTable(std::span<const EvalReport> reports);
// method, recall, precision rows of the mean interpolated curves.
std::string FormatRpTsv(std::span<const EvalReport> reports);

}  // namespace sdtr

#endif  // SDTR_EVAL_H_
