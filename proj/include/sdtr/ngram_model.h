// ngram_model.h
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
// Closed-vocabulary trigram backoff model with Witten-Bell smoothing, and
// MAP adaptation of such a model to a small set of local counts.
//
// For a history h with count c(h) = sum_w c(h,w) and T(h) distinct
// successors, a seen successor w gets
//
//   p(w|h) = (c(h,w) + T(h) * p(w|h')) / (c(h) + T(h))
//
// where h' drops the oldest word of h. Unseen successors get
// alpha(h) * p(w|h') with alpha(h) = T(h) / (c(h) + T(h)); histories with no
// parameters back off with weight 1. The unigram level interpolates with the
// uniform distribution over the predicted symbols (words, </s>, <unk>).
//
// An adapted model keeps the global model as its prior. For a history h
// with local count C(h) > 0,
//
//   p_adapted(w|h) = (c_local(h,w) + tau * p_global(w|h)) / (C(h) + tau).
//
// A history without local counts keeps the global distribution when the
// global model has parameters for it, and otherwise behaves like its
// shortened history (as it does in the global model).

#ifndef SDTR_NGRAM_MODEL_H_
#define SDTR_NGRAM_MODEL_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdtr/ngram_counts.h"
#include "sdtr/vocabulary.h"

namespace sdtr {

struct ModelInfo {
  std::string label;
  Count tokens = 0;  // word tokens in the source text
  Count types = 0;   // distinct word types in the source text
  double coverage = 0;

  bool operator==(const ModelInfo &) const = default;
};

// First-pass view of p(.|u): explicit successors plus a scaled base
// distribution for all others. Every explicit value is at least the
// backoff value it replaces.
struct BigramRow {
  std::vector<std::pair<WordId, double>> explicit_logprobs;  // sorted by id
  double log_backoff = 0;
  // Base distribution: the global model's unigram when true, otherwise this
  // model's own unigram.
  bool prior_unigram = false;
};

class NGramModel {
 public:
  // Witten-Bell estimate. Counts over symbols outside `vocab` are folded
  // into <unk>. Throws InvalidArgument when there are no word counts.
  static NGramModel Estimate(const CountTable &counts, Vocabulary vocab,
                             ModelInfo info = {});
  // p(w|h) = 1/(K+2) for every history.
  static NGramModel Uniform(Vocabulary vocab);

  const Vocabulary &vocab() const;
  const ModelInfo &info() const;
  bool adapted() const;
  double tau() const;

  // history holds up to the two most recent symbols, oldest first; longer
  // histories are truncated. Returns 0 for <s> as the predicted symbol.
  double Prob(WordId w, std::span<const WordId> history) const;
  double LogProb(WordId w, std::span<const WordId> history) const;
  // String form; out-of-vocabulary arguments map to <unk>.
  double Prob(const std::string &w, std::span<const std::string> history) const;

  // Every symbol that can be predicted: words, </s>, <unk>.
  std::vector<WordId> PredictedSymbols() const;
  // Histories (length 0..2) that carry their own parameters.
  std::vector<std::vector<WordId>> ExplicitHistories() const;

  BigramRow Row(WordId u) const;
  // log p(w) of this model and of the global prior (identical when not
  // adapted); indexed by WordId.
  const std::vector<double> &UnigramLogProbs() const;
  const std::vector<double> &PriorUnigramLogProbs() const;

  // Text snapshot; see docs/formats.md. Identical models write identical
  // bytes.
  void Save(std::ostream &out) const;
  static NGramModel Load(std::istream &in);

  struct Data;

 private:
  explicit NGramModel(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  friend NGramModel MapAdapt(const NGramModel &, const CountTable &, double);

  std::shared_ptr<const Data> data_;
};

// (c + tau * p_global) / (total + tau): the posterior mean of one adapted
// conditional.
inline double MapEstimate(double c, double total, double p_global, double tau) {
  return (c + tau * p_global) / (total + tau);
}

// Never modifies `global`; the result shares it. Throws InvalidArgument for
// tau <= 0. Local symbols outside the global vocabulary count as <unk>.
NGramModel MapAdapt(const NGramModel &global, const CountTable &local,
                    double tau);

// Sum of ln p over the words and the final </s>; the first word is
// conditioned on <s>.
double SequenceLogProb(const NGramModel &model, std::span<const std::string> words);
// exp(-logprob / events) where events counts words plus one </s> per
// sentence. Throws InvalidArgument for an empty corpus.
double Perplexity(const NGramModel &model, std::span<const TokenStream> sentences);
// Sum over all orders and n-grams of c(h,w) * ln p(w|h) at exactly that
// history; the fit of a model to a count table.
double CountLogLikelihood(const NGramModel &model, const CountTable &counts);

// Drops bigrams seen fewer than min_bigram times and trigrams seen fewer
// than min_trigram times (0 or 1 keeps everything). Unigrams are kept.
CountTable ApplyCutoffs(const CountTable &counts, Count min_bigram, Count min_trigram);

// Counts the sentences, selects the top-K vocabulary and estimates a model,
// filling in ModelInfo.
NGramModel BuildModel(std::span<const TokenStream> sentences, std::size_t vocab_size,
                      std::string label, Count min_bigram = 0, Count min_trigram = 0);

}  // namespace sdtr

#endif  // SDTR_NGRAM_MODEL_H_
