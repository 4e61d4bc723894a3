// synth.h
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
// Synthetic test collections: topical corpora with judged topics, and a
// small hand-built collection with a homophone pair.

#ifndef SDTR_SYNTH_H_
#define SDTR_SYNTH_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sdtr/corpus.h"
#include "sdtr/lexicon.h"
#include "sdtr/tokenizer.h"

namespace sdtr {

struct SynthOptions {
  std::size_t docs = 2000;
  // Content words: latent_topics * topic_words topical words plus general
  // words filling up to `vocab`. Function words come from the stoplist and
  // are shared between corpora.
  std::size_t vocab = 5000;
  std::size_t latent_topics = 100;
  std::size_t topic_words = 35;
  std::size_t topics = 50;  // judged query topics, drawn from the latent ones
  std::string prefix = "A";
};

struct SynthCorpus {
  std::vector<Document> docs;
  std::vector<Topic> topics;
  std::vector<Judgment> qrels;
  std::vector<std::string> content_words;
};

// Two corpora whose content vocabularies are disjoint. Deterministic in
// `seed`.
std::pair<SynthCorpus, SynthCorpus> GenerateCorpusPair(const SynthOptions &first,
                                                       const SynthOptions &second,
                                                       std::uint64_t seed);

// docs.sgml, topics.sgml, qrels.txt.
void WriteSynthCorpus(const SynthCorpus &corpus, const std::string &dir);

// A collection in which two words share one pronunciation. The globally
// more frequent spelling is wrong for the query; the top documents of a
// first retrieval use the other one.
struct HomophoneScenario {
  std::vector<Document> docs;
  Lexicon lexicon;
  Topic topic;
  std::vector<Judgment> qrels;
  TokenStream reference;
  // Adaptation settings under which the second stage recovers.
  double tau = 1.0;
  std::size_t top_r = 3;
};

HomophoneScenario MakeHomophoneScenario();

}  // namespace sdtr

#endif  // SDTR_SYNTH_H_
