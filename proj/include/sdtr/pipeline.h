// pipeline.h
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
// Spoken-query retrieval: collection model building, decode-and-retrieve,
// two-stage retrieval with online adaptation, and the experiment harness.

#ifndef SDTR_PIPELINE_H_
#define SDTR_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdtr/channel.h"
#include "sdtr/corpus.h"
#include "sdtr/decoder.h"
#include "sdtr/eval.h"
#include "sdtr/inverted_index.h"
#include "sdtr/lexicon.h"
#include "sdtr/ngram_model.h"
#include "sdtr/tokenizer.h"

namespace sdtr {

struct LmSpec {
  std::string label;
  std::string path;
};

// Every key is documented in README.md. Paths are resolved against the
// directory of the config file they came from.
struct PipelineConfig {
  std::string documents;
  std::string doc_format = "tagged";
  std::string topics;
  std::string qrels;
  std::string transcripts;  // reference transcripts, "id<TAB>words" lines
  std::string utterances;   // heard phonemes, "id<TAB>p1 p2 ..." lines
  std::string index;
  std::string lm;
  std::string lexicon;
  std::string channel;  // empty: Uniform(sub_rate, del_rate, ins_rate)
  std::string stoplist;  // empty: built-in list
  std::string output;

  std::string fields = "title,abstract,keywords";
  std::string length_unit = "characters";
  std::string label = "collection";

  std::size_t cutoff = 1000;
  bool online_adaptation = false;
  std::size_t top_r = 10;
  double tau = 500;

  std::size_t vocab_size = 20000;
  Count min_bigram = 0;
  Count min_trigram = 0;

  double sub_rate = 0;
  double del_rate = 0;
  double ins_rate = 0;
  bool grapheme_fallback = true;

  DecoderOptions decoder;

  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;  // experiment sweep; empty: {seed}
  std::size_t threads = 1;

  std::vector<LmSpec> lms;  // experiment models; empty: {label, lm}
  bool text_row = true;

  // Throws InvalidArgument when an invariant fails.
  void Validate() const;
};

// Parses a JSON object. Unknown keys are rejected; relative paths are
// resolved against `base_dir` when it is nonempty.
PipelineConfig ParseConfig(const std::string &json_text, const std::string &base_dir = "");
PipelineConfig LoadConfig(const std::string &path);
// `key=value` where value is JSON, or a bare string.
void ApplyOverride(PipelineConfig *config, const std::string &assignment);
std::string ConfigToJson(const PipelineConfig &config);

// Sentences of the selected fields: each field value, split at newlines.
SentenceList DocumentSentences(const Document &doc, const FieldSelection &fields,
                               const Tokenizer &tokenizer);
SentenceList CollectionSentences(std::span<const Document> docs, const FieldSelection &fields,
                                 const Tokenizer &tokenizer);

// Global model over the whole collection.
NGramModel OfflineAdapt(std::span<const Document> docs, const PipelineConfig &config,
                        const Tokenizer &tokenizer);

// Shared read-only inputs of a run.
struct Artifacts {
  std::vector<Document> documents;
  std::unordered_map<std::string, std::size_t> doc_index;
  InvertedIndex index;
  Lexicon lexicon;
  ChannelModel channel = ChannelModel::Noiseless();
  Stoplist stoplist;
  FieldSelection fields;
  DefaultTokenizer tokenizer;

  void SetDocuments(std::vector<Document> docs);
};

// Builds the index from the documents when config.index is empty or missing.
Artifacts LoadArtifacts(const PipelineConfig &config);
ChannelModel LoadChannel(const PipelineConfig &config);
Stoplist LoadStoplistFor(const PipelineConfig &config);
IndexOptions IndexOptionsFor(const PipelineConfig &config);

// Tokenize, phonemize, corrupt.
Pronunciation Dictate(const std::string &text, const Artifacts &artifacts, std::uint64_t seed);

enum class Stage { kFirst, kSecond };

struct StageResult {
  Stage stage = Stage::kFirst;
  std::vector<Transcription> nbest;
  TokenStream transcription;  // top-1 words
  std::vector<std::string> terms;
  RankedList ranked;
  bool adapted = false;
  std::size_t adaptation_docs = 0;
  std::vector<std::string> notes;

  bool operator==(const StageResult &other) const;
};

// Decodes `heard` with `decoder`, extracts terms from the top transcription
// and retrieves. Throws DecodeError from the decoder.
StageResult RunQuery(const std::string &topic_id, std::span<const std::string> heard,
                     const Artifacts &artifacts, const Decoder &decoder,
                     const PipelineConfig &config);

// Retrieval from the text itself, bypassing speech.
StageResult RunText(const std::string &topic_id, const std::string &text,
                    const Artifacts &artifacts, const PipelineConfig &config);

// Local counts from the selected fields of the top `r` documents.
CountTable LocalCounts(const RankedList &ranked, std::size_t r, const Artifacts &artifacts,
                       const Vocabulary &vocab);

struct TwoStageResult {
  StageResult first;
  StageResult second;
};

// Stage one, then MAP adaptation on the top-R documents and a re-decode of
// the same input. With R = 0 or no retrieved documents the second stage
// repeats the first.
TwoStageResult RunTwoStage(const std::string &topic_id, std::span<const std::string> heard,
                           const Artifacts &artifacts, const Decoder &global_decoder,
                           const PipelineConfig &config);

struct ExperimentModel {
  std::string label;
  NGramModel lm;
};

struct ExperimentResult {
  std::vector<EvalReport> reports;
  // Method label -> one RankedList per topic, topic order.
  std::map<std::string, std::vector<RankedList>> runs;
  std::vector<std::string> methods;  // row order
  std::string log;                   // JSON lines
};

struct ExperimentInputs {
  std::vector<Topic> topics;
  std::optional<RelevantSets> qrels;
  // Reference word sequences by topic id; default: the tokenized description.
  std::optional<std::map<std::string, TokenStream>> references;
  // Heard phonemes by topic id; default: the dictated description.
  std::optional<std::map<std::string, Pronunciation>> utterances;
};

// For each model: dictate every topic description (one corrupted input per
// topic, shared by all models), decode, retrieve and evaluate. Adds
// second-stage rows when config.online_adaptation and a "Text" row when
// config.text_row.
ExperimentResult RunExperiment(const ExperimentInputs &inputs, const Artifacts &artifacts,
                               std::span<const ExperimentModel> models,
                               const PipelineConfig &config, std::uint64_t seed);

// Topics, judgments, reference transcripts and utterances named by the
// config; absent paths leave the optional parts empty.
ExperimentInputs LoadExperimentInputs(const PipelineConfig &config);
// config.lms, or the single model {config.label, config.lm}.
std::vector<ExperimentModel> LoadExperimentModels(const PipelineConfig &config);
NGramModel LoadModel(const std::string &path);
void SaveModel(const NGramModel &model, const std::string &path);

// run.<method>.txt, report.tsv, summary.txt, rp.tsv, log.jsonl.
void WriteExperiment(const ExperimentResult &result, const std::string &dir);

// "id<TAB>tokens" lines, or bare lines numbered from 1.
std::vector<std::pair<std::string, TokenStream>> ParseIdLines(std::string_view text);
std::string FormatIdLines(std::span<const std::pair<std::string, TokenStream>> lines);

}  // namespace sdtr

#endif  // SDTR_PIPELINE_H_
