// pipeline.cc
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

#include "sdtr/pipeline.h"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sdtr/error.h"
#include "sdtr/util.h"

namespace sdtr {

namespace {

using Json = nlohmann::json;

const char *StageName(Stage s) { return s == Stage::kFirst ? "first" : "second"; }

// Content terms of a transcription; <unk> carries no retrievable term.
std::vector<std::string> QueryTerms(std::span<const std::string> words,
                                    const Stoplist &stoplist) {
  std::vector<std::string> terms = ExtractTerms(words, stoplist);
  std::erase(terms, std::string(Vocabulary::kUnk));
  return terms;
}

void FinishRetrieval(const std::string &topic_id, const Artifacts &artifacts,
                     const PipelineConfig &config, StageResult *r) {
  r->terms = QueryTerms(r->transcription, artifacts.stoplist);
  if (r->terms.empty()) {
    r->notes.push_back("no query terms; nothing retrieved");
    r->ranked = RankedList{};
  } else {
    r->ranked = Retrieve(r->terms, artifacts.index, config.cutoff);
  }
  r->ranked.topic_id = topic_id;
}

std::string SafeLabel(const std::string &label) {
  std::string out;
  for (char c : label)
    out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ? c
                                                                                          : '_';
  return out;
}

Json StageJson(const StageResult &r) {
  Json j;
  j["stage"] = StageName(r.stage);
  j["nbest"] = Json::array();
  for (const Transcription &t : r.nbest)
    j["nbest"].push_back({{"words", Join(t.words, " ")}, {"score", t.score}});
  j["transcription"] = Join(r.transcription, " ");
  j["terms"] = r.terms;
  j["retrieved"] = r.ranked.entries.size();
  j["adapted"] = r.adapted;
  j["adaptation_docs"] = r.adaptation_docs;
  j["notes"] = r.notes;
  return j;
}

}  // namespace

bool StageResult::operator==(const StageResult &o) const {
  if (nbest.size() != o.nbest.size()) return false;
  for (std::size_t i = 0; i < nbest.size(); ++i)
    if (nbest[i].words != o.nbest[i].words || nbest[i].score != o.nbest[i].score ||
        nbest[i].search_score != o.nbest[i].search_score)
      return false;
  return stage == o.stage && transcription == o.transcription && terms == o.terms &&
         ranked == o.ranked && adapted == o.adapted && adaptation_docs == o.adaptation_docs &&
         notes == o.notes;
}

SentenceList DocumentSentences(const Document &doc, const FieldSelection &fields,
                               const Tokenizer &tokenizer) {
  SentenceList out;
  for (const std::string &text : SelectedFieldTexts(doc, fields))
    for (TokenStream &s : SplitSentences(text, tokenizer)) out.push_back(std::move(s));
  return out;
}

SentenceList CollectionSentences(std::span<const Document> docs, const FieldSelection &fields,
                                 const Tokenizer &tokenizer) {
  SentenceList out;
  for (const Document &d : docs)
    for (TokenStream &s : DocumentSentences(d, fields, tokenizer)) out.push_back(std::move(s));
  return out;
}

NGramModel OfflineAdapt(std::span<const Document> docs, const PipelineConfig &config,
                        const Tokenizer &tokenizer) {
  const SentenceList text =
      CollectionSentences(docs, ParseFieldSelection(config.fields), tokenizer);
  return BuildModel(text, config.vocab_size, config.label, config.min_bigram, config.min_trigram);
}

void Artifacts::SetDocuments(std::vector<Document> docs) {
  documents = std::move(docs);
  doc_index.clear();
  for (std::size_t i = 0; i < documents.size(); ++i) doc_index.emplace(documents[i].id, i);
}

ChannelModel LoadChannel(const PipelineConfig &config) {
  if (!config.channel.empty()) {
    std::istringstream in(ReadFile(config.channel));
    return ChannelModel::Read(in);
  }
  return ChannelModel::Uniform(config.sub_rate, config.del_rate, config.ins_rate);
}

Stoplist LoadStoplistFor(const PipelineConfig &config) {
  if (config.stoplist.empty()) return DefaultStoplist();
  std::istringstream in(ReadFile(config.stoplist));
  return LoadStoplist(in);
}

IndexOptions IndexOptionsFor(const PipelineConfig &config) {
  IndexOptions options;
  options.fields = ParseFieldSelection(config.fields);
  options.length_unit =
      config.length_unit == "tokens" ? LengthUnit::kTokens : LengthUnit::kCharacters;
  return options;
}

Artifacts LoadArtifacts(const PipelineConfig &config) {
  config.Validate();
  Artifacts a;
  if (!config.documents.empty())
    a.SetDocuments(ParseDocuments(ReadFile(config.documents), ParseDocFormat(config.doc_format)));
  a.fields = ParseFieldSelection(config.fields);
  a.stoplist = LoadStoplistFor(config);
  if (!config.index.empty() && std::filesystem::exists(config.index)) {
    std::ifstream in(config.index, std::ios::binary);
    a.index = InvertedIndex::Load(in);
  } else {
    if (a.documents.empty()) throw InvalidArgument("no index and no documents configured");
    a.index = InvertedIndex::Build(a.documents, IndexOptionsFor(config), a.tokenizer, a.stoplist);
  }
  if (!config.lexicon.empty()) {
    std::istringstream in(ReadFile(config.lexicon));
    a.lexicon = Lexicon::Read(in, config.grapheme_fallback);
  } else {
    a.lexicon = Lexicon(config.grapheme_fallback);
  }
  a.channel = LoadChannel(config);
  return a;
}

Pronunciation Dictate(const std::string &text, const Artifacts &artifacts, std::uint64_t seed) {
  const TokenStream words = artifacts.tokenizer.Tokenize(text);
  return Corrupt(Phonemize(words, artifacts.lexicon), artifacts.channel, seed);
}

StageResult RunQuery(const std::string &topic_id, std::span<const std::string> heard,
                     const Artifacts &artifacts, const Decoder &decoder,
                     const PipelineConfig &config) {
  StageResult r;
  r.nbest = decoder.Decode(heard);
  r.transcription = r.nbest.front().words;
  r.adapted = decoder.lm().adapted();
  FinishRetrieval(topic_id, artifacts, config, &r);
  return r;
}

StageResult RunText(const std::string &topic_id, const std::string &text,
                    const Artifacts &artifacts, const PipelineConfig &config) {
  StageResult r;
  r.transcription = artifacts.tokenizer.Tokenize(text);
  FinishRetrieval(topic_id, artifacts, config, &r);
  return r;
}

CountTable LocalCounts(const RankedList &ranked, std::size_t r, const Artifacts &artifacts,
                       const Vocabulary &vocab) {
  SentenceList text;
  for (std::size_t k = 0; k < std::min(r, ranked.entries.size()); ++k) {
    const auto it = artifacts.doc_index.find(ranked.entries[k].doc_id);
    if (it == artifacts.doc_index.end())
      throw InvalidArgument("retrieved document '" + ranked.entries[k].doc_id +
                            "' is not in the loaded collection");
    for (TokenStream &s :
         DocumentSentences(artifacts.documents[it->second], artifacts.fields, artifacts.tokenizer))
      text.push_back(std::move(s));
  }
  return CountNgrams(text, &vocab);
}

TwoStageResult RunTwoStage(const std::string &topic_id, std::span<const std::string> heard,
                           const Artifacts &artifacts, const Decoder &global_decoder,
                           const PipelineConfig &config) {
  TwoStageResult out;
  out.first = RunQuery(topic_id, heard, artifacts, global_decoder, config);
  const std::size_t r = std::min(config.top_r, out.first.ranked.entries.size());
  if (r == 0) {
    out.second = out.first;
    out.second.stage = Stage::kSecond;
    out.second.notes.push_back(config.top_r == 0 ? "adaptation disabled (top_r = 0)"
                                                 : "adaptation skipped: no documents retrieved");
    return out;
  }
  const NGramModel adapted =
      MapAdapt(global_decoder.lm(), LocalCounts(out.first.ranked, r, artifacts,
                                                global_decoder.lm().vocab()),
               config.tau);
  const Decoder decoder(artifacts.lexicon, artifacts.channel, adapted, global_decoder.options());
  out.second = RunQuery(topic_id, heard, artifacts, decoder, config);
  out.second.stage = Stage::kSecond;
  out.second.adaptation_docs = r;
  if (r < config.top_r)
    out.second.notes.push_back("adapted on " + std::to_string(r) + " of " +
                               std::to_string(config.top_r) + " documents");
  return out;
}

ExperimentResult RunExperiment(const ExperimentInputs &inputs, const Artifacts &artifacts,
                               std::span<const ExperimentModel> models,
                               const PipelineConfig &config, std::uint64_t seed) {
  config.Validate();
  const std::vector<Topic> &topics = inputs.topics;
  const std::size_t n = topics.size();

  std::vector<std::string> methods;
  for (const ExperimentModel &m : models) {
    methods.push_back(m.label);
    if (config.online_adaptation) methods.push_back(m.label + "+online");
  }
  if (config.text_row) methods.push_back("Text");

  std::vector<Decoder> decoders;
  for (const ExperimentModel &m : models)
    decoders.emplace_back(artifacts.lexicon, artifacts.channel, m.lm, config.decoder);

  // results[topic][method]
  std::vector<std::vector<StageResult>> results(n);
  std::vector<Pronunciation> heard(n);
  std::vector<std::string> errors(n);

  auto work = [&](std::size_t t) {
    const Topic &topic = topics[t];
    if (inputs.utterances) {
      const auto it = inputs.utterances->find(topic.id);
      if (it == inputs.utterances->end())
        throw InvalidArgument("no utterance for topic '" + topic.id + "'");
      heard[t] = it->second;
    } else {
      heard[t] = Dictate(topic.description, artifacts, DeriveSeed(seed, topic.id));
    }
    for (std::size_t m = 0; m < models.size(); ++m) {
      try {
        if (config.online_adaptation) {
          TwoStageResult two = RunTwoStage(topic.id, heard[t], artifacts, decoders[m], config);
          results[t].push_back(std::move(two.first));
          results[t].push_back(std::move(two.second));
        } else {
          results[t].push_back(RunQuery(topic.id, heard[t], artifacts, decoders[m], config));
        }
      } catch (const DecodeError &e) {
        for (int k = 0; k < (config.online_adaptation ? 2 : 1); ++k) {
          StageResult failed;
          failed.stage = k == 0 ? Stage::kFirst : Stage::kSecond;
          failed.ranked.topic_id = topic.id;
          failed.notes.push_back(std::string("decode failed: ") + e.what());
          results[t].push_back(std::move(failed));
        }
      }
    }
    if (config.text_row) results[t].push_back(RunText(topic.id, topic.description, artifacts, config));
  };

  // Topics are independent; each worker writes only its own slots.
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t t; (t = next++) < n;) {
      try {
        work(t);
      } catch (const std::exception &e) {
        errors[t] = e.what();
      }
    }
  };
  const std::size_t nthreads = std::min(config.threads, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread &th : pool) th.join();
  for (std::size_t t = 0; t < n; ++t)
    if (!errors[t].empty()) throw Error("topic '" + topics[t].id + "': " + errors[t]);

  ExperimentResult out;
  out.methods = methods;
  const RelevantSets *qrels = inputs.qrels ? &*inputs.qrels : nullptr;
  std::ostringstream log;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const bool text = config.text_row && m + 1 == methods.size();
    std::vector<TopicEvalInput> eval_in;
    std::vector<RankedList> &run = out.runs[methods[m]];
    for (std::size_t t = 0; t < n; ++t) {
      const StageResult &r = results[t][m];
      TopicEvalInput in;
      in.topic_id = topics[t].id;
      in.ranked = r.ranked;
      if (inputs.references) {
        if (auto it = inputs.references->find(topics[t].id); it != inputs.references->end())
          in.reference = it->second;
      } else {
        in.reference = artifacts.tokenizer.Tokenize(topics[t].description);
      }
      if (!text) in.hypothesis = r.transcription;
      eval_in.push_back(std::move(in));
      run.push_back(r.ranked);
    }
    out.reports.push_back(Evaluate(methods[m], eval_in, qrels, artifacts.stoplist));
  }
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t m = 0; m < methods.size(); ++m) {
      Json j = StageJson(results[t][m]);
      j["seed"] = seed;
      j["topic"] = topics[t].id;
      j["method"] = methods[m];
      j["heard"] = Join(heard[t], " ");
      log << j.dump() << '\n';
    }
  out.log = log.str();
  return out;
}

void WriteExperiment(const ExperimentResult &result, const std::string &dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  for (const std::string &method : result.methods)
    WriteFile((base / ("run." + SafeLabel(method) + ".txt")).string(),
              FormatRun(result.runs.at(method), method));
  WriteFile((base / "report.tsv").string(), FormatReportTsv(result.reports));
  WriteFile((base / "summary.txt").string(), FormatSummaryTable(result.reports));
  WriteFile((base / "rp.tsv").string(), FormatRpTsv(result.reports));
  WriteFile((base / "log.jsonl").string(), result.log);
}

ExperimentInputs LoadExperimentInputs(const PipelineConfig &config) {
  if (config.topics.empty()) throw InvalidArgument("no topics file configured");
  ExperimentInputs in;
  in.topics = ParseTopics(ReadFile(config.topics));
  if (!config.qrels.empty()) in.qrels = CollapseGrades(ParseQrels(ReadFile(config.qrels)));
  if (!config.transcripts.empty()) {
    const DefaultTokenizer tokenizer;
    in.references.emplace();
    for (const auto &[id, tokens] : ParseIdLines(ReadFile(config.transcripts)))
      (*in.references)[id] = tokenizer.Tokenize(Join(tokens, " "));
  }
  if (!config.utterances.empty()) {
    in.utterances.emplace();
    for (auto &[id, phonemes] : ParseIdLines(ReadFile(config.utterances)))
      (*in.utterances)[id] = std::move(phonemes);
  }
  return in;
}

NGramModel LoadModel(const std::string &path) {
  std::istringstream in(ReadFile(path));
  return NGramModel::Load(in);
}

void SaveModel(const NGramModel &model, const std::string &path) {
  std::ostringstream out;
  model.Save(out);
  WriteFile(path, out.str());
}

std::vector<ExperimentModel> LoadExperimentModels(const PipelineConfig &config) {
  std::vector<ExperimentModel> models;
  if (config.lms.empty()) {
    if (config.lm.empty()) throw InvalidArgument("no language model configured");
    models.push_back({config.label, LoadModel(config.lm)});
  }
  for (const LmSpec &spec : config.lms) models.push_back({spec.label, LoadModel(spec.path)});
  return models;
}

std::vector<std::pair<std::string, TokenStream>> ParseIdLines(std::string_view text) {
  std::vector<std::pair<std::string, TokenStream>> out;
  std::size_t start = 0, number = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++number;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      out.emplace_back(std::to_string(number), SplitWhitespace(line));
    } else {
      out.emplace_back(std::string(Trim(line.substr(0, tab))), SplitWhitespace(line.substr(tab + 1)));
    }
    start = end + 1;
  }
  return out;
}

std::string FormatIdLines(std::span<const std::pair<std::string, TokenStream>> lines) {
  std::string out;
  for (const auto &[id, tokens] : lines) out += id + '\t' + Join(tokens, " ") + '\n';
  return out;
}

}  // namespace sdtr
