// sdtr.cc
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
// Command-line front end. Every subcommand reads one JSON config file and
// applies --set key=value overrides and named flags on top of it, in that
// order.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdtr/error.h"
#include "sdtr/pipeline.h"
#include "sdtr/synth.h"
#include "sdtr/util.h"

namespace {

using namespace sdtr;
namespace fs = std::filesystem;

// Options shared by every subcommand.
struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  // Named flag -> config key, filled in by CLI11.
  std::map<std::string, std::string> flags;
};

// Flags that stand for config keys.
const std::vector<std::pair<std::string, std::string>> &FlagKeys() {
  static const auto *const kKeys = new std::vector<std::pair<std::string, std::string>>{
      {"documents", "documents"}, {"topics", "topics"},
      {"qrels", "qrels"},         {"transcripts", "transcripts"},
      {"utterances", "utterances"}, {"index", "index"},
      {"lm", "lm"},               {"lexicon", "lexicon"},
      {"channel", "channel"},     {"stoplist", "stoplist"},
      {"output", "output"},       {"label", "label"},
      {"seed", "seed"},           {"beam", "beam"},
      {"nbest", "nbest"},         {"tau", "tau"},
      {"top-r", "top_r"},         {"cutoff", "cutoff"},
      {"threads", "threads"},     {"vocab-size", "vocab_size"},
  };
  return *kKeys;
}

void AddCommon(CLI::App *cmd, Common *common) {
  cmd->add_option("config", common->config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", common->sets, "Override a config key: key=value")
      ->allow_extra_args(false);
  for (const auto &[flag, key] : FlagKeys())
    cmd->add_option("--" + flag, common->flags[flag], "Config key '" + key + "'");
  cmd->add_flag_callback(
      "--online", [common] { common->sets.push_back("online_adaptation=true"); },
      "Enable the second, adapted stage");
}

PipelineConfig Resolve(const Common &common) {
  PipelineConfig config =
      common.config_path.empty() ? PipelineConfig{} : LoadConfig(common.config_path);
  for (const std::string &s : common.sets) ApplyOverride(&config, s);
  for (const auto &[flag, key] : FlagKeys()) {
    const std::string &value = common.flags.at(flag);
    if (!value.empty()) ApplyOverride(&config, key + "=" + value);
  }
  config.Validate();
  return config;
}

std::string Require(const std::string &value, const std::string &key) {
  if (value.empty()) throw InvalidArgument("config key '" + key + "' is required here");
  return value;
}

// Writes to the path, or to stdout when it is empty.
void Emit(const std::string &path, const std::string &text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    WriteFile(path, text);
  }
}

std::vector<Document> LoadDocuments(const PipelineConfig &config) {
  return ParseDocuments(ReadFile(Require(config.documents, "documents")),
                        ParseDocFormat(config.doc_format));
}

int BuildIndex(const PipelineConfig &config) {
  const std::vector<Document> docs = LoadDocuments(config);
  const DefaultTokenizer tokenizer;
  const InvertedIndex index =
      InvertedIndex::Build(docs, IndexOptionsFor(config), tokenizer, LoadStoplistFor(config));
  const std::string path = !config.index.empty() ? config.index : config.output;
  std::ostringstream out;
  index.Save(out);
  Emit(Require(path, "index"), out.str());
  std::cerr << "indexed " << index.num_docs() << " documents, " << index.terms().size()
            << " terms, average length " << FormatDouble(index.avglen()) << "\n";
  return 0;
}

int BuildLm(const PipelineConfig &config) {
  const DefaultTokenizer tokenizer;
  const NGramModel lm = OfflineAdapt(LoadDocuments(config), config, tokenizer);
  const std::string path = !config.lm.empty() ? config.lm : config.output;
  SaveModel(lm, Require(path, "lm"));
  const ModelInfo &info = lm.info();
  std::cerr << "model '" << info.label << "': " << lm.vocab().num_words() << " words, "
            << info.tokens << " tokens, " << info.types << " types, coverage "
            << FormatDouble(info.coverage) << "\n";
  return 0;
}

int LmStats(const PipelineConfig &config, const std::string &text_path) {
  const NGramModel lm = LoadModel(Require(config.lm, "lm"));
  const ModelInfo &info = lm.info();
  std::size_t histories[3] = {0, 0, 0};
  for (const auto &h : lm.ExplicitHistories()) ++histories[h.size()];
  std::ostringstream out;
  out << "label\t" << info.label << "\n"
      << "vocabulary\t" << lm.vocab().num_words() << "\n"
      << "tokens\t" << info.tokens << "\n"
      << "types\t" << info.types << "\n"
      << "coverage\t" << FormatDouble(info.coverage) << "\n"
      << "unigram_histories\t" << histories[0] << "\n"
      << "bigram_histories\t" << histories[1] << "\n"
      << "trigram_histories\t" << histories[2] << "\n"
      << "adapted\t" << (lm.adapted() ? "true" : "false") << "\n";
  if (lm.adapted()) out << "tau\t" << FormatDouble(lm.tau()) << "\n";
  if (!text_path.empty()) {
    const DefaultTokenizer tokenizer;
    const SentenceList sentences = SplitSentences(ReadFile(text_path), tokenizer);
    TokenStream all;
    for (const TokenStream &s : sentences) all.insert(all.end(), s.begin(), s.end());
    out << "text_coverage\t" << FormatDouble(Coverage(lm.vocab(), all)) << "\n"
        << "perplexity\t" << FormatDouble(Perplexity(lm, sentences)) << "\n";
  }
  Emit(config.output, out.str());
  return 0;
}

// Texts to dictate: the given string, or every topic description.
std::vector<std::pair<std::string, std::string>> DictationTexts(const PipelineConfig &config,
                                                                const std::string &text) {
  if (!text.empty()) return {{"1", text}};
  std::vector<std::pair<std::string, std::string>> out;
  for (const Topic &t : ParseTopics(ReadFile(Require(config.topics, "topics"))))
    out.emplace_back(t.id, t.description);
  return out;
}

int Dictate(const PipelineConfig &config, const std::string &text) {
  Artifacts artifacts;
  artifacts.lexicon = Lexicon(config.grapheme_fallback);
  if (!config.lexicon.empty()) {
    std::istringstream in(ReadFile(config.lexicon));
    artifacts.lexicon = Lexicon::Read(in, config.grapheme_fallback);
  }
  artifacts.channel = LoadChannel(config);
  std::vector<std::pair<std::string, TokenStream>> lines;
  for (const auto &[id, t] : DictationTexts(config, text))
    lines.emplace_back(id, sdtr::Dictate(t, artifacts, DeriveSeed(config.seed, id)));
  Emit(config.output, FormatIdLines(lines));
  return 0;
}

int Decode(const PipelineConfig &config, const std::string &input) {
  Lexicon lexicon(config.grapheme_fallback);
  if (!config.lexicon.empty()) {
    std::istringstream in(ReadFile(config.lexicon));
    lexicon = Lexicon::Read(in, config.grapheme_fallback);
  }
  const Decoder decoder(lexicon, LoadChannel(config), LoadModel(Require(config.lm, "lm")),
                        config.decoder);
  const std::string path = !input.empty() ? input : Require(config.utterances, "utterances");
  std::ostringstream out;
  int failures = 0;
  for (const auto &[id, heard] : ParseIdLines(ReadFile(path))) {
    try {
      const std::vector<Transcription> nbest = decoder.Decode(heard);
      if (config.decoder.nbest == 1) {
        out << id << '\t' << Join(nbest.front().words, " ") << '\n';
      } else {
        for (std::size_t r = 0; r < nbest.size(); ++r)
          out << id << '\t' << r + 1 << '\t' << FormatDouble(nbest[r].score) << '\t'
              << Join(nbest[r].words, " ") << '\n';
      }
    } catch (const DecodeError &e) {
      std::cerr << "utterance " << id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  Emit(config.output, out.str());
  return failures > 0 ? 1 : 0;
}

int RetrieveCmd(const PipelineConfig &config, const std::string &input) {
  const Artifacts artifacts = LoadArtifacts(config);
  std::vector<RankedList> lists;
  auto run = [&](const std::string &id, const std::string &text) {
    StageResult r = RunText(id, text, artifacts, config);
    lists.push_back(std::move(r.ranked));
  };
  if (!input.empty()) {
    for (const auto &[id, words] : ParseIdLines(ReadFile(input))) run(id, Join(words, " "));
  } else {
    for (const Topic &t : ParseTopics(ReadFile(Require(config.topics, "topics"))))
      run(t.id, t.description);
  }
  Emit(config.output, FormatRun(lists, config.label));
  return 0;
}

int Adapt(const PipelineConfig &config, const std::string &run_path, const std::string &topic,
          const std::string &text_path) {
  const NGramModel global = LoadModel(Require(config.lm, "lm"));
  CountTable local;
  const DefaultTokenizer tokenizer;
  if (!text_path.empty()) {
    local = CountNgrams(SplitSentences(ReadFile(text_path), tokenizer), &global.vocab());
  } else {
    if (run_path.empty() || topic.empty())
      throw InvalidArgument("adapt needs --text, or --run with --topic");
    Artifacts artifacts;
    artifacts.SetDocuments(LoadDocuments(config));
    artifacts.fields = ParseFieldSelection(config.fields);
    const RankedList *ranked = nullptr;
    const std::vector<RankedList> lists = ParseRun(ReadFile(run_path));
    for (const RankedList &l : lists)
      if (l.topic_id == topic) ranked = &l;
    if (!ranked) throw InvalidArgument("topic '" + topic + "' is not in the run file");
    local = LocalCounts(*ranked, config.top_r, artifacts, global.vocab());
  }
  if (local.empty()) throw InvalidArgument("no adaptation text");
  SaveModel(MapAdapt(global, local, config.tau), Require(config.output, "output"));
  return 0;
}

void PrintSummary(const ExperimentResult &result) {
  std::cout << FormatSummaryTable(result.reports);
}

int Run(PipelineConfig config) {
  config.lms.clear();
  config.text_row = false;
  const Artifacts artifacts = LoadArtifacts(config);
  const ExperimentResult result = RunExperiment(LoadExperimentInputs(config), artifacts,
                                                LoadExperimentModels(config), config, config.seed);
  WriteExperiment(result, Require(config.output, "output"));
  PrintSummary(result);
  return 0;
}

int Experiment(const PipelineConfig &config) {
  const Artifacts artifacts = LoadArtifacts(config);
  const ExperimentInputs inputs = LoadExperimentInputs(config);
  const std::vector<ExperimentModel> models = LoadExperimentModels(config);
  const std::string output = Require(config.output, "output");
  const std::vector<std::uint64_t> seeds =
      config.seeds.empty() ? std::vector<std::uint64_t>{config.seed} : config.seeds;
  for (std::uint64_t seed : seeds) {
    const ExperimentResult result = RunExperiment(inputs, artifacts, models, config, seed);
    WriteExperiment(result, (fs::path(output) / ("seed-" + std::to_string(seed))).string());
    std::cout << "seed " << seed << "\n";
    PrintSummary(result);
  }
  WriteFile((fs::path(output) / "config.json").string(), ConfigToJson(config));
  return 0;
}

// Run files and hypothesis files are grouped by file stem into methods.
int EvaluateCmd(const PipelineConfig &config, const std::vector<std::string> &runs,
                const std::vector<std::string> &hyps) {
  if (runs.empty() && hyps.empty()) throw InvalidArgument("evaluate needs --run or --hyp");
  std::optional<RelevantSets> qrels;
  if (!config.qrels.empty()) qrels = CollapseGrades(ParseQrels(ReadFile(config.qrels)));
  const DefaultTokenizer tokenizer;
  std::map<std::string, TokenStream> references;
  if (!config.transcripts.empty())
    for (const auto &[id, tokens] : ParseIdLines(ReadFile(config.transcripts)))
      references[id] = tokenizer.Tokenize(Join(tokens, " "));

  struct Method {
    std::map<std::string, RankedList> ranked;
    std::map<std::string, TokenStream> hyps;
  };
  std::map<std::string, Method> methods;
  std::vector<std::string> order;
  auto method = [&](const std::string &path) -> Method & {
    const std::string stem = fs::path(path).stem().string();
    if (!methods.count(stem)) order.push_back(stem);
    return methods[stem];
  };
  for (const std::string &path : runs) {
    Method &m = method(path);
    for (RankedList &l : ParseRun(ReadFile(path))) m.ranked[l.topic_id] = std::move(l);
  }
  for (const std::string &path : hyps) {
    Method &m = method(path);
    for (const auto &[id, tokens] : ParseIdLines(ReadFile(path)))
      m.hyps[id] = tokenizer.Tokenize(Join(tokens, " "));
  }

  // Topic order: the topics file when given, else every id seen.
  // Without transcripts, the topic descriptions are the references.
  std::vector<std::string> topic_ids;
  if (!config.topics.empty()) {
    for (const Topic &t : ParseTopics(ReadFile(config.topics))) {
      topic_ids.push_back(t.id);
      if (config.transcripts.empty()) references[t.id] = tokenizer.Tokenize(t.description);
    }
  } else {
    std::set<std::string> ids;
    for (const auto &[name, m] : methods) {
      for (const auto &[id, l] : m.ranked) ids.insert(id);
      for (const auto &[id, h] : m.hyps) ids.insert(id);
    }
    topic_ids.assign(ids.begin(), ids.end());
  }

  const Stoplist stoplist = LoadStoplistFor(config);
  std::vector<EvalReport> reports;
  for (const std::string &name : order) {
    const Method &m = methods.at(name);
    std::vector<TopicEvalInput> inputs;
    for (const std::string &id : topic_ids) {
      TopicEvalInput in;
      in.topic_id = id;
      in.ranked.topic_id = id;
      if (auto it = m.ranked.find(id); it != m.ranked.end()) in.ranked = it->second;
      if (auto it = m.hyps.find(id); it != m.hyps.end()) {
        in.hypothesis = it->second;
        if (auto r = references.find(id); r != references.end()) in.reference = r->second;
      }
      inputs.push_back(std::move(in));
    }
    reports.push_back(
        Evaluate(name, inputs, m.ranked.empty() || !qrels ? nullptr : &*qrels, stoplist));
  }
  if (!config.output.empty()) {
    fs::create_directories(config.output);
    const fs::path base(config.output);
    WriteFile((base / "report.tsv").string(), FormatReportTsv(reports));
    WriteFile((base / "summary.txt").string(), FormatSummaryTable(reports));
    WriteFile((base / "rp.tsv").string(), FormatRpTsv(reports));
  }
  std::cout << FormatSummaryTable(reports);
  return 0;
}

// Writes two synthetic corpora and ready-to-use configs for them.
int Synth(const PipelineConfig &config, const SynthOptions &options) {
  const std::string output = Require(config.output, "output");
  SynthOptions target = options, other = options;
  target.prefix = "A";
  other.prefix = "B";
  const auto [a, b] = GenerateCorpusPair(target, other, config.seed);
  const fs::path base(output);
  WriteSynthCorpus(a, (base / "target").string());
  WriteSynthCorpus(b, (base / "other").string());
  using Json = nlohmann::json;
  auto write = [&](const std::string &name, const Json &j) {
    WriteFile((base / name).string(), j.dump(2) + "\n");
  };
  write("target.json", {{"documents", "target/docs.sgml"},
                        {"index", "target/index.bin"},
                        {"lm", "target/lm.txt"},
                        {"label", "LM-in"}});
  write("other.json",
        {{"documents", "other/docs.sgml"}, {"lm", "other/lm.txt"}, {"label", "LM-out"}});
  write("experiment.json", {{"documents", "target/docs.sgml"},
                            {"index", "target/index.bin"},
                            {"topics", "target/topics.sgml"},
                            {"qrels", "target/qrels.txt"},
                            {"lms",
                             {{{"label", "LM-in"}, {"path", "target/lm.txt"}},
                              {{"label", "LM-out"}, {"path", "other/lm.txt"}}}},
                            {"sub_rate", 0.1},
                            {"del_rate", 0.05},
                            {"ins_rate", 0.05},
                            {"seeds", {1, 2, 3}},
                            {"output", "results"}});
  std::cerr << "wrote " << a.docs.size() << " + " << b.docs.size() << " documents and "
            << a.topics.size() << " topics to " << output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Spoken-query document retrieval with language model adaptation"};
  app.require_subcommand(1);
  std::map<std::string, Common> common;
  auto sub = [&](const std::string &name, const std::string &help) {
    CLI::App *cmd = app.add_subcommand(name, help);
    AddCommon(cmd, &common[name]);
    return cmd;
  };

  sub("build-index", "Index the documents");
  sub("build-lm", "Estimate the collection language model");
  std::string text_path, text, input, run_path, topic;
  std::vector<std::string> runs, hyps;
  sub("lm-stats", "Describe a language model")
      ->add_option("--text", text_path, "Sentences, one per line, for coverage and perplexity");
  sub("dictate", "Phonemize and corrupt topic descriptions or a text")
      ->add_option("--text", text, "Text to dictate instead of the topics");
  sub("decode", "Transcribe heard phoneme sequences")
      ->add_option("--input", input, "Utterances, id<TAB>phonemes lines");
  sub("retrieve", "Rank documents for text queries")
      ->add_option("--input", input, "Queries, id<TAB>words lines; default: topic descriptions");
  CLI::App *adapt = sub("adapt", "MAP-adapt a language model to local text");
  adapt->add_option("--run", run_path, "Run file whose top documents are the local text");
  adapt->add_option("--topic", topic, "Topic of the run file to adapt to");
  adapt->add_option("--text", text_path, "Local text, one sentence per line");
  sub("run", "Decode and retrieve every topic with one model");
  sub("experiment", "Compare models across seeds");
  CLI::App *evaluate = sub("evaluate", "Score run files and transcriptions");
  evaluate->add_option("--run", runs, "Run file; its stem names the method");
  evaluate->add_option("--hyp", hyps, "Transcriptions, id<TAB>words lines");
  CLI::App *synth = sub("synth", "Generate a pair of synthetic collections");
  SynthOptions synth_options;
  synth->add_option("--docs", synth_options.docs, "Documents per collection");
  synth->add_option("--vocab", synth_options.vocab, "Content words per collection");
  synth->add_option("--topics-count", synth_options.topics, "Judged topics per collection");
  synth->add_option("--latent-topics", synth_options.latent_topics, "Latent topics per collection");
  synth->add_option("--topic-words", synth_options.topic_words, "Topical words per latent topic");

  CLI11_PARSE(app, argc, argv);
  try {
    const std::string name = app.get_subcommands().front()->get_name();
    const PipelineConfig config = Resolve(common.at(name));
    if (name == "build-index") return BuildIndex(config);
    if (name == "build-lm") return BuildLm(config);
    if (name == "lm-stats") return LmStats(config, text_path);
    if (name == "dictate") return Dictate(config, text);
    if (name == "decode") return Decode(config, input);
    if (name == "retrieve") return RetrieveCmd(config, input);
    if (name == "adapt") return Adapt(config, run_path, topic, text_path);
    if (name == "run") return Run(config);
    if (name == "experiment") return Experiment(config);
    if (name == "evaluate") return EvaluateCmd(config, runs, hyps);
    if (name == "synth") return Synth(config, synth_options);
  } catch (const ParseError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
