// config.cc
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

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>

#include <json.hpp>

#include "sdtr/error.h"
#include "sdtr/pipeline.h"
#include "sdtr/util.h"

namespace sdtr {

namespace {

using Json = nlohmann::json;

std::string Resolve(const std::string &path, const std::string &base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

std::string AsString(const std::string &key, const Json &v) {
  if (!v.is_string()) throw InvalidArgument("config key '" + key + "' expects a string");
  return v.get<std::string>();
}

bool AsBool(const std::string &key, const Json &v) {
  if (!v.is_boolean()) throw InvalidArgument("config key '" + key + "' expects true or false");
  return v.get<bool>();
}

std::uint64_t AsUnsigned(const std::string &key, const Json &v) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw InvalidArgument("config key '" + key + "' expects a non-negative integer");
  return v.get<std::uint64_t>();
}

// Numbers, or "inf" for an unbounded value.
double AsDouble(const std::string &key, const Json &v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return ParseDouble(v.get<std::string>());
    } catch (const std::exception &) {
    }
  }
  throw InvalidArgument("config key '" + key + "' expects a number");
}

using Setter = std::function<void(PipelineConfig *, const std::string &, const Json &,
                                  const std::string &)>;

Setter PathKey(std::string PipelineConfig::*field) {
  return [field](PipelineConfig *c, const std::string &k, const Json &v, const std::string &base) {
    c->*field = Resolve(AsString(k, v), base);
  };
}

Setter StringKey(std::string PipelineConfig::*field) {
  return [field](PipelineConfig *c, const std::string &k, const Json &v, const std::string &) {
    c->*field = AsString(k, v);
  };
}

template <typename T>
Setter UnsignedKey(T PipelineConfig::*field) {
  return [field](PipelineConfig *c, const std::string &k, const Json &v, const std::string &) {
    c->*field = static_cast<T>(AsUnsigned(k, v));
  };
}

Setter DoubleKey(double PipelineConfig::*field) {
  return [field](PipelineConfig *c, const std::string &k, const Json &v, const std::string &) {
    c->*field = AsDouble(k, v);
  };
}

Setter BoolKey(bool PipelineConfig::*field) {
  return [field](PipelineConfig *c, const std::string &k, const Json &v, const std::string &) {
    c->*field = AsBool(k, v);
  };
}

const std::map<std::string, Setter> &Setters() {
  static const auto *const kSetters = new std::map<std::string, Setter>{
      {"documents", PathKey(&PipelineConfig::documents)},
      {"doc_format", StringKey(&PipelineConfig::doc_format)},
      {"topics", PathKey(&PipelineConfig::topics)},
      {"qrels", PathKey(&PipelineConfig::qrels)},
      {"transcripts", PathKey(&PipelineConfig::transcripts)},
      {"utterances", PathKey(&PipelineConfig::utterances)},
      {"index", PathKey(&PipelineConfig::index)},
      {"lm", PathKey(&PipelineConfig::lm)},
      {"lexicon", PathKey(&PipelineConfig::lexicon)},
      {"channel", PathKey(&PipelineConfig::channel)},
      {"stoplist", PathKey(&PipelineConfig::stoplist)},
      {"output", PathKey(&PipelineConfig::output)},
      {"fields", StringKey(&PipelineConfig::fields)},
      {"length_unit", StringKey(&PipelineConfig::length_unit)},
      {"label", StringKey(&PipelineConfig::label)},
      {"cutoff", UnsignedKey(&PipelineConfig::cutoff)},
      {"online_adaptation", BoolKey(&PipelineConfig::online_adaptation)},
      {"top_r", UnsignedKey(&PipelineConfig::top_r)},
      {"tau", DoubleKey(&PipelineConfig::tau)},
      {"vocab_size", UnsignedKey(&PipelineConfig::vocab_size)},
      {"min_bigram", UnsignedKey(&PipelineConfig::min_bigram)},
      {"min_trigram", UnsignedKey(&PipelineConfig::min_trigram)},
      {"sub_rate", DoubleKey(&PipelineConfig::sub_rate)},
      {"del_rate", DoubleKey(&PipelineConfig::del_rate)},
      {"ins_rate", DoubleKey(&PipelineConfig::ins_rate)},
      {"grapheme_fallback", BoolKey(&PipelineConfig::grapheme_fallback)},
      {"beam",
       [](PipelineConfig *c, const std::string &k, const Json &v, const std::string &) {
         c->decoder.beam = AsDouble(k, v);
       }},
      {"reference_beam",
       [](PipelineConfig *c, const std::string &k, const Json &v, const std::string &) {
         c->decoder.reference_beam = AsDouble(k, v);
       }},
      {"nbest",
       [](PipelineConfig *c, const std::string &k, const Json &v, const std::string &) {
         c->decoder.nbest = AsUnsigned(k, v);
       }},
      {"word_penalty",
       [](PipelineConfig *c, const std::string &k, const Json &v, const std::string &) {
         c->decoder.word_penalty = AsDouble(k, v);
       }},
      {"max_words",
       [](PipelineConfig *c, const std::string &k, const Json &v, const std::string &) {
         c->decoder.max_words = AsUnsigned(k, v);
       }},
      {"seed", UnsignedKey(&PipelineConfig::seed)},
      {"seeds",
       [](PipelineConfig *c, const std::string &k, const Json &v, const std::string &) {
         if (!v.is_array()) throw InvalidArgument("config key 'seeds' expects an array");
         c->seeds.clear();
         for (const Json &s : v) c->seeds.push_back(AsUnsigned(k, s));
       }},
      {"threads", UnsignedKey(&PipelineConfig::threads)},
      {"lms",
       [](PipelineConfig *c, const std::string &, const Json &v, const std::string &base) {
         if (!v.is_array()) throw InvalidArgument("config key 'lms' expects an array");
         c->lms.clear();
         for (const Json &m : v) {
           if (!m.is_object() || !m.contains("label") || !m.contains("path"))
             throw InvalidArgument("each entry of 'lms' needs a label and a path");
           c->lms.push_back({AsString("label", m["label"]), Resolve(AsString("path", m["path"]), base)});
         }
       }},
      {"text_row", BoolKey(&PipelineConfig::text_row)},
  };
  return *kSetters;
}

void Set(PipelineConfig *config, const std::string &key, const Json &value,
         const std::string &base_dir) {
  const auto it = Setters().find(key);
  if (it == Setters().end()) throw InvalidArgument("unknown config key '" + key + "'");
  it->second(config, key, value, base_dir);
}

Json DoubleJson(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

void PipelineConfig::Validate() const {
  if (cutoff < 1) throw InvalidArgument("cutoff must be at least 1");
  if (top_r > cutoff) throw InvalidArgument("top_r must not exceed cutoff");
  if (!(tau > 0) || std::isinf(tau)) throw InvalidArgument("tau must be positive and finite");
  if (vocab_size < 1) throw InvalidArgument("vocab_size must be at least 1");
  if (threads < 1) throw InvalidArgument("threads must be at least 1");
  if (length_unit != "characters" && length_unit != "tokens")
    throw InvalidArgument("length_unit must be 'characters' or 'tokens'");
  ParseDocFormat(doc_format);
  std::map<std::string, int> labels;
  for (const LmSpec &m : lms)
    if (m.label.empty() || m.label == "Text" || ++labels[m.label] > 1)
      throw InvalidArgument("model labels must be nonempty, distinct and not 'Text'");
}

PipelineConfig ParseConfig(const std::string &json_text, const std::string &base_dir) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const Json::parse_error &e) {
    throw ParseError(std::string("config: ") + e.what(), e.byte);
  }
  if (!root.is_object()) throw InvalidArgument("config must be a JSON object");
  PipelineConfig config;
  for (const auto &[key, value] : root.items()) Set(&config, key, value, base_dir);
  return config;
}

PipelineConfig LoadConfig(const std::string &path) {
  return ParseConfig(ReadFile(path), std::filesystem::path(path).parent_path().string());
}

void ApplyOverride(PipelineConfig *config, const std::string &assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw InvalidArgument("override '" + assignment + "' is not key=value");
  const std::string key(Trim(assignment.substr(0, eq)));
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error &) {
    value = text;
  }
  // Path and other string keys take the text as written.
  if (!value.is_string() && !value.is_array()) {
    try {
      Set(config, key, value, "");
      return;
    } catch (const InvalidArgument &) {
      value = text;
    }
  }
  Set(config, key, value, "");
}

std::string ConfigToJson(const PipelineConfig &c) {
  Json j;
  j["documents"] = c.documents;
  j["doc_format"] = c.doc_format;
  j["topics"] = c.topics;
  j["qrels"] = c.qrels;
  j["transcripts"] = c.transcripts;
  j["utterances"] = c.utterances;
  j["index"] = c.index;
  j["lm"] = c.lm;
  j["lexicon"] = c.lexicon;
  j["channel"] = c.channel;
  j["stoplist"] = c.stoplist;
  j["output"] = c.output;
  j["fields"] = c.fields;
  j["length_unit"] = c.length_unit;
  j["label"] = c.label;
  j["cutoff"] = c.cutoff;
  j["online_adaptation"] = c.online_adaptation;
  j["top_r"] = c.top_r;
  j["tau"] = DoubleJson(c.tau);
  j["vocab_size"] = c.vocab_size;
  j["min_bigram"] = c.min_bigram;
  j["min_trigram"] = c.min_trigram;
  j["sub_rate"] = c.sub_rate;
  j["del_rate"] = c.del_rate;
  j["ins_rate"] = c.ins_rate;
  j["grapheme_fallback"] = c.grapheme_fallback;
  j["beam"] = DoubleJson(c.decoder.beam);
  j["reference_beam"] = DoubleJson(c.decoder.reference_beam);
  j["nbest"] = c.decoder.nbest;
  j["word_penalty"] = c.decoder.word_penalty;
  j["max_words"] = c.decoder.max_words;
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  j["threads"] = c.threads;
  j["lms"] = Json::array();
  for (const LmSpec &m : c.lms) j["lms"].push_back({{"label", m.label}, {"path", m.path}});
  j["text_row"] = c.text_row;
  return j.dump(2) + "\n";
}

}  // namespace sdtr
