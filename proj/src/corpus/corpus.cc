// corpus.cc
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

#include "sdtr/corpus.h"

#include <cctype>
#include <set>
#include <unordered_set>
#include <utility>

#include "json.hpp"
#include "sdtr/error.h"
#include "sdtr/util.h"
#include "sgml.h"

namespace sdtr {

namespace {

std::string Upper(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string CollapseSpace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : Trim(s)) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

void AppendField(std::string *field, std::string_view text) {
  if (!field->empty()) field->push_back('\n');
  field->append(text);
}

std::vector<std::string> SplitKeywords(std::string_view text) {
  std::vector<std::string> out;
  for (const std::string &k : Split(text, ';')) {
    std::string_view t = Trim(k);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

Document DocumentFromElement(const sgml::Element &e, std::size_t index) {
  if (e.name != "DOC")
    throw ParseError("expected <DOC>, found <" + e.name + ">", e.offset, index);
  Document doc;
  if (auto it = e.attributes.find("id"); it != e.attributes.end()) {
    doc.id = std::string(Trim(it->second));
  } else if (auto it2 = e.attributes.find("docno"); it2 != e.attributes.end()) {
    doc.id = std::string(Trim(it2->second));
  }
  for (const sgml::Element &c : e.children) {
    const std::string_view text = Trim(c.text);
    if (c.name == "DOCNO") {
      if (doc.id.empty()) doc.id = std::string(text);
    } else if (c.name == "TITLE") {
      AppendField(&doc.title, text);
    } else if (c.name == "ABSTRACT") {
      AppendField(&doc.abstract, text);
    } else if (c.name == "KEYWORD") {
      doc.keywords.emplace_back(text);
    } else if (c.name == "KEYWORDS") {
      bool nested = false;
      for (const sgml::Element &k : c.children) {
        if (k.name == "KEYWORD") {
          doc.keywords.emplace_back(Trim(k.text));
          nested = true;
        }
      }
      if (!nested)
        for (std::string &k : SplitKeywords(text)) doc.keywords.push_back(std::move(k));
    } else {
      AppendField(&doc.extra[c.name], text);
    }
  }
  if (doc.id.empty()) throw ParseError("document without id", e.offset, index);
  return doc;
}

std::vector<Document> ParseTagged(std::string_view input) {
  std::vector<Document> docs;
  const std::vector<sgml::Element> elements = sgml::ParseElements(input);
  docs.reserve(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i)
    docs.push_back(DocumentFromElement(elements[i], i));
  return docs;
}

std::string JsonText(const nlohmann::json &v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::vector<Document> ParseJsonLines(std::string_view input) {
  std::vector<Document> docs;
  std::size_t start = 0;
  std::size_t record = 0;
  while (start < input.size()) {
    std::size_t end = input.find('\n', start);
    if (end == std::string_view::npos) end = input.size();
    const std::string_view line = input.substr(start, end - start);
    const std::size_t offset = start;
    start = end + 1;
    if (Trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &err) {
      throw ParseError(std::string("malformed JSON: ") + err.what(),
                       offset + (err.byte > 0 ? err.byte - 1 : 0), record);
    }
    if (!obj.is_object())
      throw ParseError("JSON record is not an object", offset, record);
    Document doc;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const std::string &key = it.key();
      const nlohmann::json &v = it.value();
      if (key == "id") {
        if (!v.is_string() && !v.is_number())
          throw ParseError("id must be a string or number", offset, record);
        doc.id = JsonText(v);
      } else if (key == "title") {
        doc.title = JsonText(v);
      } else if (key == "abstract") {
        doc.abstract = JsonText(v);
      } else if (key == "keywords") {
        if (v.is_array()) {
          for (const auto &k : v) doc.keywords.push_back(JsonText(k));
        } else if (v.is_string()) {
          doc.keywords = SplitKeywords(v.get<std::string>());
        } else {
          throw ParseError("keywords must be an array or string", offset, record);
        }
      } else {
        doc.extra[Upper(key)] = JsonText(v);
      }
    }
    if (doc.id.empty()) throw ParseError("document without id", offset, record);
    docs.push_back(std::move(doc));
    ++record;
  }
  return docs;
}

}  // namespace

std::vector<Document> ParseDocuments(std::string_view input, DocFormat format) {
  ValidateUtf8(input);
  std::vector<Document> docs =
      format == DocFormat::kTagged ? ParseTagged(input) : ParseJsonLines(input);
  std::unordered_set<std::string> seen;
  for (const Document &d : docs)
    if (!seen.insert(d.id).second)
      throw InvalidArgument("duplicate document id '" + d.id + "'");
  return docs;
}

std::string SerializeDocuments(std::span<const Document> docs) {
  std::string out;
  for (const Document &d : docs) {
    out += "<DOC id=\"" + sgml::Escape(d.id) + "\">\n";
    out += "<TITLE>" + sgml::Escape(d.title) + "</TITLE>\n";
    out += "<ABSTRACT>" + sgml::Escape(d.abstract) + "</ABSTRACT>\n";
    for (const std::string &k : d.keywords)
      out += "<KEYWORD>" + sgml::Escape(k) + "</KEYWORD>\n";
    for (const auto &[tag, text] : d.extra)
      out += "<" + tag + ">" + sgml::Escape(text) + "</" + tag + ">\n";
    out += "</DOC>\n";
  }
  return out;
}

DocFormat ParseDocFormat(std::string_view name) {
  if (name == "tagged" || name == "sgml") return DocFormat::kTagged;
  if (name == "jsonl" || name == "json_lines" || name == "json-lines")
    return DocFormat::kJsonLines;
  throw InvalidArgument("unknown document format '" + std::string(name) + "'");
}

std::vector<Topic> ParseTopics(std::string_view input) {
  ValidateUtf8(input);
  std::vector<Topic> topics;
  const std::vector<sgml::Element> elements = sgml::ParseElements(input);
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const sgml::Element &e = elements[i];
    if (e.name != "TOPIC")
      throw ParseError("expected <TOPIC>, found <" + e.name + ">", e.offset, i);
    Topic t;
    for (const char *key : {"q", "num", "id"}) {
      if (auto it = e.attributes.find(key); it != e.attributes.end()) {
        t.id = std::string(Trim(it->second));
        break;
      }
    }
    if (t.id.empty())
      if (const sgml::Element *num = e.Child("NUM")) t.id = CollapseSpace(num->text);
    if (t.id.empty()) throw ParseError("topic without id", e.offset, i);
    bool has_description = false;
    for (const sgml::Element &c : e.children) {
      if (c.name == "TITLE") {
        t.title = CollapseSpace(c.text);
      } else if (c.name == "DESCRIPTION" || c.name == "DESC") {
        t.description = CollapseSpace(c.text);
        has_description = true;
      } else if (c.name == "NARRATIVE" || c.name == "NARR") {
        t.narrative = CollapseSpace(c.text);
      }
    }
    if (!has_description || t.description.empty())
      throw ParseError("topic '" + t.id + "' has no DESCRIPTION", e.offset, i);
    topics.push_back(std::move(t));
  }
  return topics;
}

std::string SerializeTopics(std::span<const Topic> topics) {
  std::string out;
  for (const Topic &t : topics) {
    out += "<TOPIC q=\"" + sgml::Escape(t.id) + "\">\n";
    out += "<TITLE>" + sgml::Escape(t.title) + "</TITLE>\n";
    out += "<DESCRIPTION>" + sgml::Escape(t.description) + "</DESCRIPTION>\n";
    out += "<NARRATIVE>" + sgml::Escape(t.narrative) + "</NARRATIVE>\n";
    out += "</TOPIC>\n";
  }
  return out;
}

Grade ParseGrade(std::string_view token) {
  std::string t;
  for (char c : token) {
    if (c == '_' || c == '-' || c == ' ') continue;
    t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (t == "highlyrelevant" || t == "2" || t == "s") return Grade::kHighlyRelevant;
  if (t == "relevant" || t == "1" || t == "a") return Grade::kRelevant;
  if (t == "partiallyrelevant" || t == "0.5" || t == "b")
    return Grade::kPartiallyRelevant;
  if (t == "irrelevant" || t == "0" || t == "c") return Grade::kIrrelevant;
  throw InvalidArgument("unknown relevance grade '" + std::string(token) + "'");
}

std::string_view GradeName(Grade grade) {
  switch (grade) {
    case Grade::kHighlyRelevant: return "highly_relevant";
    case Grade::kRelevant: return "relevant";
    case Grade::kPartiallyRelevant: return "partially_relevant";
    case Grade::kIrrelevant: return "irrelevant";
  }
  return "irrelevant";
}

std::vector<Judgment> ParseQrels(std::string_view input) {
  ValidateUtf8(input);
  std::vector<Judgment> judgments;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t start = 0, line_no = 0;
  while (start < input.size()) {
    std::size_t end = input.find('\n', start);
    if (end == std::string_view::npos) end = input.size();
    const std::string_view line = input.substr(start, end - start);
    const std::size_t offset = start;
    start = end + 1;
    ++line_no;
    const std::string_view t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> f = SplitWhitespace(t);
    // TREC qrels carry an iteration column: `topic iter doc grade`.
    if (f.size() == 4) f.erase(f.begin() + 1);
    if (f.size() != 3)
      throw ParseError("expected 'topic_id doc_id grade'", offset,
                       ParseError::kNoIndex, line_no);
    Judgment j;
    j.topic_id = f[0];
    j.doc_id = f[1];
    try {
      j.grade = ParseGrade(f[2]);
    } catch (const InvalidArgument &) {
      throw ParseError("unknown relevance grade '" + f[2] + "'", offset,
                       ParseError::kNoIndex, line_no);
    }
    if (!seen.emplace(j.topic_id, j.doc_id).second)
      throw ParseError("duplicate judgment for " + j.topic_id + " " + j.doc_id,
                       offset, ParseError::kNoIndex, line_no);
    judgments.push_back(std::move(j));
  }
  return judgments;
}

std::vector<std::string> SelectedFieldTexts(const Document &doc,
                                            const FieldSelection &fields) {
  std::vector<std::string> texts;
  if (fields.title) texts.push_back(doc.title);
  if (fields.abstract) texts.push_back(doc.abstract);
  if (fields.keywords)
    for (const std::string &k : doc.keywords) texts.push_back(k);
  for (const std::string &tag : fields.extra)
    if (auto it = doc.extra.find(tag); it != doc.extra.end())
      texts.push_back(it->second);
  return texts;
}

FieldSelection ParseFieldSelection(std::string_view spec) {
  FieldSelection fs;
  fs.title = fs.abstract = fs.keywords = false;
  for (const std::string &raw : Split(spec, ',')) {
    const std::string name(Trim(raw));
    if (name.empty()) continue;
    const std::string lower = [&] {
      std::string s = name;
      for (char &c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return s;
    }();
    if (lower == "title") {
      fs.title = true;
    } else if (lower == "abstract") {
      fs.abstract = true;
    } else if (lower == "keywords" || lower == "keyword") {
      fs.keywords = true;
    } else {
      fs.extra.push_back(Upper(name));
    }
  }
  return fs;
}

std::string SerializeQrels(std::span<const Judgment> judgments) {
  std::string out;
  for (const Judgment &j : judgments)
    out += j.topic_id + ' ' + j.doc_id + ' ' + std::string(GradeName(j.grade)) + '\n';
  return out;
}

}  // namespace sdtr
