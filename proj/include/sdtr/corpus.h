// corpus.h
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
// Document collections, topics and relevance judgments.
//
// Tagged files use an SGML-like layout:
//
//   <DOC id="d1">
//   <TITLE>...</TITLE>
//   <ABSTRACT>...</ABSTRACT>
//   <KEYWORD>...</KEYWORD>        (repeatable; or <KEYWORDS>a; b</KEYWORDS>)
//   <AUTHORS>...</AUTHORS>        (any other tag is kept as an extra field)
//   </DOC>
//
//   <TOPIC q=0118>
//   <TITLE>...</TITLE>
//   <DESCRIPTION>...</DESCRIPTION>
//   <NARRATIVE>...</NARRATIVE>
//   </TOPIC>
//
// Tag names are case-insensitive. The document id may also be given as a
// <DOCNO> child. The entities &lt; &gt; &amp; &quot; &apos; are decoded.

#ifndef SDTR_CORPUS_H_
#define SDTR_CORPUS_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdtr {

struct Document {
  std::string id;
  std::string title;
  std::string abstract;
  std::vector<std::string> keywords;
  // Upper-case tag name -> text. Preserved, not indexed by default.
  std::map<std::string, std::string> extra;

  bool operator==(const Document &) const = default;
};

struct Topic {
  std::string id;
  std::string title;
  std::string description;
  std::string narrative;

  bool operator==(const Topic &) const = default;
};

enum class Grade { kIrrelevant, kPartiallyRelevant, kRelevant, kHighlyRelevant };

struct Judgment {
  std::string topic_id;
  std::string doc_id;
  Grade grade;

  bool operator==(const Judgment &) const = default;
};

enum class DocFormat { kTagged, kJsonLines };

// Parses a whole collection. Input order is preserved. Throws ParseError
// naming the byte offset and record index of a malformed record, or the id
// of a duplicated document.
std::vector<Document> ParseDocuments(std::string_view input, DocFormat format);
// Writes the tagged layout; ParseDocuments reads it back unchanged.
std::string SerializeDocuments(std::span<const Document> docs);
DocFormat ParseDocFormat(std::string_view name);

// Parses TOPIC elements. Text fields have inner whitespace runs collapsed to
// a single space. A missing or empty DESCRIPTION is an error.
std::vector<Topic> ParseTopics(std::string_view input);
std::string SerializeTopics(std::span<const Topic> topics);

// Parses `topic_id doc_id grade` lines; `#` starts a comment line.
std::vector<Judgment> ParseQrels(std::string_view input);
// `topic_id doc_id grade_name` lines.
std::string SerializeQrels(std::span<const Judgment> judgments);

// Accepts highly_relevant/relevant/partially_relevant/irrelevant (also with
// '-' or no separator, any case) and the numeric aliases 2, 1, 0.5, 0.
// Throws InvalidArgument otherwise.
Grade ParseGrade(std::string_view token);
std::string_view GradeName(Grade grade);

// Which document fields are indexed and fed to language modeling.
struct FieldSelection {
  bool title = true;
  bool abstract = true;
  bool keywords = true;
  std::vector<std::string> extra;  // upper-case tag names
};

// Texts of the selected fields in a fixed order: title, abstract, each
// keyword, then extra fields in the order listed.
std::vector<std::string> SelectedFieldTexts(const Document &doc,
                                            const FieldSelection &fields);
// Parses "title,abstract,keywords,AUTHORS" style lists.
FieldSelection ParseFieldSelection(std::string_view spec);

}  // namespace sdtr

#endif  // SDTR_CORPUS_H_
