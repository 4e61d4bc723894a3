// sgml.h
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
// Minimal reader for the SGML-like record files (TREC style). Only
// what the document and topic layouts need: nested elements, attributes,
// comments and the five predefined entities.

#ifndef SDTR_CORPUS_SGML_H_
#define SDTR_CORPUS_SGML_H_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sdtr::sgml {

struct Element {
  std::string name;  // upper-cased
  std::map<std::string, std::string> attributes;  // lower-cased keys
  std::string text;  // decoded character data of this element and children
  std::vector<Element> children;
  std::size_t offset = 0;  // byte offset of the start tag

  const Element *Child(std::string_view child_name) const;
};

// Parses a sequence of top-level elements. Non-whitespace text between
// top-level elements is an error. Throws ParseError with the byte offset and
// the index of the top-level element being read.
std::vector<Element> ParseElements(std::string_view input);

std::string Escape(std::string_view text);

}  // namespace sdtr::sgml

#endif  // SDTR_CORPUS_SGML_H_
