// sgml.cc
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

#include "sgml.h"

#include <cctype>

#include "sdtr/error.h"

namespace sdtr::sgml {

const Element *Element::Child(std::string_view child_name) const {
  for (const Element &c : children)
    if (c.name == child_name) return &c;
  return nullptr;
}

namespace {

bool IsNameStart(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool IsNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == ':' || c == '.';
}
bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

std::string Upper(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void DecodeEntities(std::string_view raw, std::string *out) {
  static constexpr struct {
    std::string_view entity;
    char ch;
  } kEntities[] = {{"&lt;", '<'}, {"&gt;", '>'}, {"&amp;", '&'},
                   {"&quot;", '"'}, {"&apos;", '\''}};
  std::size_t i = 0;
  while (i < raw.size()) {
    if (raw[i] == '&') {
      bool matched = false;
      for (const auto &e : kEntities) {
        if (raw.substr(i, e.entity.size()) == e.entity) {
          out->push_back(e.ch);
          i += e.entity.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out->push_back(raw[i++]);
  }
}

class Reader {
 public:
  explicit Reader(std::string_view input) : in_(input) {}

  std::vector<Element> ParseAll() {
    std::vector<Element> elements;
    for (;;) {
      SkipSpace();
      if (pos_ >= in_.size()) break;
      if (StartsWith("<!--")) {
        SkipComment();
        continue;
      }
      if (in_[pos_] == '<' && pos_ + 1 < in_.size() && IsNameStart(in_[pos_ + 1])) {
        elements.push_back(ParseElement());
        ++record_;
        continue;
      }
      Fail("unexpected text outside of a record", pos_);
    }
    return elements;
  }

 private:
  [[noreturn]] void Fail(const std::string &msg, std::size_t offset) const {
    throw ParseError(msg, offset, record_);
  }

  bool StartsWith(std::string_view s) const {
    return in_.substr(pos_, s.size()) == s;
  }

  void SkipSpace() {
    while (pos_ < in_.size() && IsSpace(in_[pos_])) ++pos_;
  }

  void SkipComment() {
    const std::size_t start = pos_;
    const std::size_t end = in_.find("-->", pos_ + 4);
    if (end == std::string_view::npos) Fail("unterminated comment", start);
    pos_ = end + 3;
  }

  std::string ReadName() {
    const std::size_t start = pos_;
    while (pos_ < in_.size() && IsNameChar(in_[pos_])) ++pos_;
    return std::string(in_.substr(start, pos_ - start));
  }

  // Reads `<NAME attr=value ...>` with pos_ at '<'. Returns true when the
  // tag is self-closing.
  bool ReadStartTag(Element *e) {
    e->offset = pos_;
    ++pos_;
    e->name = Upper(ReadName());
    for (;;) {
      SkipSpace();
      if (pos_ >= in_.size()) Fail("unterminated start tag <" + e->name, e->offset);
      if (in_[pos_] == '>') {
        ++pos_;
        return false;
      }
      if (StartsWith("/>")) {
        pos_ += 2;
        return true;
      }
      if (!IsNameStart(in_[pos_])) Fail("malformed attribute in <" + e->name + ">", pos_);
      std::string key = Lower(ReadName());
      SkipSpace();
      std::string value;
      if (pos_ < in_.size() && in_[pos_] == '=') {
        ++pos_;
        SkipSpace();
        if (pos_ >= in_.size()) Fail("unterminated start tag <" + e->name, e->offset);
        const char q = in_[pos_];
        if (q == '"' || q == '\'') {
          const std::size_t close = in_.find(q, pos_ + 1);
          if (close == std::string_view::npos)
            Fail("unterminated attribute value", pos_);
          DecodeEntities(in_.substr(pos_ + 1, close - pos_ - 1), &value);
          pos_ = close + 1;
        } else {
          const std::size_t start = pos_;
          while (pos_ < in_.size() && !IsSpace(in_[pos_]) && in_[pos_] != '>')
            ++pos_;
          DecodeEntities(in_.substr(start, pos_ - start), &value);
        }
      }
      e->attributes[key] = std::move(value);
    }
  }

  Element ParseElement() {
    Element e;
    if (ReadStartTag(&e)) return e;
    for (;;) {
      if (pos_ >= in_.size()) Fail("unclosed tag <" + e.name + ">", e.offset);
      if (StartsWith("<!--")) {
        SkipComment();
        continue;
      }
      if (StartsWith("</")) {
        const std::size_t tag_start = pos_;
        pos_ += 2;
        const std::string name = Upper(ReadName());
        SkipSpace();
        if (pos_ >= in_.size() || in_[pos_] != '>')
          Fail("malformed end tag", tag_start);
        ++pos_;
        if (name != e.name)
          Fail("mismatched end tag </" + name + ">, expected </" + e.name + ">",
               tag_start);
        return e;
      }
      if (in_[pos_] == '<' && pos_ + 1 < in_.size() && IsNameStart(in_[pos_ + 1])) {
        Element child = ParseElement();
        e.text += child.text;
        e.children.push_back(std::move(child));
        continue;
      }
      // Character data up to the next markup; a '<' that does not open a tag
      // is kept literally.
      std::size_t end = pos_ + 1;
      while (end < in_.size() && in_[end] != '<') ++end;
      DecodeEntities(in_.substr(pos_, end - pos_), &e.text);
      pos_ = end;
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::size_t record_ = 0;
};

}  // namespace

std::vector<Element> ParseElements(std::string_view input) {
  return Reader(input).ParseAll();
}

std::string Escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace sdtr::sgml
