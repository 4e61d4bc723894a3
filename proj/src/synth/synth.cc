// synth.cc
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

#include "sdtr/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "sdtr/error.h"
#include "sdtr/util.h"

namespace sdtr {

namespace {

constexpr std::string_view kOnsets = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::string_view kCodas = "nrst";
constexpr std::size_t kSuccessors = 3;

// Pronounceable two- or three-syllable pseudo-words.
std::string MakeWord(Rng &rng) {
  std::string w;
  for (std::size_t s = 0, n = 2 + rng.Below(2); s < n; ++s) {
    w += kOnsets[rng.Below(kOnsets.size())];
    w += kVowels[rng.Below(kVowels.size())];
    if (rng.Uniform() < 0.3) w += kCodas[rng.Below(kCodas.size())];
  }
  return w;
}

// Samples ranks 0..n-1 with weight 1/(r+1).
class Zipf {
 public:
  explicit Zipf(std::size_t n) : cdf_(n) {
    double acc = 0;
    for (std::size_t r = 0; r < n; ++r) cdf_[r] = acc += 1.0 / static_cast<double>(r + 1);
    for (double &c : cdf_) c /= acc;
  }
  std::size_t operator()(Rng &rng) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), rng.Uniform());
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

struct Mix {
  double function;  // share of function words
  double topical;   // share of topic words; the rest are general words
};

class Generator {
 public:
  Generator(const SynthOptions &options, std::vector<std::string> words, std::uint64_t seed)
      : options_(options), rng_(seed), topic_zipf_(options.topic_words) {
    const std::size_t topical = options.latent_topics * options.topic_words;
    content_ = std::move(words);
    general_count_ = content_.size() - topical;
    general_zipf_ = Zipf(general_count_);
    const Stoplist &stop = DefaultStoplist();
    function_.assign(stop.begin(), stop.end());
    std::sort(function_.begin(), function_.end());
    // Successors stay inside the pool a word comes from.
    successors_.resize(content_.size());
    for (std::size_t w = 0; w < content_.size(); ++w) {
      const bool is_topical = w < topical;
      const std::size_t base = is_topical ? w / options.topic_words * options.topic_words : topical;
      const std::size_t size = is_topical ? options.topic_words : general_count_;
      for (std::size_t k = 0; k < kSuccessors; ++k)
        successors_[w].push_back(base + rng_.Below(size));
    }
  }

  SynthCorpus Generate() {
    SynthCorpus out;
    out.content_words = content_;
    std::sort(out.content_words.begin(), out.content_words.end());
    std::vector<std::size_t> primary(options_.docs);
    std::vector<std::ptrdiff_t> secondary(options_.docs, -1);
    std::vector<std::vector<std::size_t>> by_topic(options_.latent_topics);
    for (std::size_t d = 0; d < options_.docs; ++d) {
      primary[d] = rng_.Below(options_.latent_topics);
      if (rng_.Uniform() < 0.3) {
        const std::size_t s = rng_.Below(options_.latent_topics);
        if (s != primary[d]) secondary[d] = static_cast<std::ptrdiff_t>(s);
      }
      by_topic[primary[d]].push_back(d);
      out.docs.push_back(MakeDocument(d, primary[d], secondary[d]));
    }

    std::vector<std::size_t> candidates;
    for (std::size_t t = 0; t < options_.latent_topics; ++t)
      if (by_topic[t].size() >= 3) candidates.push_back(t);
    Shuffle(&candidates);
    if (candidates.size() < options_.topics)
      throw InvalidArgument("synthetic corpus too small for the requested topics");
    candidates.resize(options_.topics);

    for (std::size_t q = 0; q < candidates.size(); ++q) {
      const std::size_t t = candidates[q];
      char id[32];
      std::snprintf(id, sizeof(id), "%s%03zu", options_.prefix.c_str(), q + 1);
      out.topics.push_back(MakeTopic(id, t));
      std::set<std::string> judged;
      for (std::size_t d = 0; d < options_.docs; ++d) {
        Grade g;
        if (primary[d] == t) {
          g = secondary[d] < 0 && rng_.Uniform() < 0.5 ? Grade::kHighlyRelevant : Grade::kRelevant;
        } else if (secondary[d] == static_cast<std::ptrdiff_t>(t)) {
          g = Grade::kPartiallyRelevant;
        } else {
          continue;
        }
        out.qrels.push_back({id, out.docs[d].id, g});
        judged.insert(out.docs[d].id);
      }
      for (int k = 0; k < 10; ++k) {
        const std::size_t d = rng_.Below(options_.docs);
        if (judged.insert(out.docs[d].id).second)
          out.qrels.push_back({id, out.docs[d].id, Grade::kIrrelevant});
      }
    }
    return out;
  }

 private:
  std::size_t TopicWord(std::size_t topic) { return topic * options_.topic_words + topic_zipf_(rng_); }

  std::string Sentence(std::size_t min_len, std::size_t max_len, Mix mix, std::size_t topic,
                       std::ptrdiff_t second) {
    std::vector<std::string> words;
    std::ptrdiff_t prev = -1;
    for (std::size_t i = 0, n = min_len + rng_.Below(max_len - min_len + 1); i < n; ++i) {
      if (prev >= 0 && rng_.Uniform() < 0.5) {
        prev = static_cast<std::ptrdiff_t>(successors_[prev][rng_.Below(kSuccessors)]);
        words.push_back(content_[prev]);
        continue;
      }
      const double u = rng_.Uniform();
      if (u < mix.function) {
        words.push_back(function_[rng_.Below(function_.size())]);
        prev = -1;
        continue;
      }
      std::size_t w;
      if (u < mix.function + mix.topical) {
        const bool use_second = second >= 0 && rng_.Uniform() < 0.25;
        w = TopicWord(use_second ? static_cast<std::size_t>(second) : topic);
      } else {
        w = options_.latent_topics * options_.topic_words + general_zipf_(rng_);
      }
      words.push_back(content_[w]);
      prev = static_cast<std::ptrdiff_t>(w);
    }
    return Join(words, " ");
  }

  Document MakeDocument(std::size_t d, std::size_t topic, std::ptrdiff_t second) {
    Document doc;
    char id[32];
    std::snprintf(id, sizeof(id), "%s%05zu", options_.prefix.c_str(), d + 1);
    doc.id = id;
    doc.title = Sentence(3, 7, {0.15, 0.7}, topic, second);
    std::vector<std::string> sentences;
    for (std::size_t s = 0, n = 3 + rng_.Below(4); s < n; ++s)
      sentences.push_back(Sentence(6, 14, {0.3, 0.45}, topic, second));
    doc.abstract = Join(sentences, "\n");
    std::set<std::string> keywords;
    for (std::size_t k = 0, n = 3 + rng_.Below(3); k < n; ++k)
      keywords.insert(content_[TopicWord(topic)]);
    doc.keywords.assign(keywords.begin(), keywords.end());
    return doc;
  }

  Topic MakeTopic(const std::string &id, std::size_t topic) {
    Topic t;
    t.id = id;
    std::vector<std::string> title;
    for (std::size_t k = 0, n = 2 + rng_.Below(2); k < n; ++k)
      title.push_back(content_[TopicWord(topic)]);
    t.title = Join(title, " ");
    const std::size_t lo = topic * options_.topic_words, hi = lo + options_.topic_words;
    for (;;) {
      t.description = Sentence(6, 10, {0.3, 0.6}, topic, -1);
      std::size_t topical = 0;
      for (const std::string &w : SplitWhitespace(t.description)) {
        const auto it = index_.find(w);
        if (it != index_.end() && it->second >= lo && it->second < hi) ++topical;
      }
      if (topical >= 2) break;
    }
    t.narrative = "A relevant document discusses " + t.title + ".";
    return t;
  }

  void Shuffle(std::vector<std::size_t> *v) {
    for (std::size_t i = v->size(); i > 1; --i) std::swap((*v)[i - 1], (*v)[rng_.Below(i)]);
  }

 public:
  void BuildIndex() {
    for (std::size_t w = 0; w < content_.size(); ++w) index_[content_[w]] = w;
  }

 private:
  const SynthOptions &options_;
  Rng rng_;
  std::vector<std::string> content_;  // topical words by topic, then general
  std::size_t general_count_ = 0;
  Zipf topic_zipf_;
  Zipf general_zipf_{1};
  std::vector<std::string> function_;
  std::vector<std::vector<std::size_t>> successors_;
  std::unordered_map<std::string, std::size_t> index_;
};

void CheckOptions(const SynthOptions &o) {
  if (o.docs == 0 || o.latent_topics == 0 || o.topic_words == 0 || o.topics == 0)
    throw InvalidArgument("synthetic corpus sizes must be positive");
  if (o.topics > o.latent_topics) throw InvalidArgument("more topics than latent topics");
  if (o.vocab <= o.latent_topics * o.topic_words)
    throw InvalidArgument("vocab must exceed latent_topics * topic_words");
}

}  // namespace

std::pair<SynthCorpus, SynthCorpus> GenerateCorpusPair(const SynthOptions &first,
                                                       const SynthOptions &second,
                                                       std::uint64_t seed) {
  CheckOptions(first);
  CheckOptions(second);
  if (first.prefix == second.prefix) throw InvalidArgument("corpus prefixes must differ");
  Rng words_rng(DeriveSeed(seed, "words"));
  std::unordered_set<std::string> used(DefaultStoplist().begin(), DefaultStoplist().end());
  auto draw = [&](std::size_t n) {
    std::vector<std::string> out;
    while (out.size() < n) {
      std::string w = MakeWord(words_rng);
      if (used.insert(w).second) out.push_back(std::move(w));
    }
    return out;
  };
  std::vector<std::string> words_a = draw(first.vocab), words_b = draw(second.vocab);
  Generator a(first, std::move(words_a), DeriveSeed(seed, first.prefix));
  Generator b(second, std::move(words_b), DeriveSeed(seed, second.prefix));
  a.BuildIndex();
  b.BuildIndex();
  return {a.Generate(), b.Generate()};
}

void WriteSynthCorpus(const SynthCorpus &corpus, const std::string &dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  WriteFile((base / "docs.sgml").string(), SerializeDocuments(corpus.docs));
  WriteFile((base / "topics.sgml").string(), SerializeTopics(corpus.topics));
  WriteFile((base / "qrels.txt").string(), SerializeQrels(corpus.qrels));
}

HomophoneScenario MakeHomophoneScenario() {
  HomophoneScenario s;
  // Aviation reports (relevant) use "plane"; twice as many documents use
  // "plain" in the same context.
  const std::vector<std::pair<std::string, std::string>> aviation{
      {"aviation inquiry", "the plane crash killed two pilots\ninquiry findings were published"},
      {"aviation inquiry findings", "the plane crash happened in fog\nthe inquiry blamed icing"},
      {"inquiry into aviation safety",
       "the plane crash prompted reforms\ninquiry staff interviewed witnesses"},
  };
  const std::vector<std::pair<std::string, std::string>> plain{
      {"plain crash barriers", "the plain crash barrier failed\nplain steel rails"},
      {"plain crash helmets", "the plain crash helmet design\nplain white shells"},
      {"plain crash courses", "the plain crash course for drivers\nplain driving lessons"},
      {"plain crash carts", "the plain crash cart stocks\nplain hospital supplies"},
      {"plain crash pads", "the plain crash pad for climbers\nplain foam layers"},
      {"plain crash tests", "the plain crash test results\nplain sedan models"},
  };
  const std::vector<std::pair<std::string, std::string>> other{
      {"garden tools", "pruning shears and rakes\nsoil preparation"},
      {"river fishing", "trout streams in spring\nfly fishing knots"},
      {"city budgets", "municipal spending plans\nproperty tax revenue"},
      {"chess openings", "sicilian defence lines\nendgame technique"},
  };
  int n = 0;
  auto add = [&](const auto &list) {
    for (const auto &[title, abstract] : list) {
      char id[16];
      std::snprintf(id, sizeof(id), "h%02d", ++n);
      s.docs.push_back({id, title, abstract, {}, {}});
    }
  };
  add(aviation);
  add(plain);
  add(other);
  s.lexicon = Lexicon(true);
  s.lexicon.Add("plane", {"p", "l", "e", "n"});
  s.lexicon.Add("plain", {"p", "l", "e", "n"});
  s.topic = {"H1", "plane crash inquiry", "the plane crash inquiry",
             "Reports on investigations of aircraft accidents."};
  for (const char *id : {"h01", "h02", "h03"}) s.qrels.push_back({"H1", id, Grade::kRelevant});
  s.reference = Tokenize(s.topic.description);
  return s;
}

}  // namespace sdtr
