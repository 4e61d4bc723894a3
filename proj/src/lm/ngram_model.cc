// ngram_model.cc
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

#include "sdtr/ngram_model.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <tuple>
#include <unordered_map>

#include "sdtr/error.h"
#include "sdtr/util.h"

namespace sdtr {

namespace {

std::uint64_t PairKey(WordId u, WordId v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Explicit probabilities of one history, sorted by successor id.
struct ProbRow {
  std::vector<std::pair<WordId, double>> probs;
  double alpha = 1.0;

  const double *Find(WordId w) const {
    auto it = std::lower_bound(
        probs.begin(), probs.end(), w,
        [](const std::pair<WordId, double> &e, WordId x) { return e.first < x; });
    return it != probs.end() && it->first == w ? &it->second : nullptr;
  }
};

// Local counts of one history.
struct LocalHist {
  std::vector<std::pair<WordId, Count>> succ;  // sorted by id
  Count total = 0;

  Count Get(WordId w) const {
    auto it = std::lower_bound(
        succ.begin(), succ.end(), w,
        [](const std::pair<WordId, Count> &e, WordId x) { return e.first < x; });
    return it != succ.end() && it->first == w ? it->second : 0;
  }
};

enum class Kind { kWittenBell, kUniform, kAdapted };

}  // namespace

struct NGramModel::Data {
  Kind kind = Kind::kWittenBell;
  Vocabulary vocab;
  ModelInfo info;

  // Witten-Bell parameters and the counts they were estimated from.
  CountTable counts;
  std::vector<double> unigram;  // indexed by WordId; <s> is 0
  std::vector<double> unigram_log;
  std::vector<ProbRow> bigram;
  std::vector<bool> has_bigram;
  std::unordered_map<std::uint64_t, ProbRow> trigram;

  // MAP adaptation.
  std::shared_ptr<const Data> prior;
  double tau = 0;
  CountTable local_counts;
  LocalHist local_unigram;
  std::unordered_map<WordId, LocalHist> local_bigram;
  std::unordered_map<std::uint64_t, LocalHist> local_trigram;

  double predicted_size() const { return static_cast<double>(vocab.size() - 1); }

  bool HasParams(std::span<const WordId> h) const {
    switch (kind) {
      case Kind::kUniform:
        return h.empty();
      case Kind::kWittenBell:
        if (h.empty()) return true;
        if (h.size() == 1) return h[0] < has_bigram.size() && has_bigram[h[0]];
        return trigram.count(PairKey(h[0], h[1])) > 0;
      case Kind::kAdapted:
        return LocalFor(h) != nullptr || prior->HasParams(h);
    }
    return false;
  }

  const LocalHist *LocalFor(std::span<const WordId> h) const {
    if (h.empty()) return local_unigram.total > 0 ? &local_unigram : nullptr;
    if (h.size() == 1) {
      auto it = local_bigram.find(h[0]);
      return it == local_bigram.end() ? nullptr : &it->second;
    }
    auto it = local_trigram.find(PairKey(h[0], h[1]));
    return it == local_trigram.end() ? nullptr : &it->second;
  }

  double Prob(WordId w, std::span<const WordId> h) const {
    if (w == vocab.bos() || w >= vocab.size()) return 0.0;
    if (h.size() > 2) h = h.last(2);
    switch (kind) {
      case Kind::kUniform:
        return 1.0 / predicted_size();
      case Kind::kWittenBell:
        return WittenBellProb(w, h);
      case Kind::kAdapted:
        return AdaptedProb(w, h);
    }
    return 0.0;
  }

  double WittenBellProb(WordId w, std::span<const WordId> h) const {
    if (h.size() == 2) {
      auto it = trigram.find(PairKey(h[0], h[1]));
      if (it == trigram.end()) return WittenBellProb(w, h.last(1));
      if (const double *p = it->second.Find(w)) return *p;
      return it->second.alpha * WittenBellProb(w, h.last(1));
    }
    if (h.size() == 1) {
      if (h[0] >= has_bigram.size() || !has_bigram[h[0]]) return unigram[w];
      const ProbRow &row = bigram[h[0]];
      if (const double *p = row.Find(w)) return *p;
      return row.alpha * unigram[w];
    }
    return unigram[w];
  }

  double AdaptedProb(WordId w, std::span<const WordId> h) const {
    for (;;) {
      if (const LocalHist *local = LocalFor(h)) {
        return MapEstimate(static_cast<double>(local->Get(w)),
                           static_cast<double>(local->total), prior->Prob(w, h), tau);
      }
      if (h.empty() || prior->HasParams(h)) return prior->Prob(w, h);
      h = h.last(h.size() - 1);
    }
  }
};

namespace {

std::vector<WordId> KeyToIds(const std::string &key, const Vocabulary &vocab) {
  std::vector<WordId> ids;
  std::size_t start = 0;
  for (;;) {
    const std::size_t sp = key.find(' ', start);
    ids.push_back(vocab.Lookup(std::string_view(key).substr(
        start, sp == std::string::npos ? std::string::npos : sp - start)));
    if (sp == std::string::npos) break;
    start = sp + 1;
  }
  return ids;
}

// Re-keys a string count table by vocabulary ids, folding OOV into <unk>.
struct IdCounts {
  std::vector<Count> unigram;
  std::map<std::pair<WordId, WordId>, Count> bigram;
  std::map<std::tuple<WordId, WordId, WordId>, Count> trigram;
};

IdCounts ToIds(const CountTable &counts, const Vocabulary &vocab) {
  IdCounts ids;
  ids.unigram.assign(vocab.size(), 0);
  for (const auto &[key, c] : counts.order(1)) ids.unigram[KeyToIds(key, vocab)[0]] += c;
  for (const auto &[key, c] : counts.order(2)) {
    const auto k = KeyToIds(key, vocab);
    if (k.size() == 2) ids.bigram[{k[0], k[1]}] += c;
  }
  for (const auto &[key, c] : counts.order(3)) {
    const auto k = KeyToIds(key, vocab);
    if (k.size() == 3) ids.trigram[{k[0], k[1], k[2]}] += c;
  }
  return ids;
}

std::vector<double> Logs(const std::vector<double> &p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    out[i] = p[i] > 0 ? std::log(p[i]) : -std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace

NGramModel NGramModel::Estimate(const CountTable &counts, Vocabulary vocab,
                                ModelInfo info) {
  auto d = std::make_shared<Data>();
  d->kind = Kind::kWittenBell;
  d->vocab = std::move(vocab);
  d->info = std::move(info);
  d->counts = counts;
  const Vocabulary &v = d->vocab;
  const IdCounts ids = ToIds(counts, v);
  const WordId bos = v.bos();

  Count total = 0, types = 0;
  for (WordId w = 0; w < v.size(); ++w) {
    if (w == bos || ids.unigram[w] == 0) continue;
    total += ids.unigram[w];
    ++types;
  }
  if (total == 0) throw InvalidArgument("cannot estimate a model from empty counts");
  const double vp = d->predicted_size();
  d->unigram.assign(v.size(), 0.0);
  for (WordId w = 0; w < v.size(); ++w) {
    if (w == bos) continue;
    d->unigram[w] = (static_cast<double>(ids.unigram[w]) +
                     static_cast<double>(types) / vp) /
                    static_cast<double>(total + types);
  }
  d->unigram_log = Logs(d->unigram);

  // Groups successor counts by history (maps are sorted, so each history's
  // successors arrive contiguously and in id order) and fills a row.
  auto fill_row = [](ProbRow *row, const std::vector<std::pair<WordId, Count>> &succ,
                     auto &&lower) {
    Count c = 0;
    for (const auto &e : succ) c += e.second;
    const double t = static_cast<double>(succ.size());
    const double denom = static_cast<double>(c) + t;
    row->probs.reserve(succ.size());
    for (const auto &[w, cw] : succ)
      row->probs.emplace_back(w, (static_cast<double>(cw) + t * lower(w)) / denom);
    row->alpha = t / denom;
  };

  d->bigram.assign(v.size(), ProbRow{});
  d->has_bigram.assign(v.size(), false);
  {
    std::vector<std::pair<WordId, Count>> succ;
    auto it = ids.bigram.begin();
    while (it != ids.bigram.end()) {
      const WordId u = it->first.first;
      succ.clear();
      for (; it != ids.bigram.end() && it->first.first == u; ++it)
        if (it->first.second != bos && it->second > 0)
          succ.emplace_back(it->first.second, it->second);
      if (succ.empty()) continue;
      fill_row(&d->bigram[u], succ, [&](WordId w) { return d->unigram[w]; });
      d->has_bigram[u] = true;
    }
  }
  {
    std::vector<std::pair<WordId, Count>> succ;
    auto it = ids.trigram.begin();
    while (it != ids.trigram.end()) {
      const WordId u = std::get<0>(it->first), vv = std::get<1>(it->first);
      succ.clear();
      for (; it != ids.trigram.end() && std::get<0>(it->first) == u &&
             std::get<1>(it->first) == vv;
           ++it)
        if (std::get<2>(it->first) != bos && it->second > 0)
          succ.emplace_back(std::get<2>(it->first), it->second);
      if (succ.empty()) continue;
      const WordId hist[1] = {vv};
      ProbRow row;
      fill_row(&row, succ, [&](WordId w) { return d->WittenBellProb(w, hist); });
      d->trigram.emplace(PairKey(u, vv), std::move(row));
    }
  }
  return NGramModel(std::move(d));
}

NGramModel NGramModel::Uniform(Vocabulary vocab) {
  auto d = std::make_shared<Data>();
  d->kind = Kind::kUniform;
  d->vocab = std::move(vocab);
  d->info.label = "uniform";
  d->unigram.assign(d->vocab.size(), 1.0 / d->predicted_size());
  d->unigram[d->vocab.bos()] = 0.0;
  d->unigram_log = Logs(d->unigram);
  return NGramModel(std::move(d));
}

const Vocabulary &NGramModel::vocab() const { return data_->vocab; }
const ModelInfo &NGramModel::info() const { return data_->info; }
bool NGramModel::adapted() const { return data_->kind == Kind::kAdapted; }
double NGramModel::tau() const { return data_->tau; }

double NGramModel::Prob(WordId w, std::span<const WordId> history) const {
  return data_->Prob(w, history);
}

double NGramModel::LogProb(WordId w, std::span<const WordId> history) const {
  const double p = data_->Prob(w, history);
  return p > 0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

double NGramModel::Prob(const std::string &w,
                        std::span<const std::string> history) const {
  std::vector<WordId> h;
  for (const std::string &s : history) h.push_back(data_->vocab.Lookup(s));
  return data_->Prob(data_->vocab.Lookup(w), h);
}

std::vector<WordId> NGramModel::PredictedSymbols() const {
  std::vector<WordId> out;
  for (WordId w = 0; w < data_->vocab.size(); ++w)
    if (w != data_->vocab.bos()) out.push_back(w);
  return out;
}

std::vector<std::vector<WordId>> NGramModel::ExplicitHistories() const {
  const Data *d = data_.get();
  const Data *base = d->kind == Kind::kAdapted ? d->prior.get() : d;
  std::set<std::vector<WordId>> hist;
  hist.insert(std::vector<WordId>{});
  if (base->kind == Kind::kWittenBell) {
    for (WordId u = 0; u < base->has_bigram.size(); ++u)
      if (base->has_bigram[u]) hist.insert({u});
    for (const auto &[key, row] : base->trigram)
      hist.insert({static_cast<WordId>(key >> 32), static_cast<WordId>(key & 0xFFFFFFFF)});
  }
  if (d->kind == Kind::kAdapted) {
    for (const auto &[u, local] : d->local_bigram) hist.insert({u});
    for (const auto &[key, local] : d->local_trigram)
      hist.insert({static_cast<WordId>(key >> 32), static_cast<WordId>(key & 0xFFFFFFFF)});
  }
  return {hist.begin(), hist.end()};
}

BigramRow NGramModel::Row(WordId u) const {
  const Data *d = data_.get();
  BigramRow row;
  const WordId h[1] = {u};
  switch (d->kind) {
    case Kind::kUniform:
      break;
    case Kind::kWittenBell:
      if (u < d->has_bigram.size() && d->has_bigram[u]) {
        const auto &r = d->bigram[u];
        for (const auto &[w, p] : r.probs) row.explicit_logprobs.emplace_back(w, std::log(p));
        row.log_backoff = std::log(r.alpha);
      }
      break;
    case Kind::kAdapted: {
      const NGramModel prior(d->prior);
      auto it = d->local_bigram.find(u);
      if (it != d->local_bigram.end()) {
        const LocalHist &local = it->second;
        BigramRow prior_row = prior.Row(u);
        std::vector<WordId> succ;
        for (const auto &e : prior_row.explicit_logprobs) succ.push_back(e.first);
        for (const auto &e : local.succ) succ.push_back(e.first);
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        for (WordId w : succ) row.explicit_logprobs.emplace_back(w, std::log(d->Prob(w, h)));
        const double t = d->tau;
        row.log_backoff =
            std::log(t / (static_cast<double>(local.total) + t)) + prior_row.log_backoff;
        row.prior_unigram = true;
      } else if (d->prior->HasParams(h)) {
        row = prior.Row(u);
        row.prior_unigram = true;
      }
      break;
    }
  }
  return row;
}

const std::vector<double> &NGramModel::UnigramLogProbs() const {
  return data_->unigram_log;
}

const std::vector<double> &NGramModel::PriorUnigramLogProbs() const {
  return data_->kind == Kind::kAdapted ? data_->prior->unigram_log : data_->unigram_log;
}

NGramModel MapAdapt(const NGramModel &global, const CountTable &local, double tau) {
  if (!(tau > 0)) throw InvalidArgument("MAP prior weight tau must be positive");
  if (global.adapted())
    throw InvalidArgument("MAP adaptation expects a non-adapted global model");
  auto d = std::make_shared<NGramModel::Data>();
  const NGramModel::Data &g = *global.data_;
  d->kind = Kind::kAdapted;
  d->vocab = g.vocab;
  d->info = g.info;
  d->prior = global.data_;
  d->tau = tau;
  d->local_counts = local;
  const Vocabulary &v = d->vocab;
  const WordId bos = v.bos();
  const IdCounts ids = ToIds(local, v);

  for (WordId w = 0; w < v.size(); ++w) {
    if (w == bos || ids.unigram[w] == 0) continue;
    d->local_unigram.succ.emplace_back(w, ids.unigram[w]);
    d->local_unigram.total += ids.unigram[w];
  }
  for (const auto &[key, c] : ids.bigram) {
    if (key.second == bos || c == 0) continue;
    LocalHist &h = d->local_bigram[key.first];
    h.succ.emplace_back(key.second, c);
    h.total += c;
  }
  for (const auto &[key, c] : ids.trigram) {
    if (std::get<2>(key) == bos || c == 0) continue;
    LocalHist &h = d->local_trigram[PairKey(std::get<0>(key), std::get<1>(key))];
    h.succ.emplace_back(std::get<2>(key), c);
    h.total += c;
  }

  d->unigram.assign(v.size(), 0.0);
  for (WordId w = 0; w < v.size(); ++w) d->unigram[w] = d->Prob(w, {});
  d->unigram_log = Logs(d->unigram);
  return NGramModel(std::move(d));
}

double SequenceLogProb(const NGramModel &model, std::span<const std::string> words) {
  const Vocabulary &v = model.vocab();
  std::vector<WordId> h{v.bos()};
  double lp = 0.0;
  for (const std::string &w : words) {
    const WordId id = v.Lookup(w);
    lp += model.LogProb(id, h);
    h.push_back(id);
    if (h.size() > 2) h.erase(h.begin());
  }
  return lp + model.LogProb(v.eos(), h);
}

double Perplexity(const NGramModel &model, std::span<const TokenStream> sentences) {
  double lp = 0.0;
  std::size_t events = 0;
  for (const TokenStream &s : sentences) {
    if (s.empty()) continue;
    lp += SequenceLogProb(model, s);
    events += s.size() + 1;
  }
  if (events == 0) throw InvalidArgument("perplexity of an empty corpus");
  return std::exp(-lp / static_cast<double>(events));
}

double CountLogLikelihood(const NGramModel &model, const CountTable &counts) {
  const Vocabulary &v = model.vocab();
  double ll = 0.0;
  for (int n = 1; n <= CountTable::kMaxOrder; ++n) {
    for (const auto &[key, c] : counts.order(n)) {
      const std::vector<WordId> ids = KeyToIds(key, v);
      const WordId w = ids.back();
      if (w == v.bos()) continue;
      const std::span<const WordId> h(ids.data(), ids.size() - 1);
      ll += static_cast<double>(c) * model.LogProb(w, h);
    }
  }
  return ll;
}

CountTable ApplyCutoffs(const CountTable &counts, Count min_bigram, Count min_trigram) {
  CountTable out;
  for (int n = 1; n <= CountTable::kMaxOrder; ++n) {
    const Count min = n == 2 ? min_bigram : n == 3 ? min_trigram : 0;
    for (const auto &[key, c] : counts.order(n))
      if (c >= min) out.Add(SplitWhitespace(key), c);
  }
  return out;
}

NGramModel BuildModel(std::span<const TokenStream> sentences, std::size_t vocab_size,
                      std::string label, Count min_bigram, Count min_trigram) {
  const CountTable raw = CountNgrams(sentences);
  Vocabulary vocab = SelectVocab(raw, vocab_size);
  ModelInfo info;
  info.label = std::move(label);
  std::size_t covered = 0;
  for (const TokenStream &s : sentences) {
    info.tokens += s.size();
    for (const std::string &t : s) {
      const auto id = vocab.Find(t);
      if (id && *id < vocab.num_words()) ++covered;
    }
  }
  for (const auto &[w, c] : raw.order(1))
    if (w != Vocabulary::kBos && w != Vocabulary::kEos) ++info.types;
  info.coverage = info.tokens ? static_cast<double>(covered) / static_cast<double>(info.tokens) : 0.0;
  const CountTable counts =
      ApplyCutoffs(CountNgrams(sentences, &vocab), min_bigram, min_trigram);
  return NGramModel::Estimate(counts, std::move(vocab), std::move(info));
}

// Snapshot ------------------------------------------------------------------

namespace {

std::string_view KindName(Kind k) {
  switch (k) {
    case Kind::kWittenBell: return "witten-bell";
    case Kind::kUniform: return "uniform";
    case Kind::kAdapted: return "map-adapted";
  }
  return "";
}

std::string Sanitize(std::string s) {
  for (char &c : s)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return s;
}

void WriteCounts(std::ostream &out, std::string_view name, const CountTable &counts) {
  out << name;
  for (int n = 1; n <= CountTable::kMaxOrder; ++n) out << '\t' << counts.order(n).size();
  out << '\n';
  for (int n = 1; n <= CountTable::kMaxOrder; ++n)
    for (const auto &[key, c] : counts.order(n)) out << key << '\t' << c << '\n';
}

class SnapshotReader {
 public:
  explicit SnapshotReader(std::istream &in) : in_(in) {}

  std::string Line() {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError("truncated model snapshot", offset_, ParseError::kNoIndex, line_no_ + 1);
    offset_ += line.size() + 1;
    ++line_no_;
    return line;
  }
  // Reads `name<TAB>value` and returns the value.
  std::string Field(std::string_view name) {
    const std::string line = Line();
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || std::string_view(line).substr(0, tab) != name)
      Fail("expected field '" + std::string(name) + "'");
    return line.substr(tab + 1);
  }
  std::uint64_t Number(std::string_view name) {
    const std::string v = Field(name);
    try {
      return std::stoull(v);
    } catch (const std::exception &) {
      Fail("bad number for '" + std::string(name) + "'");
    }
  }
  CountTable Counts(std::string_view name) {
    const std::vector<std::string> head = Split(Line(), '\t');
    if (head.size() != 4 || head[0] != name) Fail("expected '" + std::string(name) + "' section");
    CountTable table;
    for (int n = 1; n <= 3; ++n) {
      const std::uint64_t lines = std::stoull(head[n]);
      for (std::uint64_t i = 0; i < lines; ++i) {
        const std::string line = Line();
        const std::size_t tab = line.rfind('\t');
        if (tab == std::string::npos) Fail("malformed count line");
        const std::vector<std::string> ngram = SplitWhitespace(line.substr(0, tab));
        if (static_cast<int>(ngram.size()) != n) Fail("n-gram of wrong order");
        table.Add(ngram, std::stoull(line.substr(tab + 1)));
      }
    }
    return table;
  }
  [[noreturn]] void Fail(const std::string &msg) const {
    throw ParseError("model snapshot: " + msg, offset_, ParseError::kNoIndex, line_no_);
  }

 private:
  std::istream &in_;
  std::size_t offset_ = 0;
  std::size_t line_no_ = 0;
};

NGramModel ReadBody(SnapshotReader &r);

}  // namespace

// Needs access to Data, so it lives outside the anonymous namespace.
void WriteModelBody(std::ostream &out, const NGramModel::Data &d) {
  out << "kind\t" << KindName(d.kind) << '\n';
  out << "label\t" << Sanitize(d.info.label) << '\n';
  out << "tokens\t" << d.info.tokens << '\n';
  out << "types\t" << d.info.types << '\n';
  out << "coverage\t" << FormatDouble(d.info.coverage) << '\n';
  out << "vocab\t" << d.vocab.num_words() << '\n';
  for (const std::string &w : d.vocab.words()) out << w << '\n';
  if (d.kind == Kind::kWittenBell) WriteCounts(out, "counts", d.counts);
  if (d.kind == Kind::kAdapted) {
    out << "tau\t" << FormatDouble(d.tau) << '\n';
    WriteCounts(out, "local-counts", d.local_counts);
    out << "prior\n";
    WriteModelBody(out, *d.prior);
  }
}

void NGramModel::Save(std::ostream &out) const {
  out << "sdtr-lm\t1\n";
  WriteModelBody(out, *data_);
  out << "end\n";
  if (!out) throw Error("failed to write model snapshot");
}

namespace {

NGramModel ReadBody(SnapshotReader &r) {
  const std::string kind = r.Field("kind");
  ModelInfo info;
  info.label = r.Field("label");
  info.tokens = r.Number("tokens");
  info.types = r.Number("types");
  info.coverage = ParseDouble(r.Field("coverage"));
  const std::uint64_t k = r.Number("vocab");
  std::vector<std::string> words;
  words.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i) words.push_back(r.Line());
  Vocabulary vocab(std::move(words));
  if (kind == "witten-bell") {
    const CountTable counts = r.Counts("counts");
    return NGramModel::Estimate(counts, std::move(vocab), std::move(info));
  }
  if (kind == "uniform") return NGramModel::Uniform(std::move(vocab));
  if (kind == "map-adapted") {
    const double tau = ParseDouble(r.Field("tau"));
    const CountTable local = r.Counts("local-counts");
    if (r.Line() != "prior") r.Fail("expected 'prior'");
    const NGramModel prior = ReadBody(r);
    if (!(prior.vocab() == vocab)) r.Fail("adapted vocabulary differs from its prior");
    return MapAdapt(prior, local, tau);
  }
  r.Fail("unknown model kind '" + kind + "'");
}

}  // namespace

NGramModel NGramModel::Load(std::istream &in) {
  SnapshotReader r(in);
  const std::string header = r.Line();
  if (header.rfind("sdtr-lm\t", 0) != 0) r.Fail("bad magic header");
  if (header != "sdtr-lm\t1") r.Fail("unsupported version in '" + header + "'");
  NGramModel model = ReadBody(r);
  if (r.Line() != "end") r.Fail("expected 'end'");
  return model;
}

}  // namespace sdtr
