// decoder.cc
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

#include "sdtr/decoder.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>
#include <unordered_map>

#include "sdtr/error.h"

namespace sdtr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr WordId kNoWord = std::numeric_limits<WordId>::max();

double SafeLog(double p) { return p > 0 ? std::log(p) : kNegInf; }

// A word being matched against the input: started at position j0 with LM
// entry score `entry`; s[i] is the best in-word channel score with i
// phonemes consumed at the current position.
struct Token {
  std::size_t cand;
  std::size_t j0;
  double entry;
  std::vector<double> s;

  double Best() const { return entry + *std::max_element(s.begin(), s.end()); }
};

// A word spanning input [j0, j1) with its best in-word channel score.
struct Arc {
  WordId word;
  std::size_t j0, j1;
  double span;
};

// A complete or partial word sequence with its scores. `search` adds the
// word penalties and is the ranking key.
struct Hyp {
  std::vector<WordId> words;
  double score;
  double search;
};

bool HypBefore(const Hyp &a, const Hyp &b) {
  if (a.search != b.search) return a.search > b.search;
  return a.words < b.words;
}

// Keeps the k best distinct entries, plus any that tie with the k-th, so
// that tie-breaking by word sequence stays exact downstream.
template <typename H, typename Same, typename Before>
void OfferTo(std::vector<H> *list, H h, std::size_t k, Same same, Before before) {
  for (H &e : *list) {
    if (same(e, h)) {
      if (h.search > e.search) {
        e = std::move(h);
        std::sort(list->begin(), list->end(), before);
      }
      return;
    }
  }
  if (list->size() >= k && h.search < (*list)[k - 1].search - kScoreTieTolerance) return;
  list->insert(std::upper_bound(list->begin(), list->end(), h, before), std::move(h));
  while (list->size() > k &&
         list->back().search < (*list)[k - 1].search - kScoreTieTolerance)
    list->pop_back();
}

void Offer(std::vector<Hyp> *list, Hyp h, std::size_t k) {
  OfferTo(
      list, std::move(h), k, [](const Hyp &a, const Hyp &b) { return a.words == b.words; },
      HypBefore);
}

}  // namespace

void SortTranscriptions(std::vector<Transcription> *list) {
  auto &l = *list;
  std::sort(l.begin(), l.end(), [](const Transcription &a, const Transcription &b) {
    if (a.search_score != b.search_score) return a.search_score > b.search_score;
    return a.words < b.words;
  });
  // Groups runs within tolerance of their first member and orders each
  // group by word sequence.
  for (std::size_t i = 0; i < l.size();) {
    std::size_t e = i + 1;
    while (e < l.size() && l[i].search_score - l[e].search_score <= kScoreTieTolerance) ++e;
    std::sort(l.begin() + static_cast<std::ptrdiff_t>(i),
              l.begin() + static_cast<std::ptrdiff_t>(e),
              [](const Transcription &a, const Transcription &b) { return a.words < b.words; });
    i = e;
  }
}

Decoder::Decoder(const Lexicon &lexicon, const ChannelModel &channel, NGramModel lm,
                 DecoderOptions options)
    : channel_(channel), lm_(std::move(lm)), options_(options) {
  if (!(options_.beam > 0)) throw InvalidArgument("beam must be positive");
  if (!(options_.reference_beam > 0) || std::isinf(options_.reference_beam))
    throw InvalidArgument("reference beam must be positive and finite");
  if (options_.nbest == 0) throw InvalidArgument("nbest must be at least 1");
  if (!std::isfinite(options_.word_penalty))
    throw InvalidArgument("word penalty must be finite");
  const Vocabulary &vocab = lm_.vocab();
  auto consider = [&](WordId w, const std::optional<Pronunciation> &pron) {
    const std::string &word = vocab.symbol(w);
    if (!pron) throw InvalidArgument("no pronunciation for word '" + word + "'");
    std::vector<int> ids;
    for (const std::string &p : *pron) {
      const auto id = channel_.Index(p);
      if (!id) {
        skipped_.push_back(word);
        return;
      }
      ids.push_back(*id);
    }
    candidates_.push_back({w, std::move(ids)});
  };
  for (WordId w = 0; w < vocab.num_words(); ++w) consider(w, lexicon.Find(vocab.symbol(w)));
  const std::string unk(Vocabulary::kUnk);
  if (lexicon.HasEntry(unk)) consider(vocab.unk(), lexicon.Find(unk));
  if (candidates_.empty()) throw InvalidArgument("no vocabulary word can be decoded");
  candidate_of_.assign(vocab.size(), static_cast<std::size_t>(-1));
  for (std::size_t c = 0; c < candidates_.size(); ++c) candidate_of_[candidates_[c].word] = c;

  const std::size_t a = channel_.size();
  const double ins = channel_.insertion();
  ins_cost_ = SafeLog(ins) - std::log(static_cast<double>(a));
  close_cost_ = SafeLog(1.0 - ins);
  del_cost_.resize(a);
  sub_cost_.resize(a * a);
  for (std::size_t p = 0; p < a; ++p) {
    const double d = channel_.deletion(static_cast<int>(p));
    del_cost_[p] = close_cost_ + SafeLog(d);
    for (std::size_t q = 0; q < a; ++q)
      sub_cost_[p * a + q] = close_cost_ + SafeLog(1.0 - d) +
                             SafeLog(channel_.sub(static_cast<int>(p), static_cast<int>(q)));
  }
}

// One search over an input. Thresholds come either from this search's own
// column bests (a relative beam) or from a reference search.
struct Decoder::Search {
  Search(const Decoder &decoder, const std::vector<int> &input, double beam_width,
         const std::vector<double> *first_ref = nullptr,
         const std::vector<double> *second_ref = nullptr)
      : d(decoder), x(input), beam(beam_width), ref1(first_ref), ref2(second_ref) {}

  const Decoder &d;
  const std::vector<int> &x;
  double beam;
  const std::vector<double> *ref1;  // first-pass column bests
  const std::vector<double> *ref2;  // second-pass column bests

  std::vector<Arc> arcs;
  std::vector<double> best1, best2;
  std::vector<Hyp> finals;
  std::size_t visited = 0;

  // Word sequences of the second pass as an interned prefix tree: equal
  // sequences share one node.
  struct Node {
    WordId word;
    std::size_t parent;
  };
  struct PathHyp {
    std::size_t node;
    double score;
    double search;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::uint64_t, std::size_t> children;

  std::size_t Extend(std::size_t node, WordId w) {
    const std::uint64_t key = (static_cast<std::uint64_t>(node) << 32) | w;
    auto [it, fresh] = children.emplace(key, nodes.size());
    if (fresh) nodes.push_back({w, node});
    return it->second;
  }
  std::vector<WordId> Words(std::size_t node) const {
    std::vector<WordId> words;
    for (; node != 0; node = nodes[node].parent) words.push_back(nodes[node].word);
    std::reverse(words.begin(), words.end());
    return words;
  }
  bool PathBefore(const PathHyp &a, const PathHyp &b) const {
    if (a.search != b.search) return a.search > b.search;
    return a.node != b.node && Words(a.node) < Words(b.node);
  }
  void OfferPath(std::vector<PathHyp> *list, PathHyp h, std::size_t k) const {
    OfferTo(
        list, h, k, [](const PathHyp &a, const PathHyp &b) { return a.node == b.node; },
        [this](const PathHyp &a, const PathHyp &b) { return PathBefore(a, b); });
  }

  double Threshold(const std::vector<double> *ref, std::size_t j, double own_best) const {
    if (!ref) return own_best - beam;
    return j < ref->size() ? (*ref)[j] - beam : kNegInf;
  }

  void FirstPass();
  void SecondPass();
};

void Decoder::Search::FirstPass() {
  const std::size_t m = x.size();
  const Vocabulary &vocab = d.lm_.vocab();
  const std::size_t a = d.channel_.size();
  const auto &cands = d.candidates_;
  const bool allow_empty_spans = d.options_.max_words > 0;
  best1.assign(m + 1, kNegInf);

  std::unordered_map<WordId, BigramRow> rows;
  auto row = [&](WordId u) -> const BigramRow & {
    auto it = rows.find(u);
    if (it == rows.end()) it = rows.emplace(u, d.lm_.Row(u)).first;
    return it->second;
  };
  const std::vector<double> &own_uni = d.lm_.UnigramLogProbs();
  const std::vector<double> &prior_uni = d.lm_.PriorUnigramLogProbs();

  // In-word deletions within one input position, in phoneme order.
  auto close_deletions = [&](Token *t) {
    const auto &pron = cands[t->cand].pron;
    for (std::size_t i = 0; i < pron.size(); ++i)
      t->s[i + 1] = std::max(t->s[i + 1], t->s[i] + d.del_cost_[pron[i]]);
  };

  std::vector<Token> cur;
  std::vector<double> ends(vocab.size(), kNegInf);  // best word-end score per word
  std::vector<WordId> ended;
  std::vector<double> entry(cands.size(), kNegInf);
  std::vector<double> empty_span(cands.size(), kNegInf);
  if (allow_empty_spans) {
    for (std::size_t c = 0; c < cands.size(); ++c) {
      Token t{c, 0, 0.0, std::vector<double>(cands[c].pron.size() + 1, kNegInf)};
      t.s[0] = 0.0;
      close_deletions(&t);
      empty_span[c] = t.s.back();
    }
  }

  // Bigram entry score max_u ends[u] + ln p(w|u), using that every explicit
  // row value is at least the backed-off value it replaces.
  std::unordered_map<WordId, double> best_explicit;
  auto compute_entries = [&]() {
    double via_prior = kNegInf, via_own = kNegInf;
    best_explicit.clear();
    for (WordId u : ended) {
      const BigramRow &r = row(u);
      const double b = ends[u];
      double &via = r.prior_unigram ? via_prior : via_own;
      via = std::max(via, b + r.log_backoff);
      for (const auto &[w, lp] : r.explicit_logprobs) {
        auto [it, fresh] = best_explicit.emplace(w, b + lp);
        if (!fresh) it->second = std::max(it->second, b + lp);
      }
    }
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const WordId w = cands[c].word;
      double e = std::max(via_prior + prior_uni[w], via_own + own_uni[w]);
      auto it = best_explicit.find(w);
      if (it != best_explicit.end()) e = std::max(e, it->second);
      entry[c] = e + d.options_.word_penalty;
    }
  };

  for (std::size_t j = 0; j <= m; ++j) {
    for (Token &t : cur) close_deletions(&t);

    // Word ends at j.
    std::fill(ends.begin(), ends.end(), kNegInf);
    ended.clear();
    auto add_end = [&](WordId w, double score) {
      if (score == kNegInf) return false;
      if (ends[w] == kNegInf) ended.push_back(w);
      if (score <= ends[w]) return false;
      ends[w] = score;
      return true;
    };
    if (j == 0) add_end(vocab.bos(), 0.0);
    for (const Token &t : cur) add_end(cands[t.cand].word, t.entry + t.s.back());

    // Pruning compares hypotheses that have paid for every word they
    // started: in-word states and fresh word entries. A bare word end has
    // yet to pay for its successor, so it only counts at the last column.
    double best = kNegInf;
    for (const Token &t : cur)
      for (std::size_t i = 0; i + 1 < t.s.size(); ++i) best = std::max(best, t.entry + t.s[i]);
    if (j < m) {
      compute_entries();
      for (double e : entry) best = std::max(best, e);
    } else {
      for (WordId w : ended) best = std::max(best, ends[w]);
    }
    if (best == kNegInf) break;
    best1[j] = best;
    const double threshold = Threshold(ref1, j, best);

    for (const Token &t : cur) {
      const double end = t.entry + t.s.back();
      if (end != kNegInf && end >= threshold)
        arcs.push_back({cands[t.cand].word, t.j0, j, t.s.back()});
    }

    // Words may also span no input: they enter from the ends at j and from
    // each other.
    if (allow_empty_spans) {
      if (j == m) compute_entries();
      for (std::size_t round = 0; round < d.options_.max_words; ++round) {
        bool changed = false;
        for (std::size_t c = 0; c < cands.size(); ++c)
          if (entry[c] >= threshold)
            changed |= add_end(cands[c].word, entry[c] + empty_span[c]);
        if (!changed) break;
        compute_entries();
      }
      for (std::size_t c = 0; c < cands.size(); ++c)
        if (empty_span[c] != kNegInf && entry[c] + empty_span[c] >= threshold)
          arcs.push_back({cands[c].word, j, j, empty_span[c]});
    }
    if (j == m) break;

    // Advance live tokens, and fresh ones, over input symbol x[j].
    std::vector<Token> next;
    next.reserve(cur.size());
    auto advance = [&](Token &t) {
      const auto &pron = cands[t.cand].pron;
      const std::size_t k = pron.size();
      std::vector<double> s(k + 1, kNegInf);
      bool alive = false;
      for (std::size_t i = 0; i < k; ++i) {
        if (t.s[i] == kNegInf || t.entry + t.s[i] < threshold) continue;
        s[i] = std::max(s[i], t.s[i] + d.ins_cost_);
        s[i + 1] = std::max(s[i + 1], t.s[i] + d.sub_cost_[pron[i] * a + x[j]]);
      }
      for (double v : s) alive |= v != kNegInf;
      if (!alive) return;
      t.s = std::move(s);
      next.push_back(std::move(t));
    };
    for (Token &t : cur) advance(t);
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (entry[c] == kNegInf || entry[c] < threshold) continue;
      Token t{c, j, entry[c], std::vector<double>(cands[c].pron.size() + 1, kNegInf)};
      t.s[0] = 0.0;
      close_deletions(&t);
      advance(t);
    }
    cur = std::move(next);
  }
}

void Decoder::Search::SecondPass() {
  const std::size_t m = x.size();
  const Vocabulary &vocab = d.lm_.vocab();
  const std::size_t k = d.options_.nbest;
  const std::size_t max_words = d.options_.max_words;
  const double penalty = d.options_.word_penalty;
  best2.assign(m + 1, kNegInf);
  nodes.assign(1, {kNoWord, 0});
  children.clear();

  // Arcs by start, grouped by word so each LM lookup serves a group.
  std::vector<std::vector<std::size_t>> arcs_from(m + 1);
  for (std::size_t i = 0; i < arcs.size(); ++i) arcs_from[arcs[i].j0].push_back(i);
  for (auto &from : arcs_from)
    std::sort(from.begin(), from.end(), [&](std::size_t p, std::size_t q) {
      return std::tie(arcs[p].word, arcs[p].j1) < std::tie(arcs[q].word, arcs[q].j1);
    });

  // Per column, states keyed (n, u, v); empty spans add states with a
  // larger n to the column being processed, so key order visits them later.
  // seen[j] is the best score offered to column j so far; its threshold can
  // only rise, so offers below the current one are dropped on arrival.
  using Key = std::tuple<std::size_t, WordId, WordId>;
  std::vector<std::map<Key, std::vector<PathHyp>>> columns(m + 1);
  std::vector<double> seen(m + 1, kNegInf);
  columns[0][{0, kNoWord, vocab.bos()}].push_back({0, 0.0, 0.0});
  seen[0] = 0.0;
  auto threshold = [&](std::size_t j) { return Threshold(ref2, j, seen[j]); };

  std::vector<PathHyp> path_finals;
  for (std::size_t j = 0; j <= m; ++j) {
    auto &column = columns[j];
    for (auto it = column.begin(); it != column.end(); ++it) {
      const auto [n, u, v] = it->first;
      std::vector<PathHyp> &hyps = it->second;
      const double floor = threshold(j);
      while (!hyps.empty() && hyps.back().search < floor) hyps.pop_back();
      if (hyps.empty()) continue;
      ++visited;

      WordId hist[2] = {u, v};
      const std::span<const WordId> h =
          u == kNoWord ? std::span<const WordId>(hist + 1, 1) : std::span<const WordId>(hist, 2);

      const double tail =
          (m > j ? static_cast<double>(m - j) * d.ins_cost_ : 0.0) + d.close_cost_;
      const double eos = d.lm_.LogProb(vocab.eos(), h) + tail;
      if (eos != kNegInf)
        for (const PathHyp &hyp : hyps)
          OfferPath(&path_finals, {hyp.node, hyp.score + eos, hyp.search + eos}, k);

      if (max_words > 0 && n >= max_words) continue;
      const std::size_t next_n = max_words > 0 ? n + 1 : 0;
      WordId last = kNoWord;
      double lp = kNegInf;
      for (std::size_t ai : arcs_from[j]) {
        const Arc &arc = arcs[ai];
        // LM log-probabilities are at most zero.
        const double dest_floor = threshold(arc.j1);
        if (hyps.front().search + arc.span + penalty < dest_floor) continue;
        if (arc.word != last) {
          last = arc.word;
          lp = d.lm_.LogProb(arc.word, h);
        }
        if (lp == kNegInf) continue;
        const double step = lp + arc.span;
        std::vector<PathHyp> *dest = nullptr;
        for (const PathHyp &hyp : hyps) {
          const double search = hyp.search + step + penalty;
          if (search < dest_floor) break;
          if (!dest) dest = &columns[arc.j1][{next_n, v, arc.word}];
          OfferPath(dest, {Extend(hyp.node, arc.word), hyp.score + step, search}, k);
          seen[arc.j1] = std::max(seen[arc.j1], search);
        }
      }
    }
    best2[j] = seen[j];
    column.clear();
  }
  for (const PathHyp &p : path_finals) finals.push_back({Words(p.node), p.score, p.search});
}

std::vector<Transcription> Decoder::Decode(std::span<const std::string> heard,
                                           DecodeStats *stats) const {
  const std::vector<int> x = channel_.Encode(heard);
  const Vocabulary &vocab = lm_.vocab();
  if (stats) *stats = {};

  if (x.empty() && options_.max_words == 0) {
    const WordId h[1] = {vocab.bos()};
    Transcription t;
    t.score = t.search_score = lm_.LogProb(vocab.eos(), h) + close_cost_;
    return {t};
  }

  auto run = [&](Search &s) {
    s.FirstPass();
    s.SecondPass();
    if (stats) {
      stats->lattice_arcs += s.arcs.size();
      stats->search_states += s.visited;
    }
  };
  std::vector<Hyp> finals;
  const bool exhaustive = std::isinf(options_.beam);
  Search first(*this, x, exhaustive ? options_.beam : options_.reference_beam);
  run(first);
  finals = std::move(first.finals);
  if (!exhaustive && options_.beam != options_.reference_beam) {
    Search main(*this, x, options_.beam, &first.best1, &first.best2);
    run(main);
    for (Hyp &h : main.finals) Offer(&finals, std::move(h), finals.size() + main.finals.size());
  }
  if (finals.empty())
    throw DecodeError("no hypothesis survived the search (beam " + FormatDouble(options_.beam) +
                      "); the input is unreachable under the channel or the beam is too narrow");

  // Exact rescoring: best alignment of the whole pronunciation plus the
  // trigram probability.
  std::vector<Transcription> out;
  const std::size_t a = channel_.size();
  for (const Hyp &hyp : finals) {
    std::vector<int> pron;
    std::vector<WordId> h{vocab.bos()};
    double lm = 0;
    Transcription t;
    for (WordId w : hyp.words) {
      const auto &p = candidates_[candidate_of_[w]].pron;
      pron.insert(pron.end(), p.begin(), p.end());
      lm += lm_.LogProb(w, h);
      h.push_back(w);
      if (h.size() > 2) h.erase(h.begin());
      t.words.push_back(vocab.symbol(w));
    }
    lm += lm_.LogProb(vocab.eos(), h);
    // f[j]: best score over the pronunciation prefix with j symbols heard.
    std::vector<double> f(x.size() + 1, kNegInf), g(x.size() + 1);
    f[0] = 0.0;
    for (std::size_t j = 1; j <= x.size(); ++j) f[j] = f[j - 1] + ins_cost_;
    for (int p : pron) {
      for (std::size_t j = 0; j <= x.size(); ++j) {
        double v = f[j] + del_cost_[p];
        if (j > 0) {
          v = std::max(v, f[j - 1] + sub_cost_[p * a + x[j - 1]]);
          v = std::max(v, g[j - 1] + ins_cost_);
        }
        g[j] = v;
      }
      std::swap(f, g);
    }
    t.score = f[x.size()] + close_cost_ + lm;
    t.search_score = t.score + options_.word_penalty * static_cast<double>(hyp.words.size());
    out.push_back(std::move(t));
  }
  SortTranscriptions(&out);
  if (out.size() > options_.nbest) out.resize(options_.nbest);
  return out;
}

}  // namespace sdtr
