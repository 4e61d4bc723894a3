// decoder.h
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
// Two-pass search for the word sequence W maximizing
//
//   ln P(X|W) + ln P(W)
//
// for a heard phoneme sequence X, with the channel probability taken over
// the single best alignment.
//
// The first pass runs time-synchronously over X with a bigram view of the
// language model and keeps, within the beam, every word span it reaches;
// these spans form a lattice. The second pass searches the lattice with the
// full trigram model and keeps the k best distinct word sequences per
// search state, so with an unbounded beam and a length bound its result is
// exact. Every returned sequence is then rescored exactly.
//
// Pruning thresholds hang off the column bests of a reference search run
// with a fixed beam, and the reference results are merged into the output;
// the set of surviving paths therefore only grows as the beam widens.

#ifndef SDTR_DECODER_H_
#define SDTR_DECODER_H_

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sdtr/channel.h"
#include "sdtr/lexicon.h"
#include "sdtr/ngram_model.h"

namespace sdtr {

struct DecoderOptions {
  // Log-probability beam, relative to the best hypothesis at the same input
  // position. Infinity disables pruning.
  double beam = 12.0;
  // Beam of the reference search that anchors the pruning thresholds.
  double reference_beam = 12.0;
  std::size_t nbest = 1;
  // Added to the search score once per word; not part of the reported score.
  double word_penalty = 0.0;
  // Upper bound on the transcription length; 0 means unbounded. Words that
  // are deleted entirely (spanning no input) are only considered when the
  // length is bounded.
  std::size_t max_words = 0;

  static constexpr double kUnbounded = std::numeric_limits<double>::infinity();
};

struct Transcription {
  std::vector<std::string> words;
  // ln P(X|W) + ln P(W), recomputed over the best alignment of W.
  double score = 0;
  // score plus the word penalties; the ranking key.
  double search_score = 0;
};

struct DecodeStats {
  std::size_t lattice_arcs = 0;
  std::size_t search_states = 0;
};

class Decoder {
 public:
  // Every vocabulary word with a pronunciation over the channel alphabet is
  // a candidate; <unk> is a candidate only with an explicit lexicon entry.
  // Throws InvalidArgument for bad options or when no word is decodable.
  Decoder(const Lexicon &lexicon, const ChannelModel &channel, NGramModel lm,
          DecoderOptions options = {});

  // Up to nbest transcriptions, best first; scores within 1e-9 are ordered
  // by word sequence. An empty input yields the empty transcription. Throws
  // DecodeError when the beam leaves no complete hypothesis. Safe to call
  // concurrently.
  std::vector<Transcription> Decode(std::span<const std::string> heard,
                                    DecodeStats *stats = nullptr) const;

  const DecoderOptions &options() const { return options_; }
  const NGramModel &lm() const { return lm_; }
  std::size_t num_candidates() const { return candidates_.size(); }
  // Vocabulary words left out because their pronunciation uses symbols
  // outside the channel alphabet.
  const std::vector<std::string> &skipped_words() const { return skipped_; }

 private:
  struct Search;
  struct Candidate {
    WordId word;
    std::vector<int> pron;
  };

  ChannelModel channel_;
  NGramModel lm_;
  DecoderOptions options_;
  std::vector<Candidate> candidates_;
  std::vector<std::size_t> candidate_of_;  // by WordId; npos when absent
  std::vector<std::string> skipped_;
  // Per alphabet symbol: ln(1-ins) + ln del(p), and ln(1-ins) + ln(1-del(p))
  // + ln sub(p, q) laid out as p * A + q.
  std::vector<double> del_cost_;
  std::vector<double> sub_cost_;
  double ins_cost_;    // ln ins - ln A
  double close_cost_;  // ln(1 - ins)
};

// Scores within this distance are treated as tied.
inline constexpr double kScoreTieTolerance = 1e-9;

// Sorts by descending search score, ordering near-ties by word sequence.
void SortTranscriptions(std::vector<Transcription> *list);

}  // namespace sdtr

#endif  // SDTR_DECODER_H_
