// channel.h
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
// Noisy phoneme channel between what was said and what the recognizer
// heard.
//
// The generative story, for a spoken sequence p_1..p_n: before each phoneme
// and once more at the end there is a gap in which symbols are inserted one
// at a time, each with probability ins (uniform over the alphabet), until
// the gap closes with probability 1 - ins. Each phoneme p is then deleted
// with probability del(p), or emitted as q with probability
// (1 - del(p)) * sub(p, q).

#ifndef SDTR_CHANNEL_H_
#define SDTR_CHANNEL_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdtr/lexicon.h"
#include "sdtr/util.h"

namespace sdtr {

// Lowercase ASCII letters followed by the ten digits.
std::vector<std::string> DefaultAlphabet();

class ChannelModel {
 public:
  // Validates: nonempty alphabet without duplicates, each substitution row
  // of size A summing to 1 within 1e-9, entries and deletion rates in
  // [0, 1], insertion in [0, 1). Throws InvalidArgument otherwise.
  ChannelModel(std::vector<std::string> alphabet,
               std::vector<std::vector<double>> substitution,
               std::vector<double> deletion, double insertion);

  static ChannelModel Noiseless(std::vector<std::string> alphabet = DefaultAlphabet());
  // Keeps a phoneme with probability 1 - sub_rate and otherwise replaces it
  // uniformly by one of the other A - 1 symbols; one deletion rate for all.
  static ChannelModel Uniform(double sub_rate, double del_rate, double ins_rate,
                              std::vector<std::string> alphabet = DefaultAlphabet());

  // Text format; see docs/formats.md.
  static ChannelModel Read(std::istream &in);
  void Write(std::ostream &out) const;

  std::size_t size() const { return alphabet_.size(); }
  const std::vector<std::string> &alphabet() const { return alphabet_; }
  std::optional<int> Index(const std::string &symbol) const;
  // Symbol ids; throws InvalidArgument naming a symbol outside the alphabet.
  std::vector<int> Encode(std::span<const std::string> phonemes) const;

  double sub(int p, int q) const { return sub_[p][q]; }
  double deletion(int p) const { return del_[p]; }
  double insertion() const { return ins_; }

 private:
  std::vector<std::string> alphabet_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<double>> sub_;
  std::vector<double> del_;
  double ins_;
};

// ln P(heard | spoken) summed over all edit alignments.
double ChannelLogLik(std::span<const std::string> spoken,
                     std::span<const std::string> heard, const ChannelModel &channel);
// ln of the single most probable alignment; the quantity the decoder
// maximizes.
double ChannelViterbiLogLik(std::span<const std::string> spoken,
                            std::span<const std::string> heard,
                            const ChannelModel &channel);

// Samples a heard sequence. The same seed gives the same output on every
// platform.
Pronunciation Corrupt(std::span<const std::string> phonemes, const ChannelModel &channel,
                      Rng &rng);
Pronunciation Corrupt(std::span<const std::string> phonemes, const ChannelModel &channel,
                      std::uint64_t seed);

}  // namespace sdtr

#endif  // SDTR_CHANNEL_H_
