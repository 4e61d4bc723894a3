// decoder_test.cc
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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "decoder_oracle.h"
#include "sdtr/channel.h"
#include "sdtr/decoder.h"
#include "sdtr/error.h"
#include "sdtr/lexicon.h"
#include "sdtr/ngram_model.h"

namespace sdtr {
namespace {

using Strings = std::vector<std::string>;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Lexicon ---------------------------------------------------------------------

TEST(LexiconTest, PhonemizeConcatenates) {
  Lexicon lex(false);
  lex.Add("ab", {"a", "b"});
  EXPECT_EQ(Phonemize(Strings{"ab"}, lex), (Strings{"a", "b"}));
  EXPECT_EQ(Phonemize(Strings{"ab", "ab"}, lex), (Strings{"a", "b", "a", "b"}));
  EXPECT_TRUE(Phonemize(Strings{}, lex).empty());
}

TEST(LexiconTest, GraphemeFallback) {
  Lexicon lex(true);
  EXPECT_EQ(Phonemize(Strings{"cd"}, lex), (Strings{"c", "d"}));
  EXPECT_EQ(SpellGraphemes("né"), (Strings{"n", "é"}));
}

TEST(LexiconTest, UnresolvableWordIsNamed) {
  Lexicon lex(false);
  lex.Add("ab", {"a", "b"});
  try {
    Phonemize(Strings{"ab", "xyz"}, lex);
    FAIL() << "expected an error";
  } catch (const InvalidArgument &e) {
    EXPECT_NE(std::string(e.what()).find("xyz"), std::string::npos);
  }
}

TEST(LexiconTest, ReadWriteRoundTrip) {
  std::istringstream in("# comment\nab\ta b\n\nc\tc\n");
  const Lexicon lex = Lexicon::Read(in, false);
  EXPECT_EQ(lex.size(), 2u);
  EXPECT_EQ(lex.Get("ab"), (Strings{"a", "b"}));
  std::ostringstream out;
  lex.Write(out);
  EXPECT_EQ(out.str(), "ab\ta b\nc\tc\n");
}

TEST(LexiconTest, RejectsMalformedEntries) {
  std::istringstream no_tab("ab a b\n");
  EXPECT_THROW(Lexicon::Read(no_tab), ParseError);
  std::istringstream dup("ab\ta\nab\tb\n");
  EXPECT_THROW(Lexicon::Read(dup), ParseError);
  std::istringstream empty("ab\t \n");
  EXPECT_THROW(Lexicon::Read(empty), ParseError);
}

// Channel ---------------------------------------------------------------------

ChannelModel RandomChannel(Rng &rng, const Strings &alphabet, double max_ins, double max_del) {
  const std::size_t a = alphabet.size();
  std::vector<std::vector<double>> sub(a, std::vector<double>(a));
  for (std::size_t p = 0; p < a; ++p) {
    double sum = 0;
    for (std::size_t q = 0; q < a; ++q) sum += sub[p][q] = rng.Uniform() + (p == q ? 2.0 : 0.0);
    for (double &v : sub[p]) v /= sum;
    // Renormalize so the row sums to 1 within rounding.
    double s2 = 0;
    for (std::size_t q = 0; q + 1 < a; ++q) s2 += sub[p][q];
    sub[p][a - 1] = 1.0 - s2;
  }
  std::vector<double> del(a);
  for (double &d : del) d = max_del * rng.Uniform();
  return ChannelModel(alphabet, sub, del, max_ins * rng.Uniform());
}

TEST(ChannelTest, NoiselessIdentityHasProbabilityOne) {
  const ChannelModel ch = ChannelModel::Noiseless();
  const Strings s{"h", "e", "l", "l", "o"};
  EXPECT_EQ(ChannelLogLik(s, s, ch), 0.0);
  EXPECT_EQ(ChannelViterbiLogLik(s, s, ch), 0.0);
  EXPECT_EQ(ChannelLogLik(s, Strings{"h"}, ch), -kInf);
}

TEST(ChannelTest, SubstitutionOnlySingleAlignment) {
  const Strings alpha{"a", "b"};
  const ChannelModel ch(alpha, {{0.7, 0.3}, {0.4, 0.6}}, {0, 0}, 0);
  EXPECT_NEAR(ChannelLogLik(Strings{"a"}, Strings{"b"}, ch), std::log(0.3), 1e-15);
  EXPECT_NEAR(ChannelViterbiLogLik(Strings{"b"}, Strings{"a"}, ch), std::log(0.4), 1e-15);
}

TEST(ChannelTest, MatchesAlignmentEnumeration) {
  Rng rng(5);
  const Strings alpha{"a", "b", "c"};
  for (int trial = 0; trial < 50; ++trial) {
    const ChannelModel ch = RandomChannel(rng, alpha, 0.4, 0.4);
    Strings spoken, heard;
    for (std::size_t i = 0, n = rng.Below(3); i < n; ++i) spoken.push_back(alpha[rng.Below(3)]);
    for (std::size_t i = 0, n = rng.Below(4); i < n; ++i) heard.push_back(alpha[rng.Below(3)]);
    const auto e = testing::EnumerateAlignments(spoken, heard, ch);
    EXPECT_NEAR(ChannelLogLik(spoken, heard, ch), std::log(e.sum), 1e-12);
    EXPECT_NEAR(ChannelViterbiLogLik(spoken, heard, ch), std::log(e.max), 1e-12);
  }
}

TEST(ChannelTest, LikelihoodIsAProbabilityDistribution) {
  // Summing P(heard | spoken) over every heard sequence up to length 7
  // approaches 1 from below.
  Rng rng(9);
  const Strings alpha{"a", "b"};
  const ChannelModel ch = RandomChannel(rng, alpha, 0.1, 0.3);
  const Strings spoken{"a", "b"};
  double total = 0;
  for (std::size_t len = 0; len <= 7; ++len)
    for (std::size_t code = 0; code < (1u << len); ++code) {
      Strings heard;
      for (std::size_t i = 0; i < len; ++i) heard.push_back(alpha[(code >> i) & 1]);
      total += std::exp(ChannelLogLik(spoken, heard, ch));
    }
  EXPECT_LE(total, 1.0 + 1e-12);
  EXPECT_GT(total, 0.999);
}

TEST(ChannelTest, Validation) {
  const Strings alpha{"a", "b"};
  EXPECT_THROW(ChannelModel(alpha, {{0.5, 0.4}, {0, 1}}, {0, 0}, 0), InvalidArgument);
  EXPECT_THROW(ChannelModel(alpha, {{1, 0}, {0, 1}}, {0, 0}, 1.0), InvalidArgument);
  EXPECT_THROW(ChannelModel(alpha, {{1, 0}, {0, 1}}, {0, 1.5}, 0), InvalidArgument);
  EXPECT_THROW(ChannelModel(alpha, {{1, 0}}, {0, 0}, 0), InvalidArgument);
  EXPECT_THROW(ChannelModel({"a", "a"}, {{1, 0}, {0, 1}}, {0, 0}, 0), InvalidArgument);
  EXPECT_NO_THROW(ChannelModel(alpha, {{1, 0}, {0, 1}}, {1, 1}, 0));
  EXPECT_THROW(ChannelLogLik(Strings{"z"}, Strings{}, ChannelModel::Noiseless(alpha)),
               InvalidArgument);
}

TEST(ChannelTest, TextFormatRoundTrip) {
  Rng rng(2);
  const ChannelModel ch = RandomChannel(rng, {"aa", "b", "c"}, 0.2, 0.2);
  std::ostringstream out;
  ch.Write(out);
  std::istringstream in(out.str());
  const ChannelModel back = ChannelModel::Read(in);
  std::ostringstream again;
  back.Write(again);
  EXPECT_EQ(out.str(), again.str());
  EXPECT_EQ(back.alphabet(), ch.alphabet());

  std::istringstream shared(
      "sdtr-channel 1\nalphabet x y\ninsertion 0.1\ndeletion 0.2\n"
      "sub x 0.9 0.1\nsub y 0.2 0.8\n");
  const ChannelModel s = ChannelModel::Read(shared);
  EXPECT_EQ(s.deletion(1), 0.2);
  EXPECT_EQ(s.sub(1, 0), 0.2);
}

TEST(ChannelTest, MalformedFilesRaiseParseError) {
  for (const char *text : {"", "sdtr-channel 2\n", "sdtr-channel 1\nalphabet x\n",
                           "sdtr-channel 1\nalphabet x\ninsertion 0\nsub x 1\n",
                           "sdtr-channel 1\nalphabet x\ninsertion 0\ndeletion 0\nsub x 0.5\n",
                           "sdtr-channel 1\nbogus\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(ChannelModel::Read(in), ParseError) << text;
  }
}

TEST(CorruptTest, ZeroNoiseIsIdentity) {
  const Strings s{"s", "p", "e", "e", "c", "h"};
  EXPECT_EQ(Corrupt(s, ChannelModel::Noiseless(), 7), s);
}

TEST(CorruptTest, CertainDeletionEmptiesOutput) {
  const ChannelModel ch = ChannelModel::Uniform(0.3, 1.0, 0.0);
  EXPECT_TRUE(Corrupt(Strings{"a", "b", "c"}, ch, 1).empty());
}

TEST(CorruptTest, SeededOutputIsReproducible) {
  const ChannelModel ch = ChannelModel::Uniform(0.5, 0.0, 0.0);
  const Strings in{"a", "b"};
  const Strings first = Corrupt(in, ch, 42);
  EXPECT_EQ(Corrupt(in, ch, 42), first);
  // Frozen from the first run; mt19937_64 is specified bit for bit.
  EXPECT_EQ(first, (Strings{"s", "b"}));
  Rng a(3), b(3);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(Corrupt(in, ch, a), Corrupt(in, ch, b));
}

TEST(CorruptTest, EmpiricalRatesMatchParameters) {
  const ChannelModel ch = ChannelModel::Uniform(0.2, 0.1, 0.05);
  Rng rng(77);
  const Strings in(10, "m");
  std::size_t kept = 0, total_out = 0, trials = 4000;
  for (std::size_t t = 0; t < trials; ++t) {
    const Strings out = Corrupt(in, ch, rng);
    total_out += out.size();
    kept += static_cast<std::size_t>(std::count(out.begin(), out.end(), "m"));
  }
  // Expected length: 10 * 0.9 + 11 * 0.05 / 0.95.
  const double expect_len = 9.0 + 11 * 0.05 / 0.95;
  EXPECT_NEAR(static_cast<double>(total_out) / trials, expect_len, 0.1);
  // Kept "m": 10 * 0.9 * 0.8 plus insertions that happen to be "m".
  const double expect_m = 7.2 + 11 * 0.05 / 0.95 / 36;
  EXPECT_NEAR(static_cast<double>(kept) / trials, expect_m, 0.1);
}

// Decoder ---------------------------------------------------------------------

TEST(DecoderTest, NoiselessUniqueParse) {
  Lexicon lex(false);
  lex.Add("ab", {"a", "b"});
  lex.Add("c", {"c"});
  const NGramModel lm = NGramModel::Uniform(Vocabulary(Strings{"ab", "c"}));
  const Decoder dec(lex, ChannelModel::Noiseless(), lm);
  const auto out = dec.Decode(Strings{"a", "b", "c"});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].words, (Strings{"ab", "c"}));
  EXPECT_NEAR(out[0].score, 3 * std::log(1.0 / 4), 1e-12);
}

TEST(DecoderTest, HomophonePicksLanguageModelFavorite) {
  Lexicon lex(false);
  lex.Add("plane", {"p", "l", "e", "n"});
  lex.Add("plain", {"p", "l", "e", "n"});
  lex.Add("fly", {"f", "l", "i"});
  // "plane" follows "fly" far more often than "plain" does.
  const SentenceList text{{"fly", "plane"}, {"fly", "plane"}, {"fly", "plane"}, {"plain"},
                          {"plain"}, {"plain"}, {"plain"}};
  const NGramModel lm = BuildModel(text, 10, "t");
  const ChannelModel ch = ChannelModel::Uniform(0.1, 0.05, 0.02);
  DecoderOptions opt;
  opt.beam = DecoderOptions::kUnbounded;
  opt.nbest = 2;
  const Decoder dec(lex, ch, lm, opt);
  const auto out = dec.Decode(Strings{"f", "l", "i", "p", "l", "e", "n"});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].words, (Strings{"fly", "plane"}));
  EXPECT_EQ(out[1].words, (Strings{"fly", "plain"}));
  // Same channel cost, so the gap is exactly the trigram difference.
  const double lm_gap = std::log(lm.Prob("plane", Strings{"<s>", "fly"}) *
                                 lm.Prob("</s>", Strings{"fly", "plane"})) -
                        std::log(lm.Prob("plain", Strings{"<s>", "fly"}) *
                                 lm.Prob("</s>", Strings{"fly", "plain"}));
  EXPECT_GT(lm_gap, 0);
  EXPECT_NEAR(out[0].score - out[1].score, lm_gap, 1e-9);
  // Alone, "plain" is the likelier reading.
  EXPECT_EQ(dec.Decode(Strings{"p", "l", "e", "n"})[0].words, (Strings{"plain"}));
}

TEST(DecoderTest, MatchesExhaustiveArgmax) {
  Rng rng(20260101);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = testing::RandomInstance(rng);
    DecoderOptions opt;
    opt.beam = DecoderOptions::kUnbounded;
    opt.max_words = 4;
    const Decoder dec(inst.lexicon, inst.channel, inst.lm, opt);
    const auto got = dec.Decode(inst.heard);
    const auto want = testing::BruteForceArgmax(inst, 4);
    ASSERT_FALSE(got.empty());
    EXPECT_EQ(got[0].words, want.words) << "trial " << trial;
    EXPECT_NEAR(got[0].score, want.score, 1e-9) << "trial " << trial;
  }
}

TEST(DecoderTest, ScoreIsChannelPlusLanguageModel) {
  Rng rng(314);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = testing::RandomInstance(rng);
    DecoderOptions opt;
    opt.beam = DecoderOptions::kUnbounded;
    opt.nbest = 5;
    opt.max_words = trial % 2 ? 4 : 0;
    const Decoder dec(inst.lexicon, inst.channel, inst.lm, opt);
    for (const Transcription &t : dec.Decode(inst.heard)) {
      const double recomputed =
          ChannelViterbiLogLik(Phonemize(t.words, inst.lexicon), inst.heard, inst.channel) +
          SequenceLogProb(inst.lm, t.words);
      EXPECT_NEAR(t.score, recomputed, 1e-9) << Join(t.words, " ") << " trial " << trial;
      EXPECT_TRUE(std::isfinite(t.score));
    }
  }
}

TEST(DecoderTest, NbestIsSortedDistinctAndDeterministic) {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = testing::RandomInstance(rng);
    DecoderOptions opt;
    opt.beam = DecoderOptions::kUnbounded;
    opt.nbest = 8;
    const Decoder dec(inst.lexicon, inst.channel, inst.lm, opt);
    const auto out = dec.Decode(inst.heard);
    for (std::size_t i = 1; i < out.size(); ++i) {
      EXPECT_NE(out[i - 1].words, out[i].words);
      EXPECT_GE(out[i - 1].search_score, out[i].search_score - kScoreTieTolerance);
      if (std::abs(out[i - 1].search_score - out[i].search_score) <= kScoreTieTolerance) {
        EXPECT_LT(out[i - 1].words, out[i].words);
      }
    }
    const auto again = dec.Decode(inst.heard);
    ASSERT_EQ(again.size(), out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      EXPECT_EQ(again[i].words, out[i].words);
      EXPECT_EQ(again[i].score, out[i].score);
    }
  }
}

TEST(DecoderTest, ExactTiesOrderLexicographically) {
  Lexicon lex(false);
  lex.Add("zz", {"a"});
  lex.Add("aa", {"a"});
  lex.Add("mm", {"a"});
  const NGramModel lm = NGramModel::Uniform(Vocabulary(Strings{"zz", "aa", "mm"}));
  DecoderOptions opt;
  opt.nbest = 3;
  const Decoder dec(lex, ChannelModel::Noiseless({"a"}), lm, opt);
  const auto out = dec.Decode(Strings{"a"});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].words, Strings{"aa"});
  EXPECT_EQ(out[1].words, Strings{"mm"});
  EXPECT_EQ(out[2].words, Strings{"zz"});
}

TEST(DecoderTest, WideningTheBeamNeverLowersTopScore) {
  Rng rng(4242);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = testing::RandomInstance(rng);
    for (std::size_t max_words : {0, 4}) {
      double prev = -kInf;
      for (double beam : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, DecoderOptions::kUnbounded}) {
        DecoderOptions opt;
        opt.beam = beam;
        opt.reference_beam = 3.0;
        opt.max_words = max_words;
        const Decoder dec(inst.lexicon, inst.channel, inst.lm, opt);
        double top = -kInf;
        try {
          const auto out = dec.Decode(inst.heard);
          top = out[0].score;
          // Reported scores are exact at every beam.
          const double recomputed =
              ChannelViterbiLogLik(Phonemize(out[0].words, inst.lexicon), inst.heard,
                                   inst.channel) +
              SequenceLogProb(inst.lm, out[0].words);
          EXPECT_NEAR(top, recomputed, 1e-9);
        } catch (const DecodeError &) {
        }
        EXPECT_GE(top, prev - 1e-12) << "trial " << trial << " beam " << beam;
        prev = std::max(prev, top);
      }
    }
  }
}

TEST(DecoderTest, EmptyInputGivesEmptyTranscription) {
  Lexicon lex(false);
  lex.Add("a", {"a"});
  const NGramModel lm = BuildModel(SentenceList{{"a"}, {"a", "a"}}, 5, "t");
  const ChannelModel ch = ChannelModel::Uniform(0.1, 0.1, 0.2, {"a", "b"});
  for (std::size_t max_words : {0, 3}) {
    DecoderOptions opt;
    opt.max_words = max_words;
    const auto out = Decoder(lex, ch, lm, opt).Decode(Strings{});
    ASSERT_FALSE(out.empty());
    EXPECT_TRUE(out[0].words.empty());
    EXPECT_NEAR(out[0].score, std::log(lm.Prob("</s>", Strings{"<s>"})) + std::log(0.8),
                1e-12);
  }
}

TEST(DecoderTest, HopelessBeamRaisesDecodeError) {
  Lexicon lex(false);
  lex.Add("ab", {"a", "b"});
  lex.Add("b", {"b"});
  const NGramModel lm =
      BuildModel(SentenceList{{"b"}, {"b"}, {"b"}, {"b"}, {"ab"}}, 5, "t");
  DecoderOptions opt;
  opt.beam = opt.reference_beam = 1e-6;
  const Decoder dec(lex, ChannelModel::Noiseless({"a", "b"}), lm, opt);
  try {
    dec.Decode(Strings{"a", "b"});
    FAIL() << "expected DecodeError";
  } catch (const DecodeError &e) {
    EXPECT_NE(std::string(e.what()).find("beam"), std::string::npos);
  }
  opt.beam = 50;
  EXPECT_EQ(Decoder(lex, ChannelModel::Noiseless({"a", "b"}), lm, opt)
                .Decode(Strings{"a", "b"})[0]
                .words,
            Strings{"ab"});
}

TEST(DecoderTest, UnkNeedsALexiconEntry) {
  const NGramModel lm = BuildModel(SentenceList{{"a", "zzz"}, {"a"}}, 1, "t");
  Lexicon lex(false);
  lex.Add("a", {"a"});
  const ChannelModel ch = ChannelModel::Uniform(0.2, 0.05, 0.05, {"a", "b"});
  DecoderOptions opt;
  opt.beam = DecoderOptions::kUnbounded;
  const Decoder without(lex, ch, lm, opt);
  EXPECT_EQ(without.num_candidates(), 1u);
  lex.Add("<unk>", {"b"});
  const Decoder with(lex, ch, lm, opt);
  EXPECT_EQ(with.num_candidates(), 2u);
  EXPECT_EQ(with.Decode(Strings{"a", "b"})[0].words, (Strings{"a", "<unk>"}));
}

TEST(DecoderTest, WordsOutsideTheAlphabetAreSkipped) {
  const NGramModel lm = BuildModel(SentenceList{{"ab", "né"}}, 5, "t");
  const Decoder dec(Lexicon(true), ChannelModel::Noiseless(), lm);
  EXPECT_EQ(dec.num_candidates(), 1u);
  EXPECT_EQ(dec.skipped_words(), Strings{"né"});
}

TEST(DecoderTest, RejectsBadOptions) {
  const NGramModel lm = NGramModel::Uniform(Vocabulary(Strings{"a"}));
  const Lexicon lex(true);
  DecoderOptions opt;
  opt.beam = 0;
  EXPECT_THROW(Decoder(lex, ChannelModel::Noiseless(), lm, opt), InvalidArgument);
  opt = {};
  opt.nbest = 0;
  EXPECT_THROW(Decoder(lex, ChannelModel::Noiseless(), lm, opt), InvalidArgument);
  EXPECT_THROW(Decoder(Lexicon(false), ChannelModel::Noiseless(), lm), InvalidArgument);
}

TEST(DecoderTest, WordPenaltyShiftsRankingNotScore) {
  Lexicon lex(false);
  lex.Add("ab", {"a", "b"});
  lex.Add("a", {"a"});
  lex.Add("b", {"b"});
  const NGramModel lm = NGramModel::Uniform(Vocabulary(Strings{"ab", "a", "b"}));
  DecoderOptions opt;
  opt.nbest = 2;
  opt.beam = DecoderOptions::kUnbounded;
  const ChannelModel ch = ChannelModel::Noiseless({"a", "b"});
  EXPECT_EQ(Decoder(lex, ch, lm, opt).Decode(Strings{"a", "b"})[0].words, Strings{"ab"});
  opt.word_penalty = 5.0;
  const auto out = Decoder(lex, ch, lm, opt).Decode(Strings{"a", "b"});
  EXPECT_EQ(out[0].words, (Strings{"a", "b"}));
  EXPECT_NEAR(out[0].search_score - out[0].score, 10.0, 1e-12);
  EXPECT_NEAR(out[0].score, 3 * std::log(0.2), 1e-12);
}

TEST(DecoderTest, ConcurrentDecodesAgree) {
  Rng rng(8);
  const auto inst = testing::RandomInstance(rng);
  DecoderOptions opt;
  opt.nbest = 3;
  const Decoder dec(inst.lexicon, inst.channel, inst.lm, opt);
  const auto ref = dec.Decode(inst.heard);
  std::vector<std::vector<Transcription>> results(4);
  std::vector<std::thread> threads;
  for (auto &r : results) threads.emplace_back([&] { r = dec.Decode(inst.heard); });
  for (auto &t : threads) t.join();
  for (const auto &r : results) {
    ASSERT_EQ(r.size(), ref.size());
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i].words, ref[i].words);
  }
}

}  // namespace
}  // namespace sdtr
