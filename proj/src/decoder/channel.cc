// channel.cc
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

#include "sdtr/channel.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "sdtr/error.h"

namespace sdtr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double SafeLog(double p) { return p > 0 ? std::log(p) : kNegInf; }

// log(exp(a) + exp(b)).
double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// Forward recursion over (phonemes consumed, symbols heard); `combine` is
// LogAdd for the marginal and max for the best alignment.
template <typename Combine>
double Forward(std::span<const std::string> spoken, std::span<const std::string> heard,
               const ChannelModel &ch, Combine combine) {
  const std::vector<int> p = ch.Encode(spoken);
  const std::vector<int> x = ch.Encode(heard);
  const std::size_t n = p.size(), m = x.size();
  const double ins = SafeLog(ch.insertion()) - std::log(static_cast<double>(ch.size()));
  const double close = SafeLog(1.0 - ch.insertion());
  // f[i][j]: i phonemes consumed, j symbols heard, gap i still open.
  std::vector<std::vector<double>> f(n + 1, std::vector<double>(m + 1, kNegInf));
  f[0][0] = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      double v = f[i][j];
      if (j > 0) v = combine(v, f[i][j - 1] + ins);
      if (i > 0) {
        const int s = p[i - 1];
        v = combine(v, f[i - 1][j] + close + SafeLog(ch.deletion(s)));
        if (j > 0)
          v = combine(v, f[i - 1][j - 1] + close + SafeLog(1.0 - ch.deletion(s)) +
                             SafeLog(ch.sub(s, x[j - 1])));
      }
      f[i][j] = v;
    }
  }
  return f[n][m] + close;
}

}  // namespace

std::vector<std::string> DefaultAlphabet() {
  std::vector<std::string> out;
  for (char c = 'a'; c <= 'z'; ++c) out.emplace_back(1, c);
  for (char c = '0'; c <= '9'; ++c) out.emplace_back(1, c);
  return out;
}

ChannelModel::ChannelModel(std::vector<std::string> alphabet,
                           std::vector<std::vector<double>> substitution,
                           std::vector<double> deletion, double insertion)
    : alphabet_(std::move(alphabet)),
      sub_(std::move(substitution)),
      del_(std::move(deletion)),
      ins_(insertion) {
  const std::size_t a = alphabet_.size();
  if (a == 0) throw InvalidArgument("channel alphabet is empty");
  for (std::size_t i = 0; i < a; ++i) {
    const std::string &s = alphabet_[i];
    if (s.empty() || s.find_first_of(" \t\r\n") != std::string::npos)
      throw InvalidArgument("invalid phoneme symbol '" + s + "'");
    if (!index_.emplace(s, static_cast<int>(i)).second)
      throw InvalidArgument("duplicate phoneme symbol '" + s + "'");
  }
  if (sub_.size() != a || del_.size() != a)
    throw InvalidArgument("channel tables do not match the alphabet size");
  auto is_prob = [](double v) { return v >= 0.0 && v <= 1.0; };
  for (std::size_t i = 0; i < a; ++i) {
    if (sub_[i].size() != a)
      throw InvalidArgument("substitution row for '" + alphabet_[i] + "' has wrong size");
    double sum = 0;
    for (double v : sub_[i]) {
      if (!is_prob(v))
        throw InvalidArgument("substitution entry out of [0,1] for '" + alphabet_[i] + "'");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw InvalidArgument("substitution row for '" + alphabet_[i] + "' sums to " +
                            FormatDouble(sum));
    if (!is_prob(del_[i]))
      throw InvalidArgument("deletion rate out of [0,1] for '" + alphabet_[i] + "'");
  }
  if (!(ins_ >= 0.0 && ins_ < 1.0)) throw InvalidArgument("insertion rate must be in [0,1)");
}

ChannelModel ChannelModel::Noiseless(std::vector<std::string> alphabet) {
  return Uniform(0.0, 0.0, 0.0, std::move(alphabet));
}

ChannelModel ChannelModel::Uniform(double sub_rate, double del_rate, double ins_rate,
                                   std::vector<std::string> alphabet) {
  const std::size_t a = alphabet.size();
  if (!(sub_rate >= 0.0 && sub_rate <= 1.0))
    throw InvalidArgument("substitution rate must be in [0,1]");
  if (a == 1 && sub_rate > 0)
    throw InvalidArgument("substitution needs at least two symbols");
  std::vector<std::vector<double>> sub(a, std::vector<double>(a, 0.0));
  for (std::size_t p = 0; p < a; ++p)
    for (std::size_t q = 0; q < a; ++q)
      sub[p][q] = p == q ? 1.0 - sub_rate : sub_rate / static_cast<double>(a - 1);
  return ChannelModel(std::move(alphabet), std::move(sub), std::vector<double>(a, del_rate),
                      ins_rate);
}

std::optional<int> ChannelModel::Index(const std::string &symbol) const {
  auto it = index_.find(symbol);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> ChannelModel::Encode(std::span<const std::string> phonemes) const {
  std::vector<int> out;
  out.reserve(phonemes.size());
  for (const std::string &s : phonemes) {
    const auto id = Index(s);
    if (!id) throw InvalidArgument("phoneme '" + s + "' is not in the channel alphabet");
    out.push_back(*id);
  }
  return out;
}

ChannelModel ChannelModel::Read(std::istream &in) {
  std::vector<std::string> alphabet;
  std::optional<double> ins;
  std::unordered_map<std::string, double> del;
  std::unordered_map<std::string, std::vector<double>> sub;
  std::optional<double> default_del;
  std::string line;
  std::size_t offset = 0, line_no = 0;
  bool header = false;
  auto fail = [&](const std::string &msg, std::size_t at) {
    throw ParseError("channel: " + msg, at, ParseError::kNoIndex, line_no);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t here = offset;
    offset += line.size() + 1;
    const std::string_view body = Trim(line);
    if (body.empty() || body[0] == '#') continue;
    std::vector<std::string> f = SplitWhitespace(body);
    try {
      if (!header) {
        if (f.size() != 2 || f[0] != "sdtr-channel" || f[1] != "1")
          fail("expected header 'sdtr-channel 1'", here);
        header = true;
      } else if (f[0] == "alphabet") {
        if (!alphabet.empty()) fail("alphabet given twice", here);
        alphabet.assign(f.begin() + 1, f.end());
      } else if (f[0] == "insertion" && f.size() == 2) {
        ins = ParseDouble(f[1]);
      } else if (f[0] == "deletion" && f.size() == 2) {
        default_del = ParseDouble(f[1]);
      } else if (f[0] == "deletion" && f.size() == 3) {
        if (!del.emplace(f[1], ParseDouble(f[2])).second) fail("deletion given twice", here);
      } else if (f[0] == "sub" && f.size() >= 2) {
        std::vector<double> row;
        for (std::size_t i = 2; i < f.size(); ++i) row.push_back(ParseDouble(f[i]));
        if (!sub.emplace(f[1], std::move(row)).second) fail("row given twice", here);
      } else {
        fail("unrecognized line '" + std::string(body) + "'", here);
      }
    } catch (const InvalidArgument &e) {
      fail(e.what(), here);
    }
  }
  if (!header) fail("empty channel file", offset);
  if (alphabet.empty()) fail("missing alphabet", offset);
  if (!ins) fail("missing insertion rate", offset);
  std::vector<std::vector<double>> rows;
  std::vector<double> dels;
  for (const std::string &s : alphabet) {
    auto r = sub.find(s);
    if (r == sub.end()) fail("missing substitution row for '" + s + "'", offset);
    rows.push_back(r->second);
    auto d = del.find(s);
    if (d != del.end()) {
      dels.push_back(d->second);
    } else if (default_del) {
      dels.push_back(*default_del);
    } else {
      fail("missing deletion rate for '" + s + "'", offset);
    }
  }
  if (sub.size() != alphabet.size()) fail("substitution row for unknown symbol", offset);
  for (const auto &[s, v] : del)
    if (std::find(alphabet.begin(), alphabet.end(), s) == alphabet.end())
      fail("deletion rate for unknown symbol '" + s + "'", offset);
  try {
    return ChannelModel(std::move(alphabet), std::move(rows), std::move(dels), *ins);
  } catch (const InvalidArgument &e) {
    fail(e.what(), offset);
  }
  return Noiseless();  // not reached
}

void ChannelModel::Write(std::ostream &out) const {
  out << "sdtr-channel 1\n";
  out << "alphabet " << Join(alphabet_, " ") << '\n';
  out << "insertion " << FormatDouble(ins_) << '\n';
  for (std::size_t p = 0; p < size(); ++p)
    out << "deletion " << alphabet_[p] << ' ' << FormatDouble(del_[p]) << '\n';
  for (std::size_t p = 0; p < size(); ++p) {
    out << "sub " << alphabet_[p];
    for (double v : sub_[p]) out << ' ' << FormatDouble(v);
    out << '\n';
  }
}

double ChannelLogLik(std::span<const std::string> spoken, std::span<const std::string> heard,
                     const ChannelModel &channel) {
  return Forward(spoken, heard, channel, LogAdd);
}

double ChannelViterbiLogLik(std::span<const std::string> spoken,
                            std::span<const std::string> heard,
                            const ChannelModel &channel) {
  return Forward(spoken, heard, channel, [](double a, double b) { return std::max(a, b); });
}

Pronunciation Corrupt(std::span<const std::string> phonemes, const ChannelModel &channel,
                      Rng &rng) {
  const std::vector<int> p = channel.Encode(phonemes);
  const auto &alpha = channel.alphabet();
  Pronunciation out;
  for (std::size_t i = 0;; ++i) {
    while (rng.Uniform() < channel.insertion()) out.push_back(alpha[rng.Below(alpha.size())]);
    if (i == p.size()) break;
    const int s = p[i];
    if (rng.Uniform() < channel.deletion(s)) continue;
    const double u = rng.Uniform();
    double cum = 0.0;
    int q = s;
    for (std::size_t c = 0; c < alpha.size(); ++c) {
      cum += channel.sub(s, static_cast<int>(c));
      if (u < cum) {
        q = static_cast<int>(c);
        break;
      }
    }
    out.push_back(alpha[q]);
  }
  return out;
}

Pronunciation Corrupt(std::span<const std::string> phonemes, const ChannelModel &channel,
                      std::uint64_t seed) {
  Rng rng(seed);
  return Corrupt(phonemes, channel, rng);
}

}  // namespace sdtr
