// Copyright 2026 The detectkit Authors.
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

#include "detectkit/language_model.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "detectkit/error.h"
#include "detectkit/rng.h"
#include "detectkit/sampling.h"
#include "detectkit/tokenizer.h"
#include "synthetic.h"

namespace detectkit {
namespace {

double SumOf(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

TEST(TrainNGram, AddKBigramHandCount) {
  const NGramModel m = TrainNGram({"a b a b"}, 2, Smoothing::AddK(1.0));
  const auto& v = m.vocabulary();
  ASSERT_EQ(v.size(), 5u);  // <unk> <s> </s> a b
  const TokenId a = v.Id("a"), b = v.Id("b");
  const std::vector<TokenId> ctx_a = {a};
  EXPECT_DOUBLE_EQ(m.Probability(ctx_a, b), 3.0 / 7.0);
  EXPECT_EQ(m.Count(ctx_a, b), 2u);
  EXPECT_EQ(m.ContextTotal(ctx_a), 2u);
  EXPECT_EQ(m.trained_tokens(), 5u);  // four words plus </s>
}

TEST(TrainNGram, PerplexityHandProduct) {
  const NGramModel m = TrainNGram({"a b a b"}, 2, Smoothing::AddK(1.0));
  const auto ids = Tokenize("a b a b", m.vocabulary());
  // P(a|<s>) P(b|a) P(a|b) P(b|a) P(</s>|b) with V = 5.
  const double product = (2.0 / 6.0) * (3.0 / 7.0) * (2.0 / 7.0) * (3.0 / 7.0) * (2.0 / 7.0);
  EXPECT_NEAR(Perplexity(m, ids), std::pow(product, -1.0 / 5.0), 1e-12);
}

TEST(TrainNGram, Errors) {
  EXPECT_THROW(TrainNGram({"a"}, 0, Smoothing::AddK(1.0)), Error);
  EXPECT_THROW(TrainNGram({"", "  "}, 2, Smoothing::AddK(1.0)), Error);
  EXPECT_THROW(TrainNGram(std::vector<std::string>{}, 2, Smoothing::AddK(1.0)), Error);
  EXPECT_THROW(TrainNGram({"a"}, 2, Smoothing::AddK(0.0)), Error);
}

TEST(TrainNGram, VocabularyIsSortedAfterReserved) {
  const NGramModel m = TrainNGram({"zeta alpha", "mid"}, 2, Smoothing::AddK(1.0));
  const auto& t = m.vocabulary().tokens();
  ASSERT_EQ(t.size(), 6u);
  EXPECT_EQ(t[3], "alpha");
  EXPECT_EQ(t[4], "mid");
  EXPECT_EQ(t[5], "zeta");
}

class DistributionTest : public ::testing::TestWithParam<Smoothing> {};

TEST_P(DistributionTest, NormalizedAndPositive) {
  Rng rng(11);
  testing::MarkovSource src(testing::WordList(60), 4, 1.0, 3);
  std::vector<std::string> texts;
  for (int i = 0; i < 20; ++i) texts.push_back(src.GenerateText(80, rng));
  const NGramModel m = TrainNGram(texts, 3, GetParam());
  const std::size_t v = m.vocabulary().size();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TokenId> ctx(rng.UniformInt(4));
    for (auto& t : ctx) t = static_cast<TokenId>(rng.UniformInt(v));
    const auto p = m.Distribution(ctx);
    ASSERT_EQ(p.size(), v);
    EXPECT_NEAR(SumOf(p), 1.0, 1e-9);
    for (double x : p) EXPECT_GT(x, 0.0);
    const auto logits = m.NextTokenLogits(ctx);
    const auto again = m.NextTokenLogits(ctx);
    EXPECT_EQ(logits, again);
    const auto logp = LogSoftmax(logits);
    for (std::size_t i = 0; i < v; ++i) EXPECT_NEAR(std::exp(logp[i]), p[i], 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Smoothings, DistributionTest,
                         ::testing::Values(Smoothing::AddK(0.1), Smoothing::AddK(1.0),
                                           Smoothing::WittenBell()));

TEST(NGramModel, OnlyLastContextTokensMatter) {
  const NGramModel m = TrainNGram({"a b c a b d a b c"}, 3, Smoothing::AddK(0.1));
  const auto& v = m.vocabulary();
  const std::vector<TokenId> long_ctx = {v.Id("d"), v.Id("c"), v.Id("a"), v.Id("b")};
  const std::vector<TokenId> short_ctx = {v.Id("a"), v.Id("b")};
  EXPECT_EQ(m.NextTokenLogits(long_ctx), m.NextTokenLogits(short_ctx));
}

TEST(NGramModel, UnseenContextAddKIsUniform) {
  const NGramModel m = TrainNGram({"a b c"}, 2, Smoothing::AddK(0.1));
  const std::vector<TokenId> ctx = {kEosId};
  const auto p = m.Distribution(ctx);
  for (double x : p) EXPECT_DOUBLE_EQ(x, 1.0 / static_cast<double>(p.size()));
}

// Independent Witten-Bell recursion over raw n-gram counts.
struct WbOracle {
  int order;
  std::size_t v;
  std::map<std::vector<TokenId>, std::map<TokenId, double>> counts;  // context -> next -> c

  void Add(const TokenSequence& text) {
    std::vector<TokenId> padded(static_cast<std::size_t>(order - 1), kBosId);
    padded.insert(padded.end(), text.begin(), text.end());
    padded.push_back(kEosId);
    for (std::size_t i = static_cast<std::size_t>(order - 1); i < padded.size(); ++i) {
      for (int n = 1; n <= order; ++n) {
        std::vector<TokenId> ctx(padded.begin() + static_cast<long>(i) - (n - 1),
                                 padded.begin() + static_cast<long>(i));
        counts[ctx][padded[i]] += 1.0;
      }
    }
  }

  double P(std::vector<TokenId> ctx, TokenId w) const {
    const double base = 1.0 / static_cast<double>(v);
    if (ctx.empty()) {
      auto it = counts.find(ctx);
      double total = 0.0, types = 0.0, c = 0.0;
      for (const auto& [t, n] : it->second) {
        total += n;
        types += 1.0;
        if (t == w) c = n;
      }
      return (c + types * base) / (total + types);
    }
    std::vector<TokenId> shorter(ctx.begin() + 1, ctx.end());
    const double lower = P(shorter, w);
    auto it = counts.find(ctx);
    if (it == counts.end()) return lower;
    double total = 0.0, types = 0.0, c = 0.0;
    for (const auto& [t, n] : it->second) {
      total += n;
      types += 1.0;
      if (t == w) c = n;
    }
    return (c + types * lower) / (total + types);
  }
};

TEST(NGramModel, WittenBellMatchesRecursiveOracle) {
  const std::vector<std::string> texts = {"a b c a b", "b c d", "a a b d c"};
  const NGramModel m = TrainNGram(texts, 3, Smoothing::WittenBell());
  const auto& v = m.vocabulary();
  WbOracle oracle{3, v.size(), {}};
  for (const auto& t : texts) oracle.Add(Tokenize(t, v));
  const std::vector<std::vector<TokenId>> contexts = {
      {kBosId, kBosId}, {v.Id("a"), v.Id("b")}, {v.Id("d"), v.Id("a")},  // unseen pair
      {kEosId, kEosId},                                                // unseen everywhere
      {v.Id("c"), v.Id("d")}};
  for (const auto& ctx : contexts) {
    for (TokenId w = 0; w < v.size(); ++w) {
      EXPECT_NEAR(m.Probability(ctx, w), oracle.P(ctx, w), 1e-12);
    }
  }
}

TEST(NGramModel, SerializationRoundTrip) {
  Rng rng(5);
  testing::MarkovSource src(testing::WordList(40), 3, 1.0, 9);
  std::vector<std::string> texts;
  for (int i = 0; i < 10; ++i) texts.push_back(src.GenerateText(50, rng));
  for (const auto& smoothing : {Smoothing::AddK(0.1), Smoothing::WittenBell()}) {
    const NGramModel m = TrainNGram(texts, 3, smoothing);
    const auto path = std::filesystem::temp_directory_path() / "detectkit_model_rt.json";
    SaveModel(m, path);
    const NGramModel loaded = LoadModel(path);
    std::filesystem::remove(path);
    EXPECT_TRUE(loaded == m);
    EXPECT_EQ(SerializeModel(loaded), SerializeModel(m));
    const auto ids = Tokenize(texts[0], m.vocabulary());
    const double a = Perplexity(m, ids), b = Perplexity(loaded, ids);
    EXPECT_LE(std::abs(a - b) / a, 1e-12);
  }
}

TEST(NGramModel, DeserializeRejectsBadDocuments) {
  const NGramModel m = TrainNGram({"a b"}, 2, Smoothing::AddK(1.0));
  std::string doc = SerializeModel(m);
  EXPECT_THROW(DeserializeModel("{}"), Error);
  EXPECT_THROW(DeserializeModel("not json"), Error);
  std::string wrong_version = doc;
  wrong_version.replace(wrong_version.find("\"version\":1"), 11, "\"version\":9");
  EXPECT_THROW(DeserializeModel(wrong_version), Error);
}

}  // namespace
}  // namespace detectkit
