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

#include "detectkit/detectors.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "detectkit/error.h"
#include "detectkit/metrics.h"
#include "detectkit/sampling.h"
#include "detectkit/tokenizer.h"
#include "json.hpp"
#include "mock_services.h"
#include "synthetic.h"

namespace detectkit {
namespace {

using testing::FixedHandler;
using testing::MockService;

EndpointConfig Endpoint(const std::string& url) {
  EndpointConfig c;
  c.url = url;
  c.timeout = std::chrono::milliseconds(2000);
  c.max_retries = 1;
  c.initial_backoff = std::chrono::milliseconds(5);
  c.requests_per_minute = 0;
  return c;
}

std::string Response(double score, const std::string& label) {
  return nlohmann::json{{"score", score}, {"label", label}}.dump();
}

TEST(DecisionRules, WatermarkBoundary) {
  EXPECT_TRUE(WatermarkRulePositive(0.03, 0.05));
  EXPECT_TRUE(WatermarkRulePositive(0.0499, 0.05));
  EXPECT_FALSE(WatermarkRulePositive(0.0500, 0.05));
}

TEST(DecisionRules, ProbabilityBoundary) {
  EXPECT_FALSE(ProbabilityRulePositive(49.9));
  EXPECT_TRUE(ProbabilityRulePositive(50.0));
  EXPECT_FALSE(ProbabilityRulePositive(0.0));
  EXPECT_TRUE(ProbabilityRulePositive(100.0));
}

TEST(DecisionRules, LabelBandsAreTotalOverDocumentedLabels) {
  for (const auto& l : NegativeBandLabels()) EXPECT_FALSE(LabelBandPositive(l)) << l;
  for (const auto& l : PositiveBandLabels()) EXPECT_TRUE(LabelBandPositive(l)) << l;
  for (const auto& n : NegativeBandLabels()) {
    EXPECT_EQ(std::count(PositiveBandLabels().begin(), PositiveBandLabels().end(), n), 0);
  }
  EXPECT_FALSE(LabelBandPositive("Your Text is Human written"));
  EXPECT_FALSE(LabelBandPositive("Your Text is Most Likely Human written"));
  EXPECT_FALSE(LabelBandPositive("  your text is human written "));
  EXPECT_THROW(LabelBandPositive("Probably a robot"), Error);
}

TEST(DecisionRules, StrictBands) {
  EXPECT_FALSE(StrictBandPositive("Human"));
  EXPECT_TRUE(StrictBandPositive("AI"));
  EXPECT_TRUE(StrictBandPositive("mixed"));
  EXPECT_THROW(StrictBandPositive("Unsure"), Error);
}

TEST(ExternalDetector, HumanLabelNegativeWithRawScore) {
  MockService svc("/d", FixedHandler(200, Response(3.40, "Your Text is Human written")));
  ExternalDetector det("zerogpt", Endpoint(svc.url()), ExternalRule::kLabelBands);
  const auto r = det.Classify({"t1", "Some essay text."});
  ASSERT_TRUE(r.ok()) << r.error_message;
  EXPECT_FALSE(r.positive);
  EXPECT_DOUBLE_EQ(r.raw_score, 3.40);
  EXPECT_EQ(r.detail.at("label"), "Your Text is Human written");
  EXPECT_EQ(r.detail.at("response"), Response(3.40, "Your Text is Human written"));
  EXPECT_EQ(r.text_id, "t1");
  EXPECT_EQ(r.detector_id, "zerogpt");
}

TEST(ExternalDetector, MostLikelyHumanIsNegativeRegardlessOfScore) {
  MockService svc("/d", FixedHandler(200, Response(97.0, "Your Text is Most Likely Human written")));
  ExternalDetector det("z", Endpoint(svc.url()), ExternalRule::kLabelBands);
  const auto r = det.Classify({"t", "x"});
  ASSERT_TRUE(r.ok());
  EXPECT_FALSE(r.positive);
}

TEST(ExternalDetector, ProbabilityRuleBoundaries) {
  for (const auto& [score, positive] : {std::pair{49.9, false}, std::pair{50.0, true}}) {
    MockService svc("/d", FixedHandler(200, Response(score, "")));
    ExternalDetector det("gptzero", Endpoint(svc.url()), ExternalRule::kProbability);
    const auto r = det.Classify({"t", "x"});
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.positive, positive) << score;
    EXPECT_DOUBLE_EQ(r.threshold, 50.0);
  }
}

TEST(ExternalDetector, StrictModeUsesBandLabel) {
  MockService svc("/d", FixedHandler(200, Response(10.0, "Mixed")));
  ExternalDetector det("g", Endpoint(svc.url()), ExternalRule::kProbabilityStrict);
  const auto r = det.Classify({"t", "x"});
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r.positive);
}

TEST(ExternalDetector, OverCapTextRejectedLocally) {
  MockService svc("/d", FixedHandler(200, Response(1.0, "Your Text is Human written")));
  ExternalDetector det("z", Endpoint(svc.url()), ExternalRule::kLabelBands);
  const auto r = det.Classify({"t", std::string(15001, 'a')});
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(svc.calls(), 0u);
  const auto ok = det.Classify({"t", std::string(15000, 'a')});
  EXPECT_TRUE(ok.ok());
  EXPECT_EQ(svc.calls(), 1u);
  // The cap counts characters, not bytes.
  std::string accented;
  for (int i = 0; i < 15000; ++i) accented += "\xC3\xA9";
  EXPECT_TRUE(det.Classify({"t", accented}).ok());
}

TEST(ExternalDetector, RateLimitBecomesErrorResult) {
  MockService svc("/d", FixedHandler(429, "{}"));
  ExternalDetector det("z", Endpoint(svc.url()), ExternalRule::kLabelBands);
  const auto r = det.Classify({"t", "x"});
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(*r.error, ErrorCode::kRateLimited);
  EXPECT_EQ(svc.calls(), 2u);
  EXPECT_FALSE(r.positive);
}

TEST(ExternalDetector, UnknownLabelAndBadResponsesAreErrors) {
  {
    MockService svc("/d", FixedHandler(200, Response(60.0, "Who knows")));
    ExternalDetector det("z", Endpoint(svc.url()), ExternalRule::kLabelBands);
    const auto r = det.Classify({"t", "x"});
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(*r.error, ErrorCode::kParse);
  }
  for (const char* body : {"not json", R"({"label":"x"})", R"({"score":150})"}) {
    MockService svc("/d", FixedHandler(200, body));
    ExternalDetector det("z", Endpoint(svc.url()), ExternalRule::kProbability);
    const auto r = det.Classify({"t", "x"});
    ASSERT_FALSE(r.ok()) << body;
    EXPECT_EQ(*r.error, ErrorCode::kParse);
  }
}

TEST(PerplexityScore, AnchorsAndLinearity) {
  EXPECT_DOUBLE_EQ(PerplexityScore(10.0, 10.0, 30.0), 100.0);
  EXPECT_DOUBLE_EQ(PerplexityScore(30.0, 10.0, 30.0), 0.0);
  EXPECT_DOUBLE_EQ(PerplexityScore(20.0, 10.0, 30.0), 50.0);
  EXPECT_DOUBLE_EQ(PerplexityScore(5.0, 10.0, 30.0), 100.0);
  EXPECT_DOUBLE_EQ(PerplexityScore(50.0, 10.0, 30.0), 0.0);
  EXPECT_THROW(PerplexityScore(20.0, 30.0, 30.0), Error);
  EXPECT_THROW(PerplexityScore(20.0, 40.0, 30.0), Error);
}

TEST(PerplexityScore, MonotoneAndLinearInsideBand) {
  Rng rng(4);
  std::vector<double> ppl, score;
  for (int i = 0; i < 200; ++i) ppl.push_back(5.0 + 100.0 * rng.Uniform());
  std::sort(ppl.begin(), ppl.end());
  for (std::size_t i = 0; i < ppl.size(); ++i) {
    score.push_back(PerplexityScore(ppl[i], 20.0, 80.0));
    if (i > 0) {
      EXPECT_GE(score[i - 1], score[i]);
    }
  }
  std::vector<double> band_ppl, band_score;
  for (std::size_t i = 0; i < ppl.size(); ++i) {
    if (ppl[i] > 20.0 && ppl[i] < 80.0) {
      band_ppl.push_back(ppl[i]);
      band_score.push_back(score[i]);
    }
  }
  EXPECT_NEAR(PearsonCorrelation(band_ppl, band_score), -1.0, 1e-12);
}

TEST(Percentile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(Percentile({1, 2, 3, 4, 5}, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(Percentile({5, 1, 4, 2, 3}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(Percentile({1, 2, 3, 4, 5}, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(Percentile({0, 10}, 0.05), 0.5);
  EXPECT_THROW(Percentile({}, 0.5), Error);
}

// Exhaustive scan over candidate cuts: every observed score plus +inf.
YoudenChoice BruteForceYouden(const std::vector<double>& human, const std::vector<double>& ai) {
  std::vector<double> cuts = human;
  cuts.insert(cuts.end(), ai.begin(), ai.end());
  YoudenChoice best{0.0, -10.0};
  for (double cut : cuts) {
    double tp = 0, fp = 0;
    for (double s : ai) tp += s >= cut;
    for (double s : human) fp += s >= cut;
    const double j = tp / ai.size() - fp / human.size();
    if (j > best.j || (j == best.j && cut < best.threshold)) best = {cut, j};
  }
  return best;
}

TEST(SelectYoudenThreshold, MatchesBruteForce) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> human, ai;
    const std::size_t nh = 1 + rng.UniformInt(15), na = 1 + rng.UniformInt(15);
    for (std::size_t i = 0; i < nh; ++i) human.push_back(static_cast<double>(rng.UniformInt(20)));
    for (std::size_t i = 0; i < na; ++i) ai.push_back(static_cast<double>(5 + rng.UniformInt(20)));
    const auto got = SelectYoudenThreshold(human, ai);
    const auto want = BruteForceYouden(human, ai);
    EXPECT_DOUBLE_EQ(got.j, want.j);
    EXPECT_DOUBLE_EQ(got.threshold, want.threshold);
  }
}

TEST(CalibrateFromPerplexities, PerfectSeparation) {
  const std::vector<double> human = {60, 70, 80, 90, 100, 110};
  const std::vector<double> ai = {10, 15, 20, 25, 30, 35};
  const auto c = CalibrateFromPerplexities(human, ai);
  EXPECT_LT(c.low, c.high);
  EXPECT_DOUBLE_EQ(c.youden_j, 1.0);
  for (double p : human) EXPECT_LT(PerplexityScore(p, c.low, c.high), c.threshold);
  for (double p : ai) EXPECT_GE(PerplexityScore(p, c.low, c.high), c.threshold);
}

TEST(CalibrateFromPerplexities, IdenticalDistributionsAreDeterministic) {
  const std::vector<double> same = {10, 20, 30, 40, 50};
  const auto a = CalibrateFromPerplexities(same, same);
  const auto b = CalibrateFromPerplexities(same, same);
  EXPECT_NEAR(a.youden_j, 0.0, 1e-12);
  EXPECT_EQ(a.threshold, b.threshold);
  EXPECT_DOUBLE_EQ(a.threshold, 0.0);  // lowest cut wins the all-zero tie
}

TEST(CalibrateFromPerplexities, Errors) {
  EXPECT_THROW(CalibrateFromPerplexities({}, std::vector<double>{1.0}), Error);
  EXPECT_THROW(CalibrateFromPerplexities(std::vector<double>{5.0}, std::vector<double>{5.0}),
               Error);
}

class LocalDetectorsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(3);
    testing::MarkovSource src(testing::WordList(200), 6, 1.0, 12);
    std::vector<std::string> texts;
    for (int i = 0; i < 30; ++i) texts.push_back(src.GenerateText(200, rng));
    model_ = std::make_shared<NGramModel>(TrainNGram(texts, 3, Smoothing::AddK(0.1)));
  }
  std::shared_ptr<NGramModel> model_;
};

TEST_F(LocalDetectorsTest, WatermarkDetectorFlagsWatermarkedText) {
  WatermarkConfig cfg;
  const auto ids = GenerateWatermarked(*model_, TokenSequence{5}, cfg, 1, {.min_tokens = 200});
  const std::string body = Detokenize(ids, model_->vocabulary());
  auto vocab = std::make_shared<Vocabulary>(model_->vocabulary());
  WatermarkDetector det("wm", vocab, cfg, 0.05);
  const auto r = det.Classify({"x", body});
  ASSERT_TRUE(r.ok()) << r.error_message;
  EXPECT_TRUE(r.positive);
  EXPECT_LT(r.raw_score, 0.05);
  EXPECT_EQ(r.detail.at("total"), std::to_string(ids.size() - 1));
  const auto again = det.Classify({"x", body});
  EXPECT_EQ(again.raw_score, r.raw_score);
  EXPECT_EQ(again.detail, r.detail);
}

TEST_F(LocalDetectorsTest, WatermarkDetectorShortTextIsErrorResult) {
  auto vocab = std::make_shared<Vocabulary>(model_->vocabulary());
  WatermarkDetector det("wm", vocab, WatermarkConfig{}, 0.05);
  const auto r = det.Classify({"x", "w0001 w0002 w0003"});
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(*r.error, ErrorCode::kInsufficientTokens);
}

TEST_F(LocalDetectorsTest, PerplexityDetectorDeterministicAndConsistent) {
  PerplexityCalibration cal{20.0, 200.0, 50.0, 0.0};
  PerplexityDetector det("ppl", model_, cal);
  const auto ids = Sample(*model_, {}, {.max_tokens = 100, .min_tokens = 50}, 4);
  const std::string body = Detokenize(ids, model_->vocabulary());
  const auto r = det.Classify({"a", body});
  ASSERT_TRUE(r.ok());
  const double ppl = std::stod(r.detail.at("perplexity"));
  EXPECT_DOUBLE_EQ(r.raw_score, PerplexityScore(ppl, 20.0, 200.0));
  EXPECT_EQ(r.positive, r.raw_score >= 50.0);
  const auto again = det.Classify({"a", body});
  EXPECT_EQ(again.raw_score, r.raw_score);
  EXPECT_FALSE(det.Classify({"e", "   "}).ok());
}

TEST_F(LocalDetectorsTest, MakeDetectorDispatches) {
  auto vocab = std::make_shared<Vocabulary>(model_->vocabulary());
  const auto wm = MakeDetector({"wm", WatermarkSpec{WatermarkConfig{}, 0.05, vocab}});
  EXPECT_EQ(wm->id(), "wm");
  const auto ppl = MakeDetector({"ppl", PerplexitySpec{model_, {1.0, 2.0, 50.0, 0.0}}});
  EXPECT_EQ(ppl->id(), "ppl");
  EssayRecord rec;
  rec.id = "r";
  rec.body = "w0001 w0002";
  rec.provenance = Provenance::Human();
  EXPECT_EQ(Classify(*ppl, rec).text_id, "r");
}

}  // namespace
}  // namespace detectkit
