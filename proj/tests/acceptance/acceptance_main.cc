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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "detectkit/attacks.h"
#include "detectkit/corpus.h"
#include "detectkit/detectors.h"
#include "detectkit/error.h"
#include "detectkit/language_model.h"
#include "detectkit/metrics.h"
#include "detectkit/rng.h"
#include "detectkit/sampling.h"
#include "detectkit/similarity.h"
#include "detectkit/tokenizer.h"
#include "detectkit/watermark.h"
#include "detectkit_cli/cli.h"
#include "mock_services.h"
#include "pipeline_fixture.h"
#include "synthetic.h"

namespace detectkit {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

// The default language model: order 3, add-0.1 smoothing, trained on the
// bundled essays.
const NGramModel& DefaultModel() {
  static const NGramModel model = [] {
    const Corpus essays = LoadCorpus(fs::path(DETECTKIT_FIXTURE_DIR) / "essays.jsonl");
    std::vector<std::string> texts;
    for (const auto& r : essays.records()) texts.push_back(r.body);
    return TrainNGram(texts, 3, Smoothing::AddK(0.1));
  }();
  return model;
}

const std::vector<TokenSequence>& FixturePrompts() {
  static const std::vector<TokenSequence> prompts = [] {
    const Corpus essays = LoadCorpus(fs::path(DETECTKIT_FIXTURE_DIR) / "essays.jsonl");
    std::vector<TokenSequence> out;
    for (const auto& r : essays.records()) {
      out.push_back(Tokenize(WatermarkPrompt(r), DefaultModel().vocabulary()));
    }
    return out;
  }();
  return prompts;
}

constexpr int kGenerations = 100;
constexpr int kMinScored = 200;

// 100 watermarked generations with at least 200 scored tokens each.
std::vector<TokenSequence> WatermarkedTexts(double delta) {
  WatermarkConfig cfg;
  cfg.delta = delta;
  cfg.max_tokens = 260;
  SampleOptions sampling;
  sampling.min_tokens = kMinScored + cfg.context_width;
  std::vector<TokenSequence> out;
  const auto& prompts = FixturePrompts();
  for (int i = 0; i < kGenerations; ++i) {
    out.push_back(GenerateWatermarked(DefaultModel(), prompts[i % prompts.size()], cfg,
                                      DeriveSeed(1, "generation-" + std::to_string(i)), sampling));
  }
  return out;
}

Outcome WatermarkRoundTrip() {
  const auto start = Clock::now();
  const WatermarkConfig detect_cfg;
  Outcome o;
  std::map<double, int> flagged;
  std::int64_t min_scored = 1 << 30;
  for (double delta : {2.0, 5.0}) {
    for (const auto& text : WatermarkedTexts(delta)) {
      const auto v = DetectWatermark(text, detect_cfg, 0.05);
      min_scored = std::min(min_scored, v.total);
      if (v.positive) ++flagged[delta];
    }
  }
  const double secs = Seconds(start);
  o.pass = flagged[2.0] >= 95 && flagged[5.0] == kGenerations && min_scored >= kMinScored &&
           secs < 60.0;
  o.detail = "delta=2 flagged " + std::to_string(flagged[2.0]) + "/100, delta=5 flagged " +
             std::to_string(flagged[5.0]) + "/100, min scored tokens " +
             std::to_string(min_scored) + ", " + Fmt("%.1fs", secs);
  return o;
}

Outcome NullCalibration() {
  const WatermarkConfig cfg;
  Rng rng(2024);
  int positives = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto text = testing::DistinctUniformTokens(500, 50000, rng);
    if (DetectWatermark(text, cfg, 0.05).positive) ++positives;
  }
  const double fpr = positives / 1000.0;
  const double band = 3.0 * std::sqrt(0.05 * 0.95 / 1000.0);
  Outcome o;
  o.pass = std::abs(fpr - 0.05) <= band;
  o.detail = "empirical FPR " + Fmt("%.3f", fpr) + ", allowed 0.050 +/- " + Fmt("%.4f", band);
  return o;
}

Outcome UniformityCritique() {
  const WatermarkConfig cfg;
  const testing::ZipfianPhraseCorpus generator;
  Rng rng(1234);
  std::vector<TokenSequence> texts;
  for (int i = 0; i < 1000; ++i) texts.push_back(generator.Generate(500, rng));
  const auto dist = EmpiricalGreenDistribution(texts, cfg, 0.05);
  const double fpr = static_cast<double>(dist.positives) / static_cast<double>(texts.size());
  Outcome o;
  o.pass = fpr > 0.10;
  o.detail = "Zipfian phrase corpus FPR " + Fmt("%.3f", fpr) + " at alpha 0.05, green variance " +
             Fmt("%.5f", dist.variance) + " vs binomial " + Fmt("%.5f", 0.25 * 0.75 / 499.0);
  return o;
}

Outcome WordReplacement() {
  const WatermarkConfig cfg;
  const std::size_t v = DefaultModel().vocabulary().size();
  SynonymLexicon lexicon;
  Rng rng(77);
  for (TokenId t = kNumReservedIds; t < v; ++t) {
    std::vector<TokenId> candidates;
    while (candidates.size() < 20) {
      const auto c = static_cast<TokenId>(kNumReservedIds + rng.UniformInt(v - kNumReservedIds));
      if (c != t) candidates.push_back(c);
    }
    lexicon.Add(t, std::move(candidates));
  }
  int evaded = 0;
  int before_positive = 0;
  int i = 0;
  for (const auto& text : WatermarkedTexts(2.0)) {
    if (DetectWatermark(text, cfg, 0.05).positive) ++before_positive;
    const auto attacked =
        SynonymSubstitute(text, lexicon, cfg, 1.0, DeriveSeed(9, std::to_string(i++)));
    if (DetectWatermark(attacked, cfg, 0.05).p_value > 0.05) ++evaded;
  }
  Outcome o;
  o.pass = evaded >= 90;
  o.detail = std::to_string(evaded) + "/100 attacked texts reach p > 0.05 (" +
             std::to_string(before_positive) + "/100 flagged before the attack)";
  return o;
}

Outcome PValueOracle() {
  using Big = boost::multiprecision::cpp_bin_float_50;
  Rng rng(5);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const std::int64_t total = 1 + static_cast<std::int64_t>(rng.UniformInt(5000));
    const std::int64_t green = static_cast<std::int64_t>(rng.UniformInt(total + 1));
    const double gamma = 0.01 + 0.98 * rng.Uniform();
    const auto v = VerdictFromCounts(green, total, gamma, 0.05);
    const Big g(green), t(total), gm(gamma);
    const Big z = (g - gm * t) / boost::multiprecision::sqrt(t * gm * (1 - gm));
    const Big p = boost::math::erfc(z / boost::multiprecision::sqrt(Big(2))) / 2;
    worst = std::max(worst, std::abs(v.p_value - p.convert_to<double>()));
  }
  Outcome o;
  o.pass = worst <= 1e-10;
  o.detail = "max |p - oracle| over 500 triples " + Fmt("%.3g", worst);
  return o;
}

Outcome PerplexitySeparation() {
  const auto words = testing::WordList(300);
  const testing::MarkovSource source_a(words, 6, 1.2, 11);
  const testing::MarkovSource source_b(words, 6, 1.2, 22);
  Rng rng(3);
  std::vector<std::string> train;
  for (int i = 0; i < 400; ++i) train.push_back(source_a.GenerateText(200, rng));
  const NGramModel model = TrainNGram(train, 2, Smoothing::AddK(0.01));
  const auto& vocab = model.vocabulary();

  auto ai_text = [&](std::uint64_t seed) {
    SampleOptions s;
    s.max_tokens = 150;
    s.min_tokens = 100;
    const TokenSequence prompt = {vocab.Id(words[seed % words.size()])};
    return Sample(model, prompt, s, seed);
  };
  auto human_text = [&]() { return Tokenize(source_b.GenerateText(150, rng), vocab); };
  std::vector<TokenSequence> cal_h, cal_ai;
  for (int i = 0; i < 60; ++i) {
    cal_h.push_back(human_text());
    cal_ai.push_back(ai_text(1000 + i));
  }
  const auto cal = CalibratePerplexity(cal_h, cal_ai, model);

  std::vector<ScoredLabel> scored;
  std::vector<double> band_ppl, band_score;
  auto score = [&](const TokenSequence& t, bool is_ai) {
    const double ppl = Perplexity(model, t);
    const double s = PerplexityScore(ppl, cal.low, cal.high);
    scored.push_back({s, is_ai});
    if (ppl > cal.low && ppl < cal.high) {
      band_ppl.push_back(ppl);
      band_score.push_back(s);
    }
  };
  for (int i = 0; i < 100; ++i) {
    score(human_text(), false);
    score(ai_text(5000 + i), true);
  }
  const double auc = Auc(scored);
  Outcome o;
  double r = 0.0;
  if (band_ppl.size() >= 2) r = PearsonCorrelation(band_ppl, band_score);
  o.pass = auc >= 0.9 && band_ppl.size() >= 2 && r <= -0.99;
  o.detail = "held-out AUC " + Fmt("%.4f", auc) + ", pearson r " + Fmt("%.6f", r) + " over " +
             std::to_string(band_ppl.size()) + " in-band texts";
  return o;
}

Outcome MetricOracles() {
  Rng rng(99);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<DetectionResult> results;
    TruthTable truth;
    std::vector<ScoredLabel> scores;
    std::vector<double> x, y;
    bool all_ai = true;
    for (int i = 0; i < 20; ++i) {
      DetectionResult r;
      r.text_id = "t" + std::to_string(i);
      r.positive = rng.Uniform() < 0.5;
      if (rng.Uniform() < 0.1) r.error = ErrorCode::kExternal;
      const bool ai = rng.Uniform() < 0.5;
      all_ai = all_ai && ai;
      truth[r.text_id] = ai;
      results.push_back(r);
      scores.push_back({static_cast<double>(rng.UniformInt(8)), ai});
      x.push_back(rng.Uniform());
      y.push_back(rng.Uniform());
    }
    // Brute-force enumeration.
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0, err = 0;
    for (const auto& r : results) {
      if (!r.ok()) {
        ++err;
        continue;
      }
      const bool ai = truth[r.text_id];
      tp += ai && r.positive;
      fp += !ai && r.positive;
      tn += !ai && !r.positive;
      fn += ai && !r.positive;
    }
    const auto c = Confusion(results, truth);
    if (!(c == ConfusionCounts{tp, fp, tn, fn, err})) ++mismatches;
    if (fp + tn > 0 && *Fpr(c) != static_cast<double>(fp) / static_cast<double>(fp + tn)) ++mismatches;
    if (fn + tp > 0 && *Fnr(c) != static_cast<double>(fn) / static_cast<double>(fn + tp)) ++mismatches;

    std::vector<DetectionResult> ai_only;
    for (const auto& r : results) {
      if (truth[r.text_id]) ai_only.push_back(r);
    }
    if (AttackSuccessRate(ai_only, truth) != Fnr(Confusion(ai_only, truth))) ++mismatches;

    double wins = 0.0, pairs = 0.0;
    for (const auto& a : scores) {
      for (const auto& h : scores) {
        if (!a.is_ai || h.is_ai) continue;
        pairs += 1.0;
        wins += a.score > h.score ? 1.0 : (a.score == h.score ? 0.5 : 0.0);
      }
    }
    if (pairs > 0 && std::abs(Auc(scores) - wins / pairs) > 1e-12) ++mismatches;

    long double mx = 0, my = 0;
    for (int i = 0; i < 20; ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= 20;
    my /= 20;
    long double sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < 20; ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    const double r = static_cast<double>(sxy / std::sqrt(sxx * syy));
    if (std::abs(PearsonCorrelation(x, y) - r) > 1e-12) ++mismatches;
    (void)all_ai;
  }

  // Reference attack and baseline FNRs with their published deltas.
  struct DeltaCase {
    double attack, baseline, expected;
  };
  const DeltaCase cases[] = {{89.64, 19.14, 70.50}, {88.75, 19.14, 69.61}, {75.00, 19.14, 55.86},
                             {22.50, 2.50, 20.00},  {51.25, 2.50, 48.75},  {1.25, 2.50, -1.25},
                             {91.55, 0.00, 91.55}};
  int delta_mismatches = 0;
  for (const auto& d : cases) {
    const Percent delta = FnrDelta(Percent{d.attack}, Percent{d.baseline});
    if (Fmt("%+.2f", delta.value) != Fmt("%+.2f", d.expected)) ++delta_mismatches;
  }
  Outcome o;
  o.pass = mismatches == 0 && delta_mismatches == 0;
  o.detail = std::to_string(mismatches) + " mismatches over 1000 random 20-element fixtures, " +
             std::to_string(delta_mismatches) + " FNR delta mismatches (89.64 - 19.14 = " +
             Fmt("%+.2f", FnrDelta(Percent{89.64}, Percent{19.14}).value) + ", 1.25 - 2.50 = " +
             Fmt("%+.2f", FnrDelta(Percent{1.25}, Percent{2.50}).value) + ")";
  return o;
}

class IdentityParaphraser : public Paraphraser {
 public:
  std::string Paraphrase(const std::string& prompt) override {
    return prompt.substr(prompt.find(": ") + 2);
  }
};

Outcome SimilarityIdentities() {
  const HashingEmbedder emb;
  const auto words = testing::WordList(500);
  Rng rng(8);
  auto random_text = [&] {
    std::vector<std::string> w;
    for (std::size_t i = 0, n = 5 + rng.UniformInt(80); i < n; ++i) {
      w.push_back(words[rng.UniformInt(words.size())]);
    }
    return testing::JoinWords(w);
  };
  double self_err = 0.0, sym_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto a = emb.Embed(random_text());
    const auto b = emb.Embed(random_text());
    self_err = std::max(self_err, std::abs(CosineSimilarity(a, a) - 1.0));
    sym_err = std::max(sym_err, std::abs(CosineSimilarity(a, b) - CosineSimilarity(b, a)));
  }

  Corpus corpus = LoadCorpus(fs::path(DETECTKIT_FIXTURE_DIR) / "essays.jsonl");
  std::vector<std::string> human_ids;
  for (const auto& r : corpus.records()) human_ids.push_back(r.id);
  IdentityParaphraser identity;
  for (const auto& id : human_ids) {
    const std::string gen = corpus.AppendDerived(id, corpus.Get(id).body + " generated",
                                                 Provenance::Generated(), {})
                                .id;
    for (AttackName a : {AttackName::kPerplexity, AttackName::kCollegeStudent,
                         AttackName::kRecursive}) {
      RunAttack(AttackSpec::For(a), gen, identity, corpus);
    }
  }
  const auto identity_row = AverageSimilarity(
      corpus, PairSelector::GeneratedVsParaphrase(AttackName::kPerplexity), emb);
  const auto rows = SimilarityReport(corpus, emb);
  const std::vector<std::string> expected = {
      "Human Text vs. Human Text", "Human Text vs. Original GPT Generation",
      "Original GPT Generation vs. Perplexity Paraphrasing",
      "Original GPT Generation vs. College Student Paraphrasing",
      "Original GPT Generation vs. Recursive Paraphrasing"};
  std::vector<std::string> labels;
  for (const auto& r : rows) labels.push_back(r.label);
  const std::string csv = SimilarityReportCsv(rows);

  Outcome o;
  o.pass = self_err <= 1e-9 && sym_err == 0.0 && identity_row.average == 1.0 &&
           labels == expected && csv.rfind("texts,avg_cosine,pairs\n", 0) == 0;
  o.detail = "max |cos(v,v)-1| " + Fmt("%.2g", self_err) + ", max asymmetry " +
             Fmt("%.2g", sym_err) + ", identity paraphrase average " +
             Fmt("%.17g", identity_row.average) + ", " + std::to_string(rows.size()) +
             "-row similarity table";
  return o;
}

Outcome ThresholdRules() {
  int failures = 0;
  auto expect = [&](bool got, bool want) { failures += got != want; };
  expect(WatermarkRulePositive(0.0500, 0.05), false);
  expect(WatermarkRulePositive(0.0499, 0.05), true);
  expect(ProbabilityRulePositive(49.9), false);
  expect(ProbabilityRulePositive(50.0), true);
  expect(LabelBandPositive("Your Text is Human written"), false);
  expect(LabelBandPositive("Your Text is Most Likely Human written"), false);
  expect(LabelBandPositive("Your Text is AI/GPT Generated"), true);

  // The same rules through the external detector client.
  EndpointConfig endpoint;
  endpoint.requests_per_minute = 0;
  auto classify = [&](const std::string& body, ExternalRule rule) {
    testing::MockService svc("/detect", testing::FixedHandler(200, body));
    endpoint.url = svc.url();
    ExternalDetector det("ext", endpoint, rule);
    return det.Classify({"t", "Some essay text."});
  };
  auto external = [&](const std::string& body, ExternalRule rule, bool want) {
    const auto r = classify(body, rule);
    failures += !r.ok() || r.positive != want;
  };
  external(R"({"score": 49.9, "label": "x"})", ExternalRule::kProbability, false);
  external(R"({"score": 50.0, "label": "x"})", ExternalRule::kProbability, true);
  external(R"({"score": 3.4, "label": "Your Text is Human written"})", ExternalRule::kLabelBands,
           false);
  external(R"({"score": 97, "label": "Your Text is Most Likely Human written"})",
           ExternalRule::kLabelBands, false);
  Outcome o;
  o.pass = failures == 0;
  o.detail = std::to_string(failures) + " boundary failures across 11 checks";
  return o;
}

std::map<std::string, std::string> ReportFiles(const fs::path& out) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(out / "reports")) {
    files[e.path().filename().string()] = testing::ReadFile(e.path());
  }
  files["similarity.csv"] = testing::ReadFile(out / "similarity.csv");
  return files;
}

Outcome EndToEndDeterminism() {
  const auto start = Clock::now();
  testing::MockService paraphraser("/paraphrase",
                                   testing::ParaphraserHandler(testing::ShuffleWords));
  testing::MockService detector("/detect", testing::DetectorHandler());
  std::vector<std::map<std::string, std::string>> runs;
  std::string failure;
  for (int run = 0; run < 2 && failure.empty(); ++run) {
    testing::PipelineWorkspace ws("acceptance_run" + std::to_string(run), paraphraser.url(),
                                  detector.url());
    for (const auto& stage : testing::PipelineStages()) {
      std::vector<std::string> args = {"--config", ws.config().string(), "--jobs",
                                       run == 0 ? "1" : "4"};
      args.insert(args.end(), stage.begin(), stage.end());
      std::ostringstream out, err;
      if (cli::RunCli(args, out, err) != 0) {
        failure = stage[0] + " failed: " + err.str();
        break;
      }
    }
    if (failure.empty()) runs.push_back(ReportFiles(ws.out()));
  }
  const double secs = Seconds(start);
  Outcome o;
  if (!failure.empty()) {
    o.detail = failure;
    return o;
  }
  std::size_t differing = 0;
  for (const auto& [name, contents] : runs[0]) {
    auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != contents) ++differing;
  }
  o.pass = differing == 0 && runs[0].size() == runs[1].size() && runs[0].size() >= 13 &&
           secs < 120.0;
  o.detail = std::to_string(runs[0].size()) + " CSV files, " + std::to_string(differing) +
             " differ between runs, " + Fmt("%.1fs", secs) + " for both runs";
  return o;
}

}  // namespace
}  // namespace detectkit

int main() {
  using detectkit::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"watermark round trip", detectkit::WatermarkRoundTrip},
      {"null calibration", detectkit::NullCalibration},
      {"uniformity critique", detectkit::UniformityCritique},
      {"word replacement attack", detectkit::WordReplacement},
      {"detection statistic oracle", detectkit::PValueOracle},
      {"perplexity detector separation", detectkit::PerplexitySeparation},
      {"metric oracles", detectkit::MetricOracles},
      {"similarity identities", detectkit::SimilarityIdentities},
      {"threshold rules", detectkit::ThresholdRules},
      {"end-to-end determinism", detectkit::EndToEndDeterminism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first
              << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
