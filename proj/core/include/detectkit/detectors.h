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

#ifndef DETECTKIT_DETECTORS_H_
#define DETECTKIT_DETECTORS_H_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "detectkit/corpus.h"
#include "detectkit/error.h"
#include "detectkit/http_client.h"
#include "detectkit/language_model.h"
#include "detectkit/watermark.h"

namespace detectkit {

// What a detector is allowed to see: never the provenance label.
struct TextInput {
  std::string id;
  std::string body;
};

inline TextInput ToTextInput(const EssayRecord& record) { return {record.id, record.body}; }

// raw_score means: watermark p-value; perplexity "AI %" in [0, 100];
// external "AI probability" in [0, 100]. A result with `error` set carries
// no decision and is tallied separately by the evaluation code.
struct DetectionResult {
  std::string detector_id;
  std::string text_id;
  double raw_score = 0.0;
  bool positive = false;
  double threshold = 0.0;
  std::map<std::string, std::string> detail;
  std::optional<ErrorCode> error;
  std::string error_message;

  bool ok() const { return !error.has_value(); }
};

class Detector {
 public:
  virtual ~Detector() = default;
  virtual const std::string& id() const = 0;

  // Per-text failures (too few tokens, endpoint errors) come back as error
  // results rather than exceptions.
  virtual DetectionResult Classify(const TextInput& input) const = 0;
};

// Decision rules.
// Watermark: positive iff p < alpha.
bool WatermarkRulePositive(double p_value, double alpha);
// Probability: negative iff AI probability < 50.
inline constexpr double kAiProbabilityThreshold = 50.0;
bool ProbabilityRulePositive(double ai_probability);
// Label bands: only the two "human written" verdicts are negative; other
// documented labels are positive; anything else throws kParse. Matching
// ignores ASCII case and surrounding whitespace.
bool LabelBandPositive(std::string_view label);
const std::vector<std::string>& NegativeBandLabels();
const std::vector<std::string>& PositiveBandLabels();
// Strict three-band mode: negative iff the label is "Human"; "AI" and
// "Mixed" are positive; anything else throws kParse.
bool StrictBandPositive(std::string_view label);

class WatermarkDetector : public Detector {
 public:
  WatermarkDetector(std::string id, std::shared_ptr<const Vocabulary> vocabulary,
                    WatermarkConfig config, double alpha);

  const std::string& id() const override { return id_; }
  DetectionResult Classify(const TextInput& input) const override;

 private:
  std::string id_;
  std::shared_ptr<const Vocabulary> vocabulary_;
  WatermarkConfig config_;
  double alpha_;
};

// Linear "AI %" from perplexity: 100 * clamp((high - ppl) / (high - low), 0, 1).
double PerplexityScore(double perplexity, double low, double high);
double PerplexityScore(const GenerativeModel& model, std::span<const TokenId> text, double low,
                       double high);

struct PerplexityCalibration {
  double low = 0.0;        // perplexity scoring 100
  double high = 0.0;       // perplexity scoring 0
  double threshold = 0.0;  // positive iff score >= threshold
  double youden_j = 0.0;
};

// Linear-interpolation percentile (q in [0, 1]) of unsorted values.
double Percentile(std::vector<double> values, double q);

// Scans every distinct observed score as a cut (positive iff score >= cut)
// and keeps the one maximizing TPR - FPR; ties keep the lower cut.
struct YoudenChoice {
  double threshold = 0.0;
  double j = 0.0;
};
YoudenChoice SelectYoudenThreshold(std::span<const double> human_scores,
                                   std::span<const double> ai_scores);

// low/high = 5th/95th percentiles of the pooled perplexities; threshold by
// Youden's J on the resulting scores.
PerplexityCalibration CalibratePerplexity(const std::vector<TokenSequence>& human_texts,
                                          const std::vector<TokenSequence>& ai_texts,
                                          const GenerativeModel& model);
PerplexityCalibration CalibrateFromPerplexities(std::span<const double> human_perplexities,
                                                std::span<const double> ai_perplexities);

class PerplexityDetector : public Detector {
 public:
  PerplexityDetector(std::string id, std::shared_ptr<const GenerativeModel> model,
                     PerplexityCalibration calibration);

  const std::string& id() const override { return id_; }
  DetectionResult Classify(const TextInput& input) const override;

 private:
  std::string id_;
  std::shared_ptr<const GenerativeModel> model_;
  PerplexityCalibration calibration_;
};

enum class ExternalRule {
  kLabelBands,         // decision from the verdict label
  kProbability,        // decision from score >= 50
  kProbabilityStrict,  // decision from a three-band AI/Mixed/Human label
};

inline constexpr std::size_t kDefaultExternalCharCap = 15000;

// Client for the minimal external detector contract:
//   POST {"text": str} -> {"score": number in [0, 100], "label": str}
class ExternalDetector : public Detector {
 public:
  ExternalDetector(std::string id, EndpointConfig endpoint, ExternalRule rule,
                   std::size_t max_chars = kDefaultExternalCharCap);

  const std::string& id() const override { return id_; }
  DetectionResult Classify(const TextInput& input) const override;

  const JsonHttpClient& client() const { return *client_; }

 private:
  std::string id_;
  std::unique_ptr<JsonHttpClient> client_;
  ExternalRule rule_;
  std::size_t max_chars_;
};

struct WatermarkSpec {
  WatermarkConfig config;
  double alpha = 0.05;
  std::shared_ptr<const Vocabulary> vocabulary;
};

struct PerplexitySpec {
  std::shared_ptr<const GenerativeModel> model;
  PerplexityCalibration calibration;
};

struct ExternalSpec {
  EndpointConfig endpoint;
  ExternalRule rule = ExternalRule::kProbability;
  std::size_t max_chars = kDefaultExternalCharCap;
};

struct DetectorSpec {
  std::string id;
  std::variant<WatermarkSpec, PerplexitySpec, ExternalSpec> kind;
};

std::unique_ptr<Detector> MakeDetector(const DetectorSpec& spec);

// Runs `detector` on the record's id and body only.
DetectionResult Classify(const Detector& detector, const EssayRecord& record);

}  // namespace detectkit

#endif  // DETECTKIT_DETECTORS_H_
