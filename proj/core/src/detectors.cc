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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "detectkit/sampling.h"
#include "detectkit/text.h"
#include "detectkit/tokenizer.h"
#include "json.hpp"

namespace detectkit {
namespace {

std::string Trimmed(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool InList(std::string_view label, const std::vector<std::string>& list) {
  const std::string t = Trimmed(label);
  return std::any_of(list.begin(), list.end(),
                     [&](const std::string& s) { return EqualsIgnoreCase(t, s); });
}

std::string FormatDouble(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

DetectionResult ErrorResult(const std::string& detector_id, const TextInput& input, ErrorCode code,
                            std::string message) {
  DetectionResult r;
  r.detector_id = detector_id;
  r.text_id = input.id;
  r.error = code;
  r.error_message = std::move(message);
  return r;
}

}  // namespace

bool WatermarkRulePositive(double p_value, double alpha) { return p_value < alpha; }

bool ProbabilityRulePositive(double ai_probability) {
  return ai_probability >= kAiProbabilityThreshold;
}

const std::vector<std::string>& NegativeBandLabels() {
  static const std::vector<std::string> kLabels = {
      "Your Text is Human written",
      "Your Text is Most Likely Human written",
  };
  return kLabels;
}

const std::vector<std::string>& PositiveBandLabels() {
  static const std::vector<std::string> kLabels = {
      "Your Text is AI/GPT Generated",
      "Your Text is Most Likely AI/GPT generated",
      "Your Text is Likely generated by AI",
      "Your Text contains Mixed signals, with some parts AI generated",
      "Your Text is Likely Human written, may include parts generated by AI/GPT",
  };
  return kLabels;
}

bool LabelBandPositive(std::string_view label) {
  if (InList(label, NegativeBandLabels())) return false;
  if (InList(label, PositiveBandLabels())) return true;
  throw Error(ErrorCode::kParse, "unknown detector label '" + std::string(label) + "'");
}

bool StrictBandPositive(std::string_view label) {
  const std::string t = Trimmed(label);
  if (EqualsIgnoreCase(t, "Human")) return false;
  if (EqualsIgnoreCase(t, "AI") || EqualsIgnoreCase(t, "Mixed")) return true;
  throw Error(ErrorCode::kParse, "unknown band label '" + std::string(label) + "'");
}

WatermarkDetector::WatermarkDetector(std::string id, std::shared_ptr<const Vocabulary> vocabulary,
                                     WatermarkConfig config, double alpha)
    : id_(std::move(id)), vocabulary_(std::move(vocabulary)), config_(config), alpha_(alpha) {
  if (!vocabulary_) throw Error(ErrorCode::kInvalidArgument, "watermark detector needs a vocabulary");
  config_.Validate();
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
}

DetectionResult WatermarkDetector::Classify(const TextInput& input) const {
  try {
    const TokenSequence ids = Tokenize(input.body, *vocabulary_);
    const WatermarkVerdict v = DetectWatermark(ids, config_, alpha_);
    DetectionResult r;
    r.detector_id = id_;
    r.text_id = input.id;
    r.raw_score = v.p_value;
    r.positive = WatermarkRulePositive(v.p_value, alpha_);
    r.threshold = alpha_;
    r.detail["z"] = FormatDouble(v.z);
    r.detail["green_count"] = std::to_string(v.green_count);
    r.detail["total"] = std::to_string(v.total);
    return r;
  } catch (const Error& e) {
    return ErrorResult(id_, input, e.code(), e.what());
  }
}

double PerplexityScore(double perplexity, double low, double high) {
  if (!(std::isfinite(low) && std::isfinite(high) && low < high)) {
    throw Error(ErrorCode::kInvalidArgument, "perplexity anchors need low < high");
  }
  const double t = (high - perplexity) / (high - low);
  return 100.0 * std::clamp(t, 0.0, 1.0);
}

double PerplexityScore(const GenerativeModel& model, std::span<const TokenId> text, double low,
                       double high) {
  return PerplexityScore(Perplexity(model, text), low, high);
}

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

YoudenChoice SelectYoudenThreshold(std::span<const double> human_scores,
                                   std::span<const double> ai_scores) {
  if (human_scores.empty() || ai_scores.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "calibration needs both classes");
  }
  std::vector<double> candidates(human_scores.begin(), human_scores.end());
  candidates.insert(candidates.end(), ai_scores.begin(), ai_scores.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<double> human(human_scores.begin(), human_scores.end());
  std::vector<double> ai(ai_scores.begin(), ai_scores.end());
  std::sort(human.begin(), human.end());
  std::sort(ai.begin(), ai.end());
  auto at_or_above = [](const std::vector<double>& sorted, double cut) {
    return static_cast<double>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), cut));
  };

  YoudenChoice best{candidates.front(), -2.0};
  for (double cut : candidates) {
    const double tpr = at_or_above(ai, cut) / static_cast<double>(ai.size());
    const double fpr = at_or_above(human, cut) / static_cast<double>(human.size());
    const double j = tpr - fpr;
    if (j > best.j) best = {cut, j};
  }
  return best;
}

PerplexityCalibration CalibrateFromPerplexities(std::span<const double> human_perplexities,
                                                std::span<const double> ai_perplexities) {
  if (human_perplexities.empty() || ai_perplexities.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "calibration needs both classes");
  }
  std::vector<double> pooled(human_perplexities.begin(), human_perplexities.end());
  pooled.insert(pooled.end(), ai_perplexities.begin(), ai_perplexities.end());
  PerplexityCalibration c;
  c.low = Percentile(pooled, 0.05);
  c.high = Percentile(pooled, 0.95);
  if (!(c.low < c.high)) {
    throw Error(ErrorCode::kInvalidArgument, "calibration perplexities are degenerate (5th == 95th percentile)");
  }
  std::vector<double> human_scores;
  std::vector<double> ai_scores;
  for (double p : human_perplexities) human_scores.push_back(PerplexityScore(p, c.low, c.high));
  for (double p : ai_perplexities) ai_scores.push_back(PerplexityScore(p, c.low, c.high));
  const YoudenChoice choice = SelectYoudenThreshold(human_scores, ai_scores);
  c.threshold = choice.threshold;
  c.youden_j = choice.j;
  return c;
}

PerplexityCalibration CalibratePerplexity(const std::vector<TokenSequence>& human_texts,
                                          const std::vector<TokenSequence>& ai_texts,
                                          const GenerativeModel& model) {
  if (human_texts.empty() || ai_texts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "calibration needs both classes");
  }
  std::vector<double> human;
  std::vector<double> ai;
  for (const auto& t : human_texts) human.push_back(Perplexity(model, t));
  for (const auto& t : ai_texts) ai.push_back(Perplexity(model, t));
  return CalibrateFromPerplexities(human, ai);
}

PerplexityDetector::PerplexityDetector(std::string id, std::shared_ptr<const GenerativeModel> model,
                                       PerplexityCalibration calibration)
    : id_(std::move(id)), model_(std::move(model)), calibration_(calibration) {
  if (!model_) throw Error(ErrorCode::kInvalidArgument, "perplexity detector needs a model");
  if (!(calibration_.low < calibration_.high)) {
    throw Error(ErrorCode::kInvalidArgument, "perplexity anchors need low < high");
  }
}

DetectionResult PerplexityDetector::Classify(const TextInput& input) const {
  try {
    const TokenSequence ids = Tokenize(input.body, model_->vocabulary());
    const double ppl = Perplexity(*model_, ids);
    DetectionResult r;
    r.detector_id = id_;
    r.text_id = input.id;
    r.raw_score = PerplexityScore(ppl, calibration_.low, calibration_.high);
    r.threshold = calibration_.threshold;
    r.positive = r.raw_score >= calibration_.threshold;
    r.detail["perplexity"] = FormatDouble(ppl);
    return r;
  } catch (const Error& e) {
    return ErrorResult(id_, input, e.code(), e.what());
  }
}

ExternalDetector::ExternalDetector(std::string id, EndpointConfig endpoint, ExternalRule rule,
                                   std::size_t max_chars)
    : id_(std::move(id)),
      client_(std::make_unique<JsonHttpClient>(std::move(endpoint))),
      rule_(rule),
      max_chars_(max_chars) {}

DetectionResult ExternalDetector::Classify(const TextInput& input) const {
  const std::size_t chars = text::CodePointCount(input.body);
  if (chars > max_chars_) {
    return ErrorResult(id_, input, ErrorCode::kInvalidArgument,
                       "text has " + std::to_string(chars) + " characters; cap is " +
                           std::to_string(max_chars_));
  }
  try {
    nlohmann::json request = {{"text", input.body}};
    const std::string raw = client_->Post(request.dump());
    nlohmann::json response;
    try {
      response = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("unparseable detector response: ") + e.what());
    }
    if (!response.is_object() || !response.contains("score") || !response["score"].is_number()) {
      throw Error(ErrorCode::kParse, "detector response lacks a numeric 'score'");
    }
    const double score = response["score"].get<double>();
    if (!(score >= 0.0 && score <= 100.0)) {
      throw Error(ErrorCode::kParse, "detector score outside [0, 100]");
    }
    std::string label;
    if (auto it = response.find("label"); it != response.end() && it->is_string()) {
      label = it->get<std::string>();
    }

    DetectionResult r;
    r.detector_id = id_;
    r.text_id = input.id;
    r.raw_score = score;
    r.detail["response"] = raw;
    if (!label.empty()) r.detail["label"] = label;
    switch (rule_) {
      case ExternalRule::kLabelBands:
        r.positive = LabelBandPositive(label);
        r.detail["rule"] = "label";
        break;
      case ExternalRule::kProbability:
        r.positive = ProbabilityRulePositive(score);
        r.threshold = kAiProbabilityThreshold;
        r.detail["rule"] = "probability";
        break;
      case ExternalRule::kProbabilityStrict:
        r.positive = StrictBandPositive(label);
        r.threshold = kAiProbabilityThreshold;
        r.detail["rule"] = "strict";
        break;
    }
    return r;
  } catch (const Error& e) {
    return ErrorResult(id_, input, e.code(), e.what());
  }
}

std::unique_ptr<Detector> MakeDetector(const DetectorSpec& spec) {
  return std::visit(
      [&](const auto& kind) -> std::unique_ptr<Detector> {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, WatermarkSpec>) {
          return std::make_unique<WatermarkDetector>(spec.id, kind.vocabulary, kind.config,
                                                     kind.alpha);
        } else if constexpr (std::is_same_v<T, PerplexitySpec>) {
          return std::make_unique<PerplexityDetector>(spec.id, kind.model, kind.calibration);
        } else {
          return std::make_unique<ExternalDetector>(spec.id, kind.endpoint, kind.rule,
                                                    kind.max_chars);
        }
      },
      spec.kind);
}

DetectionResult Classify(const Detector& detector, const EssayRecord& record) {
  return detector.Classify(ToTextInput(record));
}

}  // namespace detectkit
