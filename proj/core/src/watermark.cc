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

#include "detectkit/watermark.h"

#include <cmath>
#include <string>

#include "detectkit/error.h"
#include "detectkit/rng.h"

namespace detectkit {
namespace {

constexpr std::uint64_t kContextSalt = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kTokenSalt = 0xd1b54a32d192ed03ULL;

std::uint64_t AbsorbContext(std::uint64_t key, std::span<const TokenId> context) {
  std::uint64_t h = Mix64(key);
  for (TokenId c : context) h = Mix64(h ^ (static_cast<std::uint64_t>(c) + kContextSalt));
  return h;
}

bool BelowGamma(std::uint64_t h, double gamma) {
  if (gamma >= 1.0) return true;
  if (gamma <= 0.0) return false;
  return static_cast<double>(h >> 11) * 0x1.0p-53 < gamma;
}

}  // namespace

void WatermarkConfig::Validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "watermark gamma must lie in (0, 1)");
  }
  if (!(delta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "watermark delta must be >= 0");
  if (context_width < 1) throw Error(ErrorCode::kInvalidArgument, "context_width must be >= 1");
  if (max_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_tokens must be >= 1");
  if (min_detect_tokens < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_detect_tokens must be >= 1");
  }
}

std::uint64_t GreenHash(std::uint64_t key, std::span<const TokenId> context, TokenId token) {
  return Mix64(AbsorbContext(key, context) ^ (static_cast<std::uint64_t>(token) + kTokenSalt));
}

bool IsGreen(std::uint64_t key, std::span<const TokenId> context, TokenId token, double gamma) {
  return BelowGamma(GreenHash(key, context, token), gamma);
}

GreenList::GreenList(std::uint64_t key, std::span<const TokenId> context, double gamma)
    : state_(AbsorbContext(key, context)), gamma_(gamma) {}

bool GreenList::Contains(TokenId token) const {
  return BelowGamma(Mix64(state_ ^ (static_cast<std::uint64_t>(token) + kTokenSalt)), gamma_);
}

GreenCount CountGreen(std::span<const TokenId> text, const WatermarkConfig& config) {
  const auto width = static_cast<std::size_t>(config.context_width);
  if (text.size() < width + 1) {
    throw Error(ErrorCode::kInsufficientTokens,
                "text has " + std::to_string(text.size()) + " tokens; need at least " +
                    std::to_string(width + 1));
  }
  GreenCount count;
  for (std::size_t i = width; i < text.size(); ++i) {
    if (IsReserved(text[i])) continue;
    ++count.total;
    if (IsGreen(config.key, text.subspan(i - width, width), text[i], config.gamma)) ++count.green;
  }
  return count;
}

double WatermarkZScore(std::int64_t green, std::int64_t total, double gamma) {
  if (total <= 0) throw Error(ErrorCode::kInsufficientTokens, "no scored tokens");
  const double t = static_cast<double>(total);
  return (static_cast<double>(green) - gamma * t) / std::sqrt(t * gamma * (1.0 - gamma));
}

double UpperTailPValue(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

WatermarkVerdict VerdictFromCounts(std::int64_t green, std::int64_t total, double gamma,
                                   double alpha) {
  if (green < 0 || green > total) {
    throw Error(ErrorCode::kInvalidArgument, "green count must lie in [0, total]");
  }
  WatermarkVerdict v;
  v.green_count = green;
  v.total = total;
  v.z = WatermarkZScore(green, total, gamma);
  v.p_value = UpperTailPValue(v.z);
  v.positive = v.p_value < alpha;
  return v;
}

WatermarkVerdict DetectWatermark(std::span<const TokenId> text, const WatermarkConfig& config,
                                 double alpha) {
  const GreenCount count = CountGreen(text, config);
  if (count.total < config.min_detect_tokens) {
    throw Error(ErrorCode::kInsufficientTokens,
                "insufficient tokens: " + std::to_string(count.total) + " scored, need " +
                    std::to_string(config.min_detect_tokens));
  }
  return VerdictFromCounts(count.green, count.total, config.gamma, alpha);
}

LogitBias GreenListBias(const WatermarkConfig& config) {
  return [config](std::span<const TokenId> context, std::span<double> logits) {
    const auto width = static_cast<std::size_t>(config.context_width);
    std::vector<TokenId> window(width, kBosId);
    const std::size_t take = std::min(width, context.size());
    std::copy(context.end() - static_cast<std::ptrdiff_t>(take), context.end(),
              window.end() - static_cast<std::ptrdiff_t>(take));
    const GreenList green(config.key, window, config.gamma);
    for (TokenId t = kNumReservedIds; t < logits.size(); ++t) {
      if (green.Contains(t)) logits[t] += config.delta;
    }
  };
}

TokenSequence GenerateWatermarked(const GenerativeModel& model, std::span<const TokenId> prompt,
                                  const WatermarkConfig& config, std::uint64_t seed,
                                  SampleOptions sampling) {
  config.Validate();
  if (prompt.empty()) throw Error(ErrorCode::kInvalidArgument, "watermark prompt is empty");
  sampling.max_tokens = config.max_tokens;
  return Sample(model, prompt, sampling, seed, GreenListBias(config));
}

GreenDistribution EmpiricalGreenDistribution(const std::vector<TokenSequence>& texts,
                                             const WatermarkConfig& config, double alpha) {
  if (texts.empty()) throw Error(ErrorCode::kInvalidArgument, "empty corpus");
  GreenDistribution out;
  out.fractions.reserve(texts.size());
  for (const auto& t : texts) {
    const WatermarkVerdict v = DetectWatermark(t, config, alpha);
    out.fractions.push_back(static_cast<double>(v.green_count) / static_cast<double>(v.total));
    if (v.positive) ++out.positives;
  }
  const double n = static_cast<double>(out.fractions.size());
  double sum = 0.0;
  for (double f : out.fractions) sum += f;
  out.mean = sum / n;
  if (out.fractions.size() > 1) {
    double ss = 0.0;
    for (double f : out.fractions) ss += (f - out.mean) * (f - out.mean);
    out.variance = ss / (n - 1.0);
  }
  out.false_positive_rate = static_cast<double>(out.positives) / n;
  return out;
}

}  // namespace detectkit
