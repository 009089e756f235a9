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

#ifndef DETECTKIT_WATERMARK_H_
#define DETECTKIT_WATERMARK_H_

#include <cstdint>
#include <span>
#include <vector>

#include "detectkit/language_model.h"
#include "detectkit/sampling.h"
#include "detectkit/vocabulary.h"

namespace detectkit {

inline constexpr std::uint64_t kDefaultWatermarkKey = 15485863;

struct WatermarkConfig {
  double gamma = 0.25;  // green list proportion
  double delta = 2.0;   // logit bonus for green tokens
  std::uint64_t key = kDefaultWatermarkKey;
  int context_width = 1;
  int max_tokens = kDefaultMaxTokens;
  int min_detect_tokens = 16;

  // Throws kInvalidArgument unless 0 < gamma < 1, delta >= 0,
  // context_width >= 1, max_tokens >= 1 and min_detect_tokens >= 1.
  void Validate() const;
};

struct WatermarkVerdict {
  std::int64_t green_count = 0;
  std::int64_t total = 0;
  double z = 0.0;
  double p_value = 1.0;
  bool positive = false;
};

// Keyed partition hash:
//   h = Mix64(key)
//   for c in context: h = Mix64(h ^ (c + 0x9e3779b97f4a7c15))
//   H = Mix64(h ^ (token + 0xd1b54a32d192ed03))
// with Mix64 the SplitMix64 finalizer and all arithmetic mod 2^64.
std::uint64_t GreenHash(std::uint64_t key, std::span<const TokenId> context, TokenId token);

// Green iff (H >> 11) * 2^-53 < gamma, i.e. H / 2^64 < gamma at 53-bit
// resolution. gamma >= 1 is always green, gamma <= 0 never.
bool IsGreen(std::uint64_t key, std::span<const TokenId> context, TokenId token, double gamma);

// Hash state after absorbing key and context; amortizes the per-step cost of
// testing a whole vocabulary against one context.
class GreenList {
 public:
  GreenList(std::uint64_t key, std::span<const TokenId> context, double gamma);
  bool Contains(TokenId token) const;

 private:
  std::uint64_t state_;
  double gamma_;
};

struct GreenCount {
  std::int64_t green = 0;
  std::int64_t total = 0;
};

// Scores positions context_width..n-1 against their preceding context_width
// tokens. Reserved ids carry no signal and are skipped (not counted in total).
// Throws kInsufficientTokens when the text has fewer than context_width + 1
// tokens.
GreenCount CountGreen(std::span<const TokenId> text, const WatermarkConfig& config);

// z = (g - gamma*T) / sqrt(T*gamma*(1-gamma)).
double WatermarkZScore(std::int64_t green, std::int64_t total, double gamma);

// One-sided upper tail 1 - Phi(z), computed as erfc(z/sqrt 2)/2.
double UpperTailPValue(double z);

// Verdict from raw counts; positive iff p_value < alpha.
WatermarkVerdict VerdictFromCounts(std::int64_t green, std::int64_t total, double gamma,
                                   double alpha);

// Detection uses only the text, key and gamma. Throws kInsufficientTokens
// when fewer than min_detect_tokens positions are scored.
WatermarkVerdict DetectWatermark(std::span<const TokenId> text, const WatermarkConfig& config,
                                 double alpha);

// Adds delta to every non-reserved token green for the last context_width
// tokens of the running context (left-padded with <s>).
LogitBias GreenListBias(const WatermarkConfig& config);

// Soft watermark generation: Sample() with GreenListBias and
// max_tokens = config.max_tokens. Returns the continuation only, so the
// prompt never enters the scored region.
TokenSequence GenerateWatermarked(const GenerativeModel& model, std::span<const TokenId> prompt,
                                  const WatermarkConfig& config, std::uint64_t seed,
                                  SampleOptions sampling = {});

struct GreenDistribution {
  std::vector<double> fractions;  // per text g/T
  double mean = 0.0;
  double variance = 0.0;  // sample variance (n - 1 denominator)
  std::size_t positives = 0;
  double false_positive_rate = 0.0;  // positives / n at the given alpha
};

// Per-text green fractions over a corpus presumed unwatermarked, plus the
// share flagged at `alpha`. Under the null model that share should be alpha.
GreenDistribution EmpiricalGreenDistribution(const std::vector<TokenSequence>& texts,
                                             const WatermarkConfig& config, double alpha);

}  // namespace detectkit

#endif  // DETECTKIT_WATERMARK_H_
