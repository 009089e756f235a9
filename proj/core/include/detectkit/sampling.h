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

#ifndef DETECTKIT_SAMPLING_H_
#define DETECTKIT_SAMPLING_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "detectkit/language_model.h"

namespace detectkit {

inline constexpr int kDefaultMaxTokens = 1000;

// Per-step additive logit adjustment. Receives the full context (prompt plus
// tokens generated so far) and the logit row to modify in place.
using LogitBias = std::function<void(std::span<const TokenId> context, std::span<double> logits)>;

struct SampleOptions {
  int max_tokens = kDefaultMaxTokens;
  double temperature = 1.0;
  // Argmax decoding, the temperature -> 0 limit. Ties go to the lowest id.
  bool greedy = false;
  // Keep only the k most likely tokens before sampling; 0 disables.
  int top_k = 0;
  // </s> is masked until this many tokens have been emitted.
  int min_tokens = 0;
};

// Autoregressive sampling from softmax((logits + bias) / temperature).
//
// <unk> and <s> are masked out so every emitted token survives a
// detokenize/tokenize round trip; </s> stops generation and is not returned.
// Each step draws exactly one Rng::Uniform() (none when greedy) and picks the
// first id whose cumulative probability exceeds it, scanning ids in order.
// Returns only the continuation, never the prompt.
TokenSequence Sample(const GenerativeModel& model, std::span<const TokenId> prompt,
                     const SampleOptions& options, std::uint64_t seed,
                     const LogitBias& bias = nullptr);

// Numerically stable log-softmax.
std::vector<double> LogSoftmax(std::span<const double> logits);

// exp(-(1/T) * sum ln P(t_i | t_<i)) over the text followed by </s>, so T is
// the token count plus one. Contexts start from nothing (models pad).
double Perplexity(const GenerativeModel& model, std::span<const TokenId> text);

// Same quantity as a sum, for callers that aggregate.
double SequenceLogLikelihood(const GenerativeModel& model, std::span<const TokenId> text);

}  // namespace detectkit

#endif  // DETECTKIT_SAMPLING_H_
