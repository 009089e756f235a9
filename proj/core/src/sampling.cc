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

#include "detectkit/sampling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "detectkit/error.h"
#include "detectkit/rng.h"

namespace detectkit {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

TokenId Argmax(std::span<const double> logits) {
  TokenId best = 0;
  for (TokenId i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

// Masks everything outside the k largest logits; ties rank by lower id.
void KeepTopK(std::span<double> logits, int k) {
  if (k <= 0 || static_cast<std::size_t>(k) >= logits.size()) return;
  std::vector<TokenId> order(logits.size());
  std::iota(order.begin(), order.end(), TokenId{0});
  std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                   [&](TokenId a, TokenId b) {
                     return logits[a] != logits[b] ? logits[a] > logits[b] : a < b;
                   });
  std::vector<bool> keep(logits.size(), false);
  for (int i = 0; i < k; ++i) keep[order[static_cast<std::size_t>(i)]] = true;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!keep[i]) logits[i] = kNegInf;
  }
}

TokenId Draw(std::span<const double> logits, double temperature, Rng& rng) {
  double max_logit = kNegInf;
  for (double l : logits) max_logit = std::max(max_logit, l);
  std::vector<double> weights(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    weights[i] = logits[i] == kNegInf ? 0.0 : std::exp((logits[i] - max_logit) / temperature);
    total += weights[i];
  }
  const double u = rng.Uniform() * total;
  double cumulative = 0.0;
  TokenId last_positive = 0;
  for (TokenId i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    cumulative += weights[i];
    last_positive = i;
    if (cumulative > u) return i;
  }
  return last_positive;
}

}  // namespace

TokenSequence Sample(const GenerativeModel& model, std::span<const TokenId> prompt,
                     const SampleOptions& options, std::uint64_t seed, const LogitBias& bias) {
  if (options.max_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_tokens must be >= 1");
  if (!(options.temperature > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be > 0");
  }
  if (options.min_tokens < 0 || options.min_tokens > options.max_tokens) {
    throw Error(ErrorCode::kInvalidArgument, "min_tokens must lie in [0, max_tokens]");
  }
  Rng rng(seed);
  std::vector<TokenId> context(prompt.begin(), prompt.end());
  TokenSequence out;
  out.reserve(static_cast<std::size_t>(options.max_tokens));
  for (int step = 0; step < options.max_tokens; ++step) {
    std::vector<double> logits = model.NextTokenLogits(context);
    if (bias) bias(context, logits);
    logits[kUnkId] = kNegInf;
    logits[kBosId] = kNegInf;
    if (step < options.min_tokens) logits[kEosId] = kNegInf;
    TokenId next;
    if (options.greedy) {
      next = Argmax(logits);
    } else {
      KeepTopK(logits, options.top_k);
      next = Draw(logits, options.temperature, rng);
    }
    if (next == kEosId) break;
    out.push_back(next);
    context.push_back(next);
  }
  return out;
}

std::vector<double> LogSoftmax(std::span<const double> logits) {
  double max_logit = kNegInf;
  for (double l : logits) max_logit = std::max(max_logit, l);
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - max_logit);
  const double log_z = max_logit + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_z;
  return out;
}

double SequenceLogLikelihood(const GenerativeModel& model, std::span<const TokenId> text) {
  if (text.empty()) throw Error(ErrorCode::kInvalidArgument, "perplexity of an empty text");
  const std::size_t v = model.vocabulary().size();
  double total = 0.0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    const TokenId target = i < text.size() ? text[i] : kEosId;
    if (target >= v) throw Error(ErrorCode::kInvalidArgument, "token id outside the model vocabulary");
    const auto logp = LogSoftmax(model.NextTokenLogits(text.first(i)));
    total += logp[target];
  }
  return total;
}

double Perplexity(const GenerativeModel& model, std::span<const TokenId> text) {
  const double ll = SequenceLogLikelihood(model, text);
  return std::exp(-ll / static_cast<double>(text.size() + 1));
}

}  // namespace detectkit
