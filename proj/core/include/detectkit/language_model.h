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

#ifndef DETECTKIT_LANGUAGE_MODEL_H_
#define DETECTKIT_LANGUAGE_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "detectkit/vocabulary.h"

namespace detectkit {

// Anything that exposes next-token logits over a fixed vocabulary. Must be
// deterministic: equal contexts yield bitwise-equal logits.
class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;

  virtual const Vocabulary& vocabulary() const = 0;

  // One logit per vocabulary id. `context` holds the preceding tokens without
  // sentinel padding; models pad with kBosId as they see fit.
  virtual std::vector<double> NextTokenLogits(std::span<const TokenId> context) const = 0;
};

struct Smoothing {
  enum class Kind { kAddK, kWittenBell };

  Kind kind = Kind::kAddK;
  double k = 0.1;  // additive constant for kAddK

  static Smoothing AddK(double k) { return {Kind::kAddK, k}; }
  static Smoothing WittenBell() { return {Kind::kWittenBell, 0.0}; }

  bool operator==(const Smoothing&) const = default;
};

// Smoothed n-gram model trained with (order - 1) <s> pads and one </s> per
// text. Every vocabulary id, sentinels included, gets nonzero probability in
// every context.
//
//   AddK:       P(w|h) = (c(h,w) + k) / (c(h) + k*V)
//   WittenBell: P(w|h) = (c(h,w) + N1(h) * P(w|h')) / (c(h) + N1(h)),
//               falling through to the shorter context h' when c(h) = 0, and
//               bottoming out at the uniform 1/V below unigrams.
//
// V counts every vocabulary entry, including <unk>, <s> and </s>.
class NGramModel : public GenerativeModel {
 public:
  NGramModel(int order, Vocabulary vocabulary, Smoothing smoothing);

  const Vocabulary& vocabulary() const override { return vocabulary_; }
  std::vector<double> NextTokenLogits(std::span<const TokenId> context) const override;

  // Exact next-token distribution for the last (order - 1) tokens of
  // `context`, left-padded with <s> when shorter.
  std::vector<double> Distribution(std::span<const TokenId> context) const;
  double Probability(std::span<const TokenId> context, TokenId token) const;

  // Adds one text's n-gram counts (the text is padded here).
  void AddSequence(std::span<const TokenId> ids);

  // Adds `count` occurrences of a full-order n-gram and of all its suffixes.
  void AddTopOrderCount(std::span<const TokenId> ngram, std::uint64_t count);

  int order() const { return order_; }
  const Smoothing& smoothing() const { return smoothing_; }
  std::uint64_t trained_tokens() const { return trained_tokens_; }

  // Count of `token` after the exact `context` (length order - 1 or shorter
  // for lower orders).
  std::uint64_t Count(std::span<const TokenId> context, TokenId token) const;
  std::uint64_t ContextTotal(std::span<const TokenId> context) const;

  // Top-order n-grams in canonical (lexicographic id) order; lower orders
  // are recoverable from these, which is what serialization relies on.
  struct NGramCount {
    std::vector<TokenId> ngram;
    std::uint64_t count;
  };
  std::vector<NGramCount> TopOrderCounts() const;

  bool operator==(const NGramModel& other) const;

 private:
  struct ContextStats {
    std::uint64_t total = 0;
    std::unordered_map<TokenId, std::uint64_t> next;
  };
  struct ContextHash {
    std::size_t operator()(const std::vector<TokenId>& ctx) const;
  };
  using Table = std::unordered_map<std::vector<TokenId>, ContextStats, ContextHash>;

  std::vector<TokenId> PaddedContext(std::span<const TokenId> context, int length) const;
  const ContextStats* Stats(int order, std::span<const TokenId> context) const;

  int order_;
  Vocabulary vocabulary_;
  Smoothing smoothing_;
  std::uint64_t trained_tokens_ = 0;
  // tables_[n - 1] holds n-gram statistics keyed by their (n - 1)-token context.
  std::vector<Table> tables_;
};

// Builds the vocabulary (reserved ids, then every training word in sorted
// order) and counts all texts. Throws on order < 1 or when no text has tokens.
NGramModel TrainNGram(const std::vector<std::string>& texts, int order, Smoothing smoothing);

// Same, over pre-encoded sequences with a fixed vocabulary.
NGramModel TrainNGram(const std::vector<TokenSequence>& sequences, Vocabulary vocabulary,
                      int order, Smoothing smoothing);

// Versioned JSON document: {"version", "order", "smoothing", "vocabulary",
// "trained_tokens", "counts"}.
inline constexpr int kModelFormatVersion = 1;
std::string SerializeModel(const NGramModel& model);
NGramModel DeserializeModel(std::string_view json);
void SaveModel(const NGramModel& model, const std::filesystem::path& path);
NGramModel LoadModel(const std::filesystem::path& path);

}  // namespace detectkit

#endif  // DETECTKIT_LANGUAGE_MODEL_H_
