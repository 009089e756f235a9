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

#ifndef DETECTKIT_SIMILARITY_H_
#define DETECTKIT_SIMILARITY_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "detectkit/attacks.h"
#include "detectkit/corpus.h"
#include "detectkit/http_client.h"

namespace detectkit {

inline constexpr std::size_t kEmbeddingDim = 512;

// Unit-norm 512-dim vector, or the all-zero sentinel for texts with no
// tokens. The sentinel is not comparable.
class EmbeddingVector {
 public:
  EmbeddingVector() { components_.fill(0.0); }

  // L2-normalizes `components`; an all-zero input stays the sentinel.
  static EmbeddingVector FromComponents(std::span<const double> components);

  const std::array<double, kEmbeddingDim>& components() const { return components_; }
  bool is_zero() const { return zero_; }
  double Norm() const;

 private:
  std::array<double, kEmbeddingDim> components_;
  bool zero_ = true;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbeddingVector Embed(std::string_view text) const = 0;
};

// Signed feature hashing over TokenizeWords() output. For a token with UTF-8
// bytes b:  f = Fnv1a64(b),
//           index = Mix64(f ^ index_seed) mod 512,
//           sign  = +1 if Mix64(f ^ sign_seed) has its low bit set, else -1.
// Each occurrence adds its sign at its index, then the vector is normalized.
class HashingEmbedder : public Embedder {
 public:
  static constexpr std::uint64_t kDefaultIndexSeed = 0x2545f4914f6cdd1dULL;
  static constexpr std::uint64_t kDefaultSignSeed = 0x9fb21c651e98df25ULL;

  HashingEmbedder(std::uint64_t index_seed = kDefaultIndexSeed,
                  std::uint64_t sign_seed = kDefaultSignSeed)
      : index_seed_(index_seed), sign_seed_(sign_seed) {}

  EmbeddingVector Embed(std::string_view text) const override;

  std::size_t IndexOf(std::string_view token) const;
  double SignOf(std::string_view token) const;

 private:
  std::uint64_t index_seed_;
  std::uint64_t sign_seed_;
};

// POST {"text": str} -> {"embedding": [512 numbers]}; re-normalized locally.
class ExternalEmbedder : public Embedder {
 public:
  explicit ExternalEmbedder(EndpointConfig endpoint);
  EmbeddingVector Embed(std::string_view text) const override;

 private:
  std::unique_ptr<JsonHttpClient> client_;
};

// Dot product of two unit vectors, clamped to [-1, 1] against rounding;
// exactly 1 for identical vectors.
// Throws kUndefined for the zero sentinel.
double CosineSimilarity(const EmbeddingVector& a, const EmbeddingVector& b);

enum class PairKind { kHumanVsHuman, kHumanVsGenerated, kGeneratedVsParaphrase };

struct PairSelector {
  PairKind kind = PairKind::kHumanVsHuman;
  AttackName attack = AttackName::kPerplexity;  // for kGeneratedVsParaphrase

  static PairSelector HumanVsHuman() { return {PairKind::kHumanVsHuman, {}}; }
  static PairSelector HumanVsGenerated() { return {PairKind::kHumanVsGenerated, {}}; }
  static PairSelector GeneratedVsParaphrase(AttackName a) {
    return {PairKind::kGeneratedVsParaphrase, a};
  }

  // "Human Text vs. Human Text", "Original GPT Generation vs. Perplexity
  // Paraphrasing", ...
  std::string Label() const;
};

struct SimilarityRow {
  std::string label;
  double average = 0.0;
  std::size_t pairs = 0;
};

// Average cosine over all qualifying pairs:
//   human-human: unordered distinct pairs of human records;
//   human-generated: each generated record against its human parent;
//   generated-paraphrase: each Paraphrased(attack) record against its nearest
//   generated or watermarked ancestor.
// Throws kMissingInputs when no pair qualifies.
SimilarityRow AverageSimilarity(const Corpus& corpus, const PairSelector& pairs,
                                const Embedder& embedder);

// The five-row table: human-human, human-generated, then generated versus the
// perplexity, college student and recursive paraphrases. Rows without pairs
// are omitted.
std::vector<SimilarityRow> SimilarityReport(const Corpus& corpus, const Embedder& embedder);

// CSV with header "texts,avg_cosine,pairs"; cosines with 2 decimals.
std::string SimilarityReportCsv(const std::vector<SimilarityRow>& rows);

}  // namespace detectkit

#endif  // DETECTKIT_SIMILARITY_H_
