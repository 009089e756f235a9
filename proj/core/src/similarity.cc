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

#include "detectkit/similarity.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "detectkit/error.h"
#include "detectkit/rng.h"
#include "detectkit/tokenizer.h"
#include "json.hpp"

namespace detectkit {

EmbeddingVector EmbeddingVector::FromComponents(std::span<const double> components) {
  if (components.size() != kEmbeddingDim) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding must have " + std::to_string(kEmbeddingDim) + " components");
  }
  EmbeddingVector v;
  double ss = 0.0;
  for (double c : components) {
    if (!std::isfinite(c)) throw Error(ErrorCode::kInvalidArgument, "non-finite embedding component");
    ss += c * c;
  }
  if (ss == 0.0) return v;
  const double norm = std::sqrt(ss);
  for (std::size_t i = 0; i < kEmbeddingDim; ++i) v.components_[i] = components[i] / norm;
  v.zero_ = false;
  return v;
}

double EmbeddingVector::Norm() const {
  double ss = 0.0;
  for (double c : components_) ss += c * c;
  return std::sqrt(ss);
}

std::size_t HashingEmbedder::IndexOf(std::string_view token) const {
  return static_cast<std::size_t>(Mix64(Fnv1a64(token) ^ index_seed_) % kEmbeddingDim);
}

double HashingEmbedder::SignOf(std::string_view token) const {
  return (Mix64(Fnv1a64(token) ^ sign_seed_) & 1U) ? 1.0 : -1.0;
}

EmbeddingVector HashingEmbedder::Embed(std::string_view text) const {
  std::array<double, kEmbeddingDim> acc{};
  for (const auto& tok : TokenizeWords(text)) acc[IndexOf(tok)] += SignOf(tok);
  return EmbeddingVector::FromComponents(acc);
}

ExternalEmbedder::ExternalEmbedder(EndpointConfig endpoint)
    : client_(std::make_unique<JsonHttpClient>(std::move(endpoint))) {}

EmbeddingVector ExternalEmbedder::Embed(std::string_view text) const {
  const nlohmann::json request = {{"text", std::string(text)}};
  const std::string raw = client_->Post(request.dump());
  std::vector<double> components;
  try {
    components = nlohmann::json::parse(raw).at("embedding").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("unparseable embedder response: ") + e.what());
  }
  return EmbeddingVector::FromComponents(components);
}

double CosineSimilarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.is_zero() || b.is_zero()) {
    throw Error(ErrorCode::kUndefined, "cosine similarity with an empty-text embedding");
  }
  if (a.components() == b.components()) return 1.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < kEmbeddingDim; ++i) dot += a.components()[i] * b.components()[i];
  return std::clamp(dot, -1.0, 1.0);
}

std::string PairSelector::Label() const {
  switch (kind) {
    case PairKind::kHumanVsHuman:
      return "Human Text vs. Human Text";
    case PairKind::kHumanVsGenerated:
      return "Human Text vs. Original GPT Generation";
    case PairKind::kGeneratedVsParaphrase:
      return "Original GPT Generation vs. " + std::string(AttackDisplayName(attack)) +
             " Paraphrasing";
  }
  return "";
}

SimilarityRow AverageSimilarity(const Corpus& corpus, const PairSelector& pairs,
                                const Embedder& embedder) {
  std::unordered_map<std::string, EmbeddingVector> cache;
  auto embed = [&](const EssayRecord& r) -> const EmbeddingVector& {
    auto it = cache.find(r.id);
    if (it == cache.end()) it = cache.emplace(r.id, embedder.Embed(r.body)).first;
    return it->second;
  };

  SimilarityRow row;
  row.label = pairs.Label();
  double sum = 0.0;
  auto add = [&](const EssayRecord& a, const EssayRecord& b) {
    sum += CosineSimilarity(embed(a), embed(b));
    ++row.pairs;
  };

  const auto& records = corpus.records();
  switch (pairs.kind) {
    case PairKind::kHumanVsHuman: {
      std::vector<const EssayRecord*> humans;
      for (const auto& r : records) {
        if (r.provenance.kind == ProvenanceKind::kHuman) humans.push_back(&r);
      }
      for (std::size_t i = 0; i < humans.size(); ++i) {
        for (std::size_t j = i + 1; j < humans.size(); ++j) add(*humans[i], *humans[j]);
      }
      break;
    }
    case PairKind::kHumanVsGenerated:
      for (const auto& r : records) {
        if (r.provenance.kind != ProvenanceKind::kGenerated) continue;
        const EssayRecord& parent = corpus.Get(*r.parent_id);
        if (parent.provenance.kind == ProvenanceKind::kHuman) add(parent, r);
      }
      break;
    case PairKind::kGeneratedVsParaphrase: {
      const Provenance wanted = Provenance::Paraphrased(std::string(AttackSlug(pairs.attack)));
      for (const auto& r : records) {
        if (!(r.provenance == wanted)) continue;
        const EssayRecord* origin = corpus.FindAncestor(r.id, [](const EssayRecord& a) {
          return a.provenance.kind == ProvenanceKind::kGenerated ||
                 a.provenance.kind == ProvenanceKind::kWatermarked;
        });
        if (origin != nullptr) add(*origin, r);
      }
      break;
    }
  }
  if (row.pairs == 0) {
    throw Error(ErrorCode::kMissingInputs, "no record pairs qualify for '" + row.label + "'");
  }
  row.average = sum / static_cast<double>(row.pairs);
  return row;
}

std::vector<SimilarityRow> SimilarityReport(const Corpus& corpus, const Embedder& embedder) {
  const std::vector<PairSelector> selectors = {
      PairSelector::HumanVsHuman(),
      PairSelector::HumanVsGenerated(),
      PairSelector::GeneratedVsParaphrase(AttackName::kPerplexity),
      PairSelector::GeneratedVsParaphrase(AttackName::kCollegeStudent),
      PairSelector::GeneratedVsParaphrase(AttackName::kRecursive),
  };
  std::vector<SimilarityRow> rows;
  for (const auto& s : selectors) {
    try {
      rows.push_back(AverageSimilarity(corpus, s, embedder));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMissingInputs) throw;
    }
  }
  return rows;
}

std::string SimilarityReportCsv(const std::vector<SimilarityRow>& rows) {
  std::string out = "texts,avg_cosine,pairs\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.2f", r.average);
    out += '"' + r.label + "\"," + buf + "," + std::to_string(r.pairs) + "\n";
  }
  return out;
}

}  // namespace detectkit
