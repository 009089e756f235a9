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

#include "detectkit/language_model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "detectkit/error.h"
#include "detectkit/rng.h"
#include "detectkit/tokenizer.h"
#include "json.hpp"

namespace detectkit {

std::size_t NGramModel::ContextHash::operator()(const std::vector<TokenId>& ctx) const {
  std::uint64_t h = 0x51ed270b27f3a4c5ULL ^ ctx.size();
  for (TokenId id : ctx) h = Mix64(h + 0x9e3779b97f4a7c15ULL + id);
  return static_cast<std::size_t>(h);
}

NGramModel::NGramModel(int order, Vocabulary vocabulary, Smoothing smoothing)
    : order_(order), vocabulary_(std::move(vocabulary)), smoothing_(smoothing) {
  if (order < 1) throw Error(ErrorCode::kInvalidArgument, "n-gram order must be >= 1");
  if (smoothing.kind == Smoothing::Kind::kAddK && !(smoothing.k > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "add-k smoothing needs k > 0");
  }
  tables_.resize(static_cast<std::size_t>(order));
}

std::vector<TokenId> NGramModel::PaddedContext(std::span<const TokenId> context,
                                               int length) const {
  std::vector<TokenId> out(static_cast<std::size_t>(length), kBosId);
  const std::size_t take = std::min<std::size_t>(context.size(), static_cast<std::size_t>(length));
  std::copy(context.end() - static_cast<std::ptrdiff_t>(take), context.end(),
            out.end() - static_cast<std::ptrdiff_t>(take));
  return out;
}

void NGramModel::AddTopOrderCount(std::span<const TokenId> ngram, std::uint64_t count) {
  if (ngram.size() != static_cast<std::size_t>(order_)) {
    throw Error(ErrorCode::kInvalidArgument, "n-gram length must equal the model order");
  }
  // One top-order occurrence is also one occurrence of each of its suffixes.
  const TokenId target = ngram.back();
  for (int n = 1; n <= order_; ++n) {
    std::vector<TokenId> ctx(ngram.end() - n, ngram.end() - 1);
    ContextStats& stats = tables_[n - 1][ctx];
    stats.total += count;
    stats.next[target] += count;
  }
  trained_tokens_ += count;
}

void NGramModel::AddSequence(std::span<const TokenId> ids) {
  for (TokenId id : ids) {
    if (id >= vocabulary_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "token id outside the model vocabulary");
    }
  }
  std::vector<TokenId> padded(static_cast<std::size_t>(order_ - 1), kBosId);
  padded.insert(padded.end(), ids.begin(), ids.end());
  padded.push_back(kEosId);
  const std::span<const TokenId> all(padded);
  for (std::size_t i = static_cast<std::size_t>(order_ - 1); i < padded.size(); ++i) {
    AddTopOrderCount(all.subspan(i + 1 - order_, static_cast<std::size_t>(order_)), 1);
  }
}

const NGramModel::ContextStats* NGramModel::Stats(int order,
                                                  std::span<const TokenId> context) const {
  const auto& table = tables_[order - 1];
  auto it = table.find(std::vector<TokenId>(context.begin(), context.end()));
  return it == table.end() ? nullptr : &it->second;
}

std::uint64_t NGramModel::Count(std::span<const TokenId> context, TokenId token) const {
  if (context.size() >= static_cast<std::size_t>(order_)) return 0;
  const ContextStats* s = Stats(static_cast<int>(context.size()) + 1, context);
  if (s == nullptr) return 0;
  auto it = s->next.find(token);
  return it == s->next.end() ? 0 : it->second;
}

std::uint64_t NGramModel::ContextTotal(std::span<const TokenId> context) const {
  if (context.size() >= static_cast<std::size_t>(order_)) return 0;
  const ContextStats* s = Stats(static_cast<int>(context.size()) + 1, context);
  return s == nullptr ? 0 : s->total;
}

std::vector<double> NGramModel::Distribution(std::span<const TokenId> context) const {
  const std::size_t v = vocabulary_.size();
  const std::vector<TokenId> ctx = PaddedContext(context, order_ - 1);
  const std::span<const TokenId> full(ctx);

  if (smoothing_.kind == Smoothing::Kind::kAddK) {
    const ContextStats* s = Stats(order_, full);
    const double total = s == nullptr ? 0.0 : static_cast<double>(s->total);
    const double denom = total + smoothing_.k * static_cast<double>(v);
    std::vector<double> p(v, smoothing_.k / denom);
    if (s != nullptr) {
      for (const auto& [w, c] : s->next) p[w] = (static_cast<double>(c) + smoothing_.k) / denom;
    }
    return p;
  }

  std::vector<double> p(v, 1.0 / static_cast<double>(v));
  for (int n = 1; n <= order_; ++n) {
    const ContextStats* s = Stats(n, full.last(static_cast<std::size_t>(n - 1)));
    if (s == nullptr || s->total == 0) continue;
    const double distinct = static_cast<double>(s->next.size());
    const double denom = static_cast<double>(s->total) + distinct;
    const double scale = distinct / denom;
    for (double& x : p) x *= scale;
    for (const auto& [w, c] : s->next) p[w] += static_cast<double>(c) / denom;
  }
  return p;
}

double NGramModel::Probability(std::span<const TokenId> context, TokenId token) const {
  const std::size_t v = vocabulary_.size();
  if (token >= v) throw Error(ErrorCode::kInvalidArgument, "token id outside the model vocabulary");
  const std::vector<TokenId> ctx = PaddedContext(context, order_ - 1);
  const std::span<const TokenId> full(ctx);

  if (smoothing_.kind == Smoothing::Kind::kAddK) {
    const ContextStats* s = Stats(order_, full);
    double total = 0.0;
    double count = 0.0;
    if (s != nullptr) {
      total = static_cast<double>(s->total);
      if (auto it = s->next.find(token); it != s->next.end()) count = static_cast<double>(it->second);
    }
    return (count + smoothing_.k) / (total + smoothing_.k * static_cast<double>(v));
  }

  double p = 1.0 / static_cast<double>(v);
  for (int n = 1; n <= order_; ++n) {
    const ContextStats* s = Stats(n, full.last(static_cast<std::size_t>(n - 1)));
    if (s == nullptr || s->total == 0) continue;
    const double distinct = static_cast<double>(s->next.size());
    const double denom = static_cast<double>(s->total) + distinct;
    double count = 0.0;
    if (auto it = s->next.find(token); it != s->next.end()) count = static_cast<double>(it->second);
    p = p * (distinct / denom) + count / denom;
  }
  return p;
}

std::vector<double> NGramModel::NextTokenLogits(std::span<const TokenId> context) const {
  std::vector<double> logits = Distribution(context);
  for (double& x : logits) x = std::log(x);
  return logits;
}

std::vector<NGramModel::NGramCount> NGramModel::TopOrderCounts() const {
  std::vector<NGramCount> out;
  for (const auto& [ctx, stats] : tables_[order_ - 1]) {
    for (const auto& [w, c] : stats.next) {
      std::vector<TokenId> ngram = ctx;
      ngram.push_back(w);
      out.push_back({std::move(ngram), c});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const NGramCount& a, const NGramCount& b) { return a.ngram < b.ngram; });
  return out;
}

bool NGramModel::operator==(const NGramModel& other) const {
  if (order_ != other.order_ || !(smoothing_ == other.smoothing_) ||
      !(vocabulary_ == other.vocabulary_) || trained_tokens_ != other.trained_tokens_) {
    return false;
  }
  const auto a = TopOrderCounts();
  const auto b = other.TopOrderCounts();
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const NGramCount& x, const NGramCount& y) {
                      return x.ngram == y.ngram && x.count == y.count;
                    });
}

NGramModel TrainNGram(const std::vector<std::string>& texts, int order, Smoothing smoothing) {
  if (order < 1) throw Error(ErrorCode::kInvalidArgument, "n-gram order must be >= 1");
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(texts.size());
  std::set<std::string> words;
  for (const auto& t : texts) {
    auto toks = TokenizeWords(t);
    words.insert(toks.begin(), toks.end());
    tokenized.push_back(std::move(toks));
  }
  if (words.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "training corpus has no tokens");
  }
  // Reserved spellings cannot come out of the tokenizer (angle brackets are
  // peeled off as punctuation), so every word is a fresh entry.
  Vocabulary vocab(std::vector<std::string>(words.begin(), words.end()));
  std::vector<TokenSequence> sequences;
  sequences.reserve(tokenized.size());
  for (const auto& toks : tokenized) {
    if (!toks.empty()) sequences.push_back(vocab.Encode(toks));
  }
  return TrainNGram(sequences, std::move(vocab), order, smoothing);
}

NGramModel TrainNGram(const std::vector<TokenSequence>& sequences, Vocabulary vocabulary,
                      int order, Smoothing smoothing) {
  const bool any = std::any_of(sequences.begin(), sequences.end(),
                               [](const TokenSequence& s) { return !s.empty(); });
  if (!any) throw Error(ErrorCode::kInvalidArgument, "training corpus has no tokens");
  NGramModel model(order, std::move(vocabulary), smoothing);
  for (const auto& s : sequences) {
    if (!s.empty()) model.AddSequence(s);
  }
  return model;
}

std::string SerializeModel(const NGramModel& model) {
  nlohmann::ordered_json doc;
  doc["version"] = kModelFormatVersion;
  doc["order"] = model.order();
  nlohmann::ordered_json smoothing;
  if (model.smoothing().kind == Smoothing::Kind::kAddK) {
    smoothing["kind"] = "add_k";
    smoothing["k"] = model.smoothing().k;
  } else {
    smoothing["kind"] = "witten_bell";
  }
  doc["smoothing"] = std::move(smoothing);
  doc["vocabulary"] = model.vocabulary().tokens();
  doc["trained_tokens"] = model.trained_tokens();
  nlohmann::ordered_json counts = nlohmann::ordered_json::array();
  for (const auto& entry : model.TopOrderCounts()) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (TokenId id : entry.ngram) row.push_back(id);
    row.push_back(entry.count);
    counts.push_back(std::move(row));
  }
  doc["counts"] = std::move(counts);
  return doc.dump();
}

NGramModel DeserializeModel(std::string_view json) {
  try {
    const auto doc = nlohmann::json::parse(json);
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(ErrorCode::kParse, "unsupported model format version " + std::to_string(version));
    }
    const int order = doc.at("order").get<int>();
    const auto& sm = doc.at("smoothing");
    const std::string kind = sm.at("kind").get<std::string>();
    Smoothing smoothing;
    if (kind == "add_k") {
      smoothing = Smoothing::AddK(sm.at("k").get<double>());
    } else if (kind == "witten_bell") {
      smoothing = Smoothing::WittenBell();
    } else {
      throw Error(ErrorCode::kParse, "unknown smoothing '" + kind + "'");
    }
    auto tokens = doc.at("vocabulary").get<std::vector<std::string>>();
    if (tokens.size() < kNumReservedIds || tokens[kUnkId] != kUnkToken ||
        tokens[kBosId] != kBosToken || tokens[kEosId] != kEosToken) {
      throw Error(ErrorCode::kParse, "model vocabulary lacks the reserved entries");
    }
    tokens.erase(tokens.begin(), tokens.begin() + kNumReservedIds);
    NGramModel model(order, Vocabulary(tokens), smoothing);
    std::vector<TokenId> ngram;
    for (const auto& row : doc.at("counts")) {
      if (!row.is_array() || row.size() != static_cast<std::size_t>(order) + 1) {
        throw Error(ErrorCode::kParse, "count rows must hold order ids plus a count");
      }
      ngram.clear();
      for (std::size_t i = 0; i < static_cast<std::size_t>(order); ++i) {
        const auto id = row[i].get<TokenId>();
        if (id >= model.vocabulary().size()) throw Error(ErrorCode::kParse, "count row id out of range");
        ngram.push_back(id);
      }
      model.AddTopOrderCount(ngram, row[static_cast<std::size_t>(order)].get<std::uint64_t>());
    }
    if (model.trained_tokens() != doc.at("trained_tokens").get<std::uint64_t>()) {
      throw Error(ErrorCode::kParse, "trained_tokens disagrees with the stored counts");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed model file: ") + e.what());
  }
}

void SaveModel(const NGramModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write model file '" + path.string() + "'");
  out << SerializeModel(model) << '\n';
}

NGramModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open model file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DeserializeModel(buffer.str());
}

}  // namespace detectkit
