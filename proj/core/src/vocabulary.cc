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

#include "detectkit/vocabulary.h"

#include <string>

#include "detectkit/error.h"

namespace detectkit {

Vocabulary::Vocabulary() {
  Add(std::string(kUnkToken));
  Add(std::string(kBosToken));
  Add(std::string(kEosToken));
}

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) : Vocabulary() {
  tokens_.reserve(tokens.size() + kNumReservedIds);
  for (const auto& t : tokens) {
    if (ids_.contains(t)) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate vocabulary token '" + t + "'");
    }
    Add(t);
  }
}

void Vocabulary::Add(std::string token) {
  const auto id = static_cast<TokenId>(tokens_.size());
  ids_.emplace(token, id);
  tokens_.push_back(std::move(token));
}

const std::string& Vocabulary::Token(TokenId id) const {
  if (id >= tokens_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "token id " + std::to_string(id) + " out of range");
  }
  return tokens_[id];
}

TokenId Vocabulary::Id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnkId : it->second;
}

bool Vocabulary::Contains(std::string_view token) const {
  return ids_.contains(std::string(token));
}

TokenSequence Vocabulary::Encode(const std::vector<std::string>& tokens) const {
  TokenSequence ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(Id(t));
  return ids;
}

std::vector<std::string> Vocabulary::Decode(std::span<const TokenId> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (TokenId id : ids) out.push_back(Token(id));
  return out;
}

}  // namespace detectkit
