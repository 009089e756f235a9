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

#ifndef DETECTKIT_VOCABULARY_H_
#define DETECTKIT_VOCABULARY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace detectkit {

using TokenId = std::uint32_t;
using TokenSequence = std::vector<TokenId>;

// Reserved ids. The sentinels are ordinary vocabulary entries for the
// language model but never take part in the watermark partition.
inline constexpr TokenId kUnkId = 0;
inline constexpr TokenId kBosId = 1;
inline constexpr TokenId kEosId = 2;
inline constexpr TokenId kNumReservedIds = 3;

inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";

constexpr bool IsReserved(TokenId id) { return id < kNumReservedIds; }

// Bijection between token strings and dense ids; ids 0..2 are reserved.
class Vocabulary {
 public:
  // Only the reserved entries.
  Vocabulary();

  // Reserved entries followed by `tokens` in the given order. Duplicates and
  // reserved spellings are rejected.
  explicit Vocabulary(const std::vector<std::string>& tokens);

  std::size_t size() const { return tokens_.size(); }

  const std::string& Token(TokenId id) const;

  // kUnkId for unknown strings.
  TokenId Id(std::string_view token) const;
  bool Contains(std::string_view token) const;

  const std::vector<std::string>& tokens() const { return tokens_; }

  TokenSequence Encode(const std::vector<std::string>& tokens) const;
  std::vector<std::string> Decode(std::span<const TokenId> ids) const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void Add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

}  // namespace detectkit

#endif  // DETECTKIT_VOCABULARY_H_
