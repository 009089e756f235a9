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

#include "detectkit/tokenizer.h"

#include <string_view>

#include "detectkit/text.h"

namespace detectkit {
namespace {

bool IsClosing(std::string_view tok) {
  static constexpr std::string_view kClosing[] = {".", ",", ";", ":", "!", "?", ")", "]", "}", "%"};
  for (auto c : kClosing) {
    if (tok == c) return true;
  }
  return false;
}

bool IsOpening(std::string_view tok) { return tok == "(" || tok == "[" || tok == "{"; }

}  // namespace

std::vector<std::string> TokenizeWords(std::string_view text) {
  const std::string normalized = text::ToLower(text::NormalizeNfc(text));
  std::vector<std::string> tokens;
  for (const auto& word : text::SplitWhitespace(normalized)) {
    for (auto& piece : text::SplitEdgePunctuation(word)) tokens.push_back(std::move(piece));
  }
  return tokens;
}

TokenSequence Tokenize(std::string_view text, const Vocabulary& vocab) {
  return vocab.Encode(TokenizeWords(text));
}

std::string Detokenize(std::span<const std::string> tokens) {
  std::string out;
  bool glue_next = true;
  for (const auto& tok : tokens) {
    if (!glue_next && !IsClosing(tok)) out += ' ';
    out += tok;
    glue_next = IsOpening(tok);
  }
  return out;
}

std::string Detokenize(std::span<const TokenId> ids, const Vocabulary& vocab) {
  const auto tokens = vocab.Decode(ids);
  return Detokenize(tokens);
}

}  // namespace detectkit
