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

#ifndef DETECTKIT_TOKENIZER_H_
#define DETECTKIT_TOKENIZER_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "detectkit/vocabulary.h"

namespace detectkit {

// NFC-normalizes and lowercases, splits on Unicode whitespace, then peels
// leading and trailing punctuation off each word as one token per code point.
// Inner punctuation stays ("don't").
std::vector<std::string> TokenizeWords(std::string_view text);

// TokenizeWords mapped through `vocab`; unknown words become kUnkId.
TokenSequence Tokenize(std::string_view text, const Vocabulary& vocab);

// Space-joins tokens, attaching closing punctuation to the previous token and
// opening brackets to the next one. TokenizeWords(Detokenize(t)) == t for any
// t produced by TokenizeWords.
std::string Detokenize(std::span<const std::string> tokens);
std::string Detokenize(std::span<const TokenId> ids, const Vocabulary& vocab);

}  // namespace detectkit

#endif  // DETECTKIT_TOKENIZER_H_
