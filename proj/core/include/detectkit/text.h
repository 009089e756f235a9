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

#ifndef DETECTKIT_TEXT_H_
#define DETECTKIT_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers backed by ICU.
namespace detectkit::text {

// Unicode NFC. Invalid UTF-8 sequences become U+FFFD.
std::string NormalizeNfc(std::string_view utf8);

// Full Unicode lowercase mapping (root locale).
std::string ToLower(std::string_view utf8);

// Splits on Unicode White_Space code points; no empty pieces.
std::vector<std::string> SplitWhitespace(std::string_view utf8);

bool IsBlank(std::string_view utf8);

std::size_t CodePointCount(std::string_view utf8);

// True when every code point of `utf8` has a Unicode P* general category.
bool IsAllPunctuation(std::string_view utf8);

// Splits one whitespace-free word into leading punctuation (one token per code
// point), the core, and trailing punctuation (one token per code point). A
// word made only of punctuation yields one token per code point.
std::vector<std::string> SplitEdgePunctuation(std::string_view word);

}  // namespace detectkit::text

#endif  // DETECTKIT_TEXT_H_
