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

#include "detectkit/text.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <string>

#include "detectkit/error.h"

namespace detectkit::text {
namespace {

icu::UnicodeString FromUtf8(std::string_view utf8) {
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
}

std::string ToUtf8(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

std::string EncodeCodePoint(UChar32 c) {
  icu::UnicodeString s(c);
  return ToUtf8(s);
}

// Iterates the code points of a UTF-8 string. Malformed bytes decode as
// negative values, which ICU property functions treat as "not in class".
template <typename Fn>
void ForEachCodePoint(std::string_view utf8, Fn&& fn) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    fn(c, start, i);
  }
}

}  // namespace

std::string NormalizeNfc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("ICU NFC unavailable: ") + u_errorName(status));
  }
  icu::UnicodeString normalized = nfc->normalize(FromUtf8(utf8), status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("NFC normalization failed: ") + u_errorName(status));
  }
  return ToUtf8(normalized);
}

std::string ToLower(std::string_view utf8) {
  icu::UnicodeString s = FromUtf8(utf8);
  s.toLower(icu::Locale::getRoot());
  return ToUtf8(s);
}

std::vector<std::string> SplitWhitespace(std::string_view utf8) {
  std::vector<std::string> words;
  std::size_t word_start = 0;
  bool in_word = false;
  ForEachCodePoint(utf8, [&](UChar32 c, int32_t start, int32_t) {
    const bool space = c >= 0 && u_isUWhiteSpace(c);
    if (space && in_word) {
      words.emplace_back(utf8.substr(word_start, start - word_start));
      in_word = false;
    } else if (!space && !in_word) {
      word_start = static_cast<std::size_t>(start);
      in_word = true;
    }
  });
  if (in_word) words.emplace_back(utf8.substr(word_start));
  return words;
}

bool IsBlank(std::string_view utf8) { return SplitWhitespace(utf8).empty(); }

std::size_t CodePointCount(std::string_view utf8) {
  std::size_t n = 0;
  ForEachCodePoint(utf8, [&](UChar32, int32_t, int32_t) { ++n; });
  return n;
}

bool IsAllPunctuation(std::string_view utf8) {
  if (utf8.empty()) return false;
  bool all = true;
  ForEachCodePoint(utf8, [&](UChar32 c, int32_t, int32_t) {
    if (c < 0 || !u_ispunct(c)) all = false;
  });
  return all;
}

std::vector<std::string> SplitEdgePunctuation(std::string_view word) {
  struct Piece {
    UChar32 c;
    int32_t begin;
    int32_t end;
  };
  std::vector<Piece> pieces;
  ForEachCodePoint(word, [&](UChar32 c, int32_t begin, int32_t end) {
    pieces.push_back({c, begin, end});
  });
  auto punct = [](UChar32 c) { return c >= 0 && u_ispunct(c); };

  std::size_t lead = 0;
  while (lead < pieces.size() && punct(pieces[lead].c)) ++lead;
  std::size_t trail = pieces.size();
  while (trail > lead && punct(pieces[trail - 1].c)) --trail;

  std::vector<std::string> out;
  for (std::size_t i = 0; i < lead; ++i) out.push_back(EncodeCodePoint(pieces[i].c));
  if (trail > lead) {
    const int32_t b = pieces[lead].begin;
    const int32_t e = pieces[trail - 1].end;
    out.emplace_back(word.substr(b, e - b));
  }
  for (std::size_t i = trail; i < pieces.size(); ++i) {
    out.push_back(EncodeCodePoint(pieces[i].c));
  }
  return out;
}

}  // namespace detectkit::text
