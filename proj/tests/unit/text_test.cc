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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

namespace detectkit::text {
namespace {

using ::testing::ElementsAre;

TEST(NormalizeNfc, ComposesCombiningMarks) {
  EXPECT_EQ(NormalizeNfc("e\xCC\x81"), "\xC3\xA9");
  EXPECT_EQ(NormalizeNfc("plain"), "plain");
}

TEST(NormalizeNfc, ReplacesInvalidBytes) {
  EXPECT_EQ(NormalizeNfc("a\xFF" "b"), "a\xEF\xBF\xBD" "b");
}

TEST(ToLower, HandlesNonAscii) {
  EXPECT_EQ(ToLower("\xC3\x84" "Bc"), "\xC3\xA4" "bc");
  EXPECT_EQ(ToLower("ABC def"), "abc def");
}

TEST(SplitWhitespace, UsesUnicodeWhiteSpace) {
  EXPECT_THAT(SplitWhitespace("  a\tb\n c\xC2\xA0" "d\xE3\x80\x80" "e  "),
              ElementsAre("a", "b", "c", "d", "e"));
  EXPECT_TRUE(SplitWhitespace(" \n\t").empty());
  EXPECT_TRUE(SplitWhitespace("").empty());
}

TEST(IsBlank, DetectsWhitespaceOnly) {
  EXPECT_TRUE(IsBlank(""));
  EXPECT_TRUE(IsBlank(" \t\xC2\xA0"));
  EXPECT_FALSE(IsBlank(" x "));
}

TEST(CodePointCount, CountsCodePointsNotBytes) {
  EXPECT_EQ(CodePointCount("abc"), 3u);
  EXPECT_EQ(CodePointCount("\xC3\xA9t\xC3\xA9"), 3u);
  EXPECT_EQ(CodePointCount("\xF0\x9F\x98\x80"), 1u);
}

TEST(IsAllPunctuation, Categories) {
  EXPECT_TRUE(IsAllPunctuation("..."));
  EXPECT_TRUE(IsAllPunctuation("\xE2\x80\x9C"));  // left double quote
  EXPECT_FALSE(IsAllPunctuation("a."));
  EXPECT_FALSE(IsAllPunctuation(""));
}

TEST(SplitEdgePunctuation, PeelsEdges) {
  EXPECT_THAT(SplitEdgePunctuation("(hello),"), ElementsAre("(", "hello", ")", ","));
  EXPECT_THAT(SplitEdgePunctuation("don't"), ElementsAre("don't"));
  EXPECT_THAT(SplitEdgePunctuation("end."), ElementsAre("end", "."));
  EXPECT_THAT(SplitEdgePunctuation("..."), ElementsAre(".", ".", "."));
  EXPECT_THAT(SplitEdgePunctuation("word"), ElementsAre("word"));
  EXPECT_THAT(SplitEdgePunctuation("\xE2\x80\x9Cquote\xE2\x80\x9D"),
              ElementsAre("\xE2\x80\x9C", "quote", "\xE2\x80\x9D"));
}

}  // namespace
}  // namespace detectkit::text
