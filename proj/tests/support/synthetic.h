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

#ifndef DETECTKIT_TESTS_SUPPORT_SYNTHETIC_H_
#define DETECTKIT_TESTS_SUPPORT_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "detectkit/rng.h"
#include "detectkit/vocabulary.h"

namespace detectkit::testing {

// "w0000", "w0001", ... (already in tokenizer-normal form).
std::vector<std::string> WordList(std::size_t n, const std::string& prefix = "w");

std::string JoinWords(const std::vector<std::string>& words);

// First-order Markov chain over `words`: each word has `branching` successors
// drawn uniformly, weighted 1/rank^zipf_s. Different seeds give different
// sources over the same word list.
class MarkovSource {
 public:
  MarkovSource(std::vector<std::string> words, std::size_t branching, double zipf_s,
               std::uint64_t seed);

  std::vector<std::string> Generate(std::size_t length, Rng& rng) const;
  std::string GenerateText(std::size_t length, Rng& rng) const {
    return JoinWords(Generate(length, rng));
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::vector<std::size_t>> successors_;
  std::vector<double> cumulative_;  // shared rank weights, normalized
};

// Draws ranks 0..n-1 with P(r) proportional to 1/(r+1)^s.
class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double s);
  std::size_t Draw(Rng& rng) const;

 private:
  std::vector<double> cumulative_;
};

// Human-like token text: each text keeps a private pool of `pool_size`
// phrases (2 to 4 Zipfian tokens each, fixed per text). With probability
// `phrase_rate` the next chunk is a pooled phrase, otherwise one Zipfian
// token. Ids are non-reserved ids of a vocabulary of size `vocab_size`.
struct ZipfianPhraseCorpus {
  std::size_t vocab_size = 2000;
  double zipf_s = 1.1;
  std::size_t pool_size = 12;
  double phrase_rate = 0.5;

  TokenSequence Generate(std::size_t length, Rng& rng) const;
};

// Uniform i.i.d. ids from the non-reserved range of a vocabulary of size
// `vocab_size`.
TokenSequence UniformTokens(std::size_t length, std::size_t vocab_size, Rng& rng);

// Like UniformTokens but without repeats, so no context occurs twice.
TokenSequence DistinctUniformTokens(std::size_t length, std::size_t vocab_size, Rng& rng);

// A vocabulary of the reserved entries plus `words`.
Vocabulary MakeVocabulary(const std::vector<std::string>& words);

}  // namespace detectkit::testing

#endif  // DETECTKIT_TESTS_SUPPORT_SYNTHETIC_H_
